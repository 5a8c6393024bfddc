#include "cscoop/source.hpp"

#include <algorithm>

namespace cscoop {

SourceUnit::SourceUnit(std::string path, std::string text)
    : path_(std::move(path)), text_(std::move(text)) {
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < text_.size(); ++i) {
        if (text_[i] == '\n')
            line_starts_.push_back(i + 1);
    }
}

SourcePos SourceUnit::position_of(std::size_t offset) const {
    if (offset > text_.size())
        offset = text_.size();
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    std::size_t line = static_cast<std::size_t>(it - line_starts_.begin()); // 1-based
    std::size_t col = offset - line_starts_[line - 1] + 1;
    return {static_cast<std::uint32_t>(line), static_cast<std::uint32_t>(col)};
}

} // namespace cscoop
