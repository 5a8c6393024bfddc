#pragma once

#include "cscoop/diagnostics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace cscoop {

// One source file held in memory. Line starts are indexed once so that
// byte offsets can be mapped to line/column pairs for diagnostics.
class SourceUnit {
public:
    SourceUnit(std::string path, std::string text);

    const std::string &path() const { return path_; }
    const std::string &text() const { return text_; }

    SourcePos position_of(std::size_t offset) const;

private:
    std::string path_;
    std::string text_;
    std::vector<std::size_t> line_starts_;
};

} // namespace cscoop
