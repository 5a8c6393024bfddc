#include "cscoop/diagnostics.hpp"

#include <sstream>

namespace cscoop {

std::string Diagnostic::format() const {
    std::ostringstream os;
    os << path;
    if (pos.known())
        os << ":" << pos.line << ":" << pos.column;
    os << ": " << (severity == Severity::Error ? "error" : "warning") << ": " << message;
    return os.str();
}

void DiagnosticList::error(std::string path, SourcePos pos, std::string message) {
    items_.push_back({Severity::Error, std::move(path), pos, std::move(message)});
    ++error_count_;
}

void DiagnosticList::warning(std::string path, SourcePos pos, std::string message) {
    items_.push_back({Severity::Warning, std::move(path), pos, std::move(message)});
}

std::string DiagnosticList::format_all() const {
    std::string out;
    for (const auto &d : items_) {
        out += d.format();
        out += '\n';
    }
    return out;
}

} // namespace cscoop
