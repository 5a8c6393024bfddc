#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cscoop {

struct SourcePos {
    std::uint32_t line = 0;   // 1-based; 0 = unknown
    std::uint32_t column = 0; // 1-based

    bool known() const { return line != 0; }
    bool operator==(const SourcePos &) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string path;
    SourcePos pos;
    std::string message;

    std::string format() const;
};

// Shared sink for all frontend passes. A pass that reported at least one
// error leaves the structure it produced unusable for later passes.
class DiagnosticList {
public:
    void error(std::string path, SourcePos pos, std::string message);
    void warning(std::string path, SourcePos pos, std::string message);

    // convenience forms tagging the current file (set once per unit)
    void set_path(std::string path) { path_ = std::move(path); }
    void error(SourcePos pos, std::string message) { error(path_, pos, std::move(message)); }
    void warning(SourcePos pos, std::string message) {
        warning(path_, pos, std::move(message));
    }

    bool has_errors() const { return error_count_ > 0; }
    std::size_t error_count() const { return error_count_; }
    const std::vector<Diagnostic> &all() const { return items_; }

    std::string format_all() const;

private:
    std::vector<Diagnostic> items_;
    std::string path_;
    std::size_t error_count_ = 0;
};

} // namespace cscoop
