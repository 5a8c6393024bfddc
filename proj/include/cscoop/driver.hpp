#pragma once

#include "cscoop/ir.hpp"
#include "cscoop/lexer.hpp"
#include "cscoop/parser.hpp"
#include "cscoop/sema.hpp"

#include <memory>
#include <string>

namespace cscoop {

// Full frontend pipeline: tokenize, parse, collect types, check, lower.
// program stays null when any stage reports errors.
struct CompileResult {
    DiagnosticList diags;
    SyntaxTree tree; // checker-annotated on success
    TypeEnv env;
    std::shared_ptr<const Program> program;

    bool ok() const { return program != nullptr; }
};

CompileResult compile_text(const std::string &text, const std::string &path,
                           const LowerOptions &options = {});
CompileResult compile_file(const std::string &path, const LowerOptions &options = {});

} // namespace cscoop
