#pragma once

#include "cscoop/ast.hpp"
#include "cscoop/diagnostics.hpp"
#include "cscoop/token.hpp"

#include <string>
#include <vector>

namespace cscoop {

// Recursive-descent parser over the token stream produced by tokenize().
// Emits positioned diagnostics; the returned tree is usable only when
// diags.has_errors() is false.
SyntaxTree parse(const std::vector<Token> &tokens, DiagnosticList &diags);

// Canonical source form of a tree. parse(pretty_print(t)) reproduces t
// structurally; used by the round-trip tests and `dump`.
std::string pretty_print(const SyntaxTree &tree);
std::string pretty_print(const SynExpr &expr);

} // namespace cscoop
