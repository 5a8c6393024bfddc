#pragma once

#include "cscoop/source.hpp"
#include "cscoop/token.hpp"

#include <vector>

namespace cscoop {

// Splits a source unit into tokens. "--" comments run to end of line and are
// dropped. The returned stream always ends with an Eof token; on a lexical
// error the offending character is reported and skipped.
std::vector<Token> tokenize(const SourceUnit &unit, DiagnosticList &diags);

} // namespace cscoop
