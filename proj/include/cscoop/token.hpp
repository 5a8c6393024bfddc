#pragma once

#include "cscoop/diagnostics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cscoop {

enum class TokenKind : std::uint8_t {
    // literals and names
    Ident,
    IntLit,
    StringLit,
    // keywords
    KwClass,
    KwRoot,
    KwEnd,
    KwDo,
    KwLocal,
    KwRequire,
    KwEnsure,
    KwCreate,
    KwIf,
    KwThen,
    KwElse,
    KwFrom,
    KwUntil,
    KwLoop,
    KwSeparate,
    KwAnd,
    KwOr,
    KwNot,
    KwTrue,
    KwFalse,
    KwVoid,
    KwCurrent,
    KwPrint,
    // punctuation and operators
    LParen,
    RParen,
    Comma,
    Colon,
    Semicolon,
    Dot,
    Assign,   // :=
    Plus,
    Minus,
    Star,
    IntDiv,   // //
    Lt,
    Le,
    Eq,       // =
    Ne,       // /=
    Eof,
};

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;     // raw spelling (identifier name, literal digits, string body)
    SourcePos pos;
};

const char *token_kind_name(TokenKind kind);

} // namespace cscoop
