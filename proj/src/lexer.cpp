#include "cscoop/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace cscoop {

const char *token_kind_name(TokenKind kind) {
    switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::IntLit: return "integer literal";
    case TokenKind::StringLit: return "string literal";
    case TokenKind::KwClass: return "'class'";
    case TokenKind::KwRoot: return "'root'";
    case TokenKind::KwEnd: return "'end'";
    case TokenKind::KwDo: return "'do'";
    case TokenKind::KwLocal: return "'local'";
    case TokenKind::KwRequire: return "'require'";
    case TokenKind::KwEnsure: return "'ensure'";
    case TokenKind::KwCreate: return "'create'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwThen: return "'then'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwFrom: return "'from'";
    case TokenKind::KwUntil: return "'until'";
    case TokenKind::KwLoop: return "'loop'";
    case TokenKind::KwSeparate: return "'separate'";
    case TokenKind::KwAnd: return "'and'";
    case TokenKind::KwOr: return "'or'";
    case TokenKind::KwNot: return "'not'";
    case TokenKind::KwTrue: return "'true'";
    case TokenKind::KwFalse: return "'false'";
    case TokenKind::KwVoid: return "'Void'";
    case TokenKind::KwCurrent: return "'Current'";
    case TokenKind::KwPrint: return "'print'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Comma: return "','";
    case TokenKind::Colon: return "':'";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Assign: return "':='";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::IntDiv: return "'//'";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Eq: return "'='";
    case TokenKind::Ne: return "'/='";
    case TokenKind::Eof: return "end of input";
    }
    return "?";
}

namespace {

const std::unordered_map<std::string, TokenKind> &keyword_table() {
    static const std::unordered_map<std::string, TokenKind> table = {
        {"class", TokenKind::KwClass},     {"root", TokenKind::KwRoot},
        {"end", TokenKind::KwEnd},         {"do", TokenKind::KwDo},
        {"local", TokenKind::KwLocal},     {"require", TokenKind::KwRequire},
        {"ensure", TokenKind::KwEnsure},   {"create", TokenKind::KwCreate},
        {"if", TokenKind::KwIf},           {"then", TokenKind::KwThen},
        {"else", TokenKind::KwElse},       {"from", TokenKind::KwFrom},
        {"until", TokenKind::KwUntil},     {"loop", TokenKind::KwLoop},
        {"separate", TokenKind::KwSeparate}, {"and", TokenKind::KwAnd},
        {"or", TokenKind::KwOr},           {"not", TokenKind::KwNot},
        {"true", TokenKind::KwTrue},       {"false", TokenKind::KwFalse},
        {"Void", TokenKind::KwVoid},       {"Current", TokenKind::KwCurrent},
        {"print", TokenKind::KwPrint},
    };
    return table;
}

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

std::vector<Token> tokenize(const SourceUnit &unit, DiagnosticList &diags) {
    const std::string &s = unit.text();
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = s.size();

    auto push = [&](TokenKind kind, std::size_t start, std::size_t len) {
        out.push_back({kind, s.substr(start, len), unit.position_of(start)});
    };

    while (i < n) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < n && s[i + 1] == '-') {
            while (i < n && s[i] != '\n')
                ++i;
            continue;
        }
        std::size_t start = i;
        if (is_ident_start(c)) {
            while (i < n && is_ident_char(s[i]))
                ++i;
            std::string word = s.substr(start, i - start);
            auto it = keyword_table().find(word);
            if (it != keyword_table().end())
                out.push_back({it->second, std::move(word), unit.position_of(start)});
            else
                out.push_back({TokenKind::Ident, std::move(word), unit.position_of(start)});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < n && std::isdigit(static_cast<unsigned char>(s[i])))
                ++i;
            push(TokenKind::IntLit, start, i - start);
            continue;
        }
        if (c == '"') {
            ++i;
            std::size_t body = i;
            while (i < n && s[i] != '"' && s[i] != '\n')
                ++i;
            if (i >= n || s[i] != '"') {
                diags.error(unit.path(), unit.position_of(start), "unterminated string literal");
                out.push_back({TokenKind::StringLit, s.substr(body, i - body), unit.position_of(start)});
                continue;
            }
            out.push_back({TokenKind::StringLit, s.substr(body, i - body), unit.position_of(start)});
            ++i; // closing quote
            continue;
        }
        switch (c) {
        case '(': push(TokenKind::LParen, start, 1); ++i; continue;
        case ')': push(TokenKind::RParen, start, 1); ++i; continue;
        case ',': push(TokenKind::Comma, start, 1); ++i; continue;
        case ';': push(TokenKind::Semicolon, start, 1); ++i; continue;
        case '.': push(TokenKind::Dot, start, 1); ++i; continue;
        case '+': push(TokenKind::Plus, start, 1); ++i; continue;
        case '-': push(TokenKind::Minus, start, 1); ++i; continue;
        case '*': push(TokenKind::Star, start, 1); ++i; continue;
        case '=': push(TokenKind::Eq, start, 1); ++i; continue;
        case ':':
            if (i + 1 < n && s[i + 1] == '=') {
                push(TokenKind::Assign, start, 2);
                i += 2;
            } else {
                push(TokenKind::Colon, start, 1);
                ++i;
            }
            continue;
        case '/':
            if (i + 1 < n && s[i + 1] == '/') {
                push(TokenKind::IntDiv, start, 2);
                i += 2;
            } else if (i + 1 < n && s[i + 1] == '=') {
                push(TokenKind::Ne, start, 2);
                i += 2;
            } else {
                diags.error(unit.path(), unit.position_of(start),
                            "stray '/' (integer division is '//')");
                ++i;
            }
            continue;
        case '<':
            if (i + 1 < n && s[i + 1] == '=') {
                push(TokenKind::Le, start, 2);
                i += 2;
            } else {
                push(TokenKind::Lt, start, 1);
                ++i;
            }
            continue;
        default:
            diags.error(unit.path(), unit.position_of(start),
                        std::string("illegal character '") + c + "'");
            ++i;
            continue;
        }
    }
    out.push_back({TokenKind::Eof, "", unit.position_of(n)});
    return out;
}

} // namespace cscoop
