#include "cscoop/parser.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

namespace cscoop {

namespace {

class Parser {
public:
    Parser(const std::vector<Token> &tokens, DiagnosticList &diags)
        : toks_(tokens), diags_(diags) {}

    SyntaxTree parse_program() {
        SyntaxTree tree;
        if (at(TokenKind::Eof)) {
            error(peek().pos, "input contains no classes");
            return tree;
        }
        while (!at(TokenKind::Eof)) {
            if (!at(TokenKind::KwClass)) {
                error(peek().pos, "expected 'class', got " + describe(peek()));
                skip_to(TokenKind::KwClass);
                if (at(TokenKind::Eof)) break;
            }
            tree.classes.push_back(parse_class());
        }
        for (const auto &c : tree.classes) {
            if (!c.is_root) continue;
            if (!tree.root_class.empty())
                error(c.pos, "multiple root classes ('" + tree.root_class + "' and '" + c.name + "')");
            else
                tree.root_class = c.name;
        }
        if (tree.root_class.empty() && !tree.classes.empty())
            error(tree.classes.front().pos, "no class is marked 'root'");
        return tree;
    }

private:
    const std::vector<Token> &toks_;
    DiagnosticList &diags_;
    std::size_t idx_ = 0;

    const Token &peek(std::size_t ahead = 0) const {
        std::size_t i = idx_ + ahead;
        if (i >= toks_.size()) i = toks_.size() - 1; // Eof sentinel
        return toks_[i];
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    const Token &advance() {
        const Token &t = toks_[idx_];
        if (idx_ + 1 < toks_.size()) ++idx_;
        return t;
    }
    bool accept(TokenKind k) {
        if (!at(k)) return false;
        advance();
        return true;
    }
    const Token *expect(TokenKind k, const char *what) {
        if (at(k)) return &advance();
        error(peek().pos, std::string("expected ") + what + ", got " + describe(peek()));
        return nullptr;
    }

    void error(SourcePos pos, std::string msg) { diags_.error(pos, std::move(msg)); }

    static std::string describe(const Token &t) {
        if (t.kind == TokenKind::Ident || t.kind == TokenKind::IntLit)
            return "'" + t.text + "'";
        return std::string("'") + token_kind_name(t.kind) + "'";
    }

    void skip_to(TokenKind k) {
        while (!at(TokenKind::Eof) && !at(k)) advance();
    }

    // Skip forward to something that can plausibly start the next feature or
    // close the class. Used after a malformed feature.
    void sync_feature() {
        while (!at(TokenKind::Eof) && !at(TokenKind::KwEnd) &&
               !at(TokenKind::Ident) && !at(TokenKind::KwClass))
            advance();
    }

    // ---- declarations -----------------------------------------------------

    ClassDecl parse_class() {
        ClassDecl cls;
        cls.pos = peek().pos;
        expect(TokenKind::KwClass, "'class'");
        if (const Token *t = expect(TokenKind::Ident, "class name")) cls.name = t->text;
        cls.is_root = accept(TokenKind::KwRoot);

        while (!at(TokenKind::KwEnd) && !at(TokenKind::Eof)) {
            if (at(TokenKind::KwClass)) {
                error(peek().pos, "missing 'end' before next class");
                return cls;
            }
            if (!at(TokenKind::Ident)) {
                error(peek().pos, "expected feature name, got " + describe(peek()));
                sync_feature();
                continue;
            }
            parse_feature(cls);
        }
        expect(TokenKind::KwEnd, "'end'");
        return cls;
    }

    DeclaredType parse_type() {
        DeclaredType ty;
        ty.separate = accept(TokenKind::KwSeparate);
        const Token *t = expect(TokenKind::Ident, "type name");
        if (!t) return ty;
        if (t->text == "INTEGER") {
            ty.base = BaseType::Integer;
        } else if (t->text == "BOOLEAN") {
            ty.base = BaseType::Boolean;
        } else {
            ty.base = BaseType::Reference;
            ty.class_name = t->text;
        }
        if (ty.separate && !ty.is_reference())
            error(t->pos, "'separate' applies only to class types, not " + t->text);
        return ty;
    }

    // feature := NAME ("," NAME)* ":" type              attribute(s)
    //          | NAME ["(...)"] [":" type] ... "end"    method
    // After `NAME : type` we look at what follows the type to tell a query
    // header from an attribute.
    void parse_feature(ClassDecl &cls) {
        std::vector<Token> names;
        names.push_back(advance()); // first NAME
        if (at(TokenKind::Comma)) {
            while (accept(TokenKind::Comma)) {
                if (const Token *t = expect(TokenKind::Ident, "attribute name"))
                    names.push_back(*t);
                else
                    break;
            }
            expect(TokenKind::Colon, "':'");
            DeclaredType ty = parse_type();
            for (const Token &n : names)
                cls.attributes.push_back(VarDecl{n.text, ty, n.pos});
            accept(TokenKind::Semicolon);
            return;
        }

        const Token &head = names.front();
        if (at(TokenKind::Colon)) {
            advance();
            DeclaredType ty = parse_type();
            if (at(TokenKind::KwRequire) || at(TokenKind::KwLocal) || at(TokenKind::KwDo)) {
                MethodDecl m;
                m.name = head.text;
                m.pos = head.pos;
                m.result_type = ty;
                parse_method_tail(m);
                cls.methods.push_back(std::move(m));
            } else {
                cls.attributes.push_back(VarDecl{head.text, ty, head.pos});
                accept(TokenKind::Semicolon);
            }
            return;
        }

        if (at(TokenKind::LParen) || at(TokenKind::KwRequire) || at(TokenKind::KwLocal) ||
            at(TokenKind::KwDo)) {
            MethodDecl m;
            m.name = head.text;
            m.pos = head.pos;
            if (accept(TokenKind::LParen)) {
                if (!at(TokenKind::RParen)) parse_formals(m);
                expect(TokenKind::RParen, "')'");
            }
            if (accept(TokenKind::Colon)) m.result_type = parse_type();
            parse_method_tail(m);
            cls.methods.push_back(std::move(m));
            return;
        }

        error(peek().pos, "expected ':', '(', or method body after '" + head.text + "'");
        sync_feature();
    }

    void parse_formals(MethodDecl &m) {
        for (;;) {
            std::vector<Token> group;
            if (const Token *t = expect(TokenKind::Ident, "formal argument name"))
                group.push_back(*t);
            else
                return;
            while (accept(TokenKind::Comma)) {
                // could be `a, b : T` or the next group after a full decl;
                // the former is the only valid reading before ':'
                if (const Token *t = expect(TokenKind::Ident, "formal argument name"))
                    group.push_back(*t);
                else
                    return;
            }
            expect(TokenKind::Colon, "':'");
            DeclaredType ty = parse_type();
            for (const Token &g : group) m.formals.push_back(VarDecl{g.text, ty, g.pos});
            if (!accept(TokenKind::Semicolon)) break;
            if (at(TokenKind::RParen)) break; // tolerate trailing ';'
        }
    }

    // `require`, `local`, `do ... [ensure] end`
    void parse_method_tail(MethodDecl &m) {
        if (accept(TokenKind::KwRequire)) m.require_expr = parse_expr();
        if (accept(TokenKind::KwLocal)) {
            while (at(TokenKind::Ident)) {
                std::vector<Token> group;
                group.push_back(advance());
                while (accept(TokenKind::Comma)) {
                    if (const Token *t = expect(TokenKind::Ident, "local name"))
                        group.push_back(*t);
                    else
                        break;
                }
                expect(TokenKind::Colon, "':'");
                DeclaredType ty = parse_type();
                for (const Token &g : group) m.locals.push_back(VarDecl{g.text, ty, g.pos});
                accept(TokenKind::Semicolon);
            }
        }
        expect(TokenKind::KwDo, "'do'");
        m.body = parse_stmts();
        if (accept(TokenKind::KwEnsure)) m.ensure_expr = parse_expr();
        expect(TokenKind::KwEnd, "'end'");
    }

    // ---- statements -------------------------------------------------------

    bool at_stmt_start() const {
        switch (peek().kind) {
        case TokenKind::KwCreate:
        case TokenKind::KwIf:
        case TokenKind::KwFrom:
        case TokenKind::KwPrint:
        case TokenKind::Ident:
        case TokenKind::KwCurrent:
            return true;
        default:
            return false;
        }
    }

    std::vector<StmtPtr> parse_stmts() {
        std::vector<StmtPtr> out;
        for (;;) {
            while (accept(TokenKind::Semicolon)) {}
            if (!at_stmt_start()) break;
            StmtPtr s = parse_stmt();
            if (!s) {
                // drop the offending token so we make progress
                if (!at(TokenKind::Eof)) advance();
                continue;
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    StmtPtr parse_stmt() {
        switch (peek().kind) {
        case TokenKind::KwCreate: return parse_create();
        case TokenKind::KwIf: return parse_if();
        case TokenKind::KwFrom: return parse_loop();
        case TokenKind::KwPrint: return parse_print();
        case TokenKind::Ident:
        case TokenKind::KwCurrent:
            return parse_assign_or_call();
        default:
            error(peek().pos, "expected statement, got " + describe(peek()));
            return nullptr;
        }
    }

    StmtPtr parse_create() {
        auto s = std::make_unique<Stmt>();
        s->kind = StmtKind::Create;
        s->pos = peek().pos;
        advance(); // create
        if (const Token *t = expect(TokenKind::Ident, "variable name")) s->target = t->text;
        if (accept(TokenKind::Dot)) {
            if (const Token *t = expect(TokenKind::Ident, "creation procedure name"))
                s->creation_method = t->text;
            if (accept(TokenKind::LParen)) {
                parse_args(s->args);
                expect(TokenKind::RParen, "')'");
            }
        }
        return s;
    }

    StmtPtr parse_if() {
        auto s = std::make_unique<Stmt>();
        s->kind = StmtKind::If;
        s->pos = peek().pos;
        advance(); // if
        s->expr = parse_expr();
        expect(TokenKind::KwThen, "'then'");
        s->then_body = parse_stmts();
        if (accept(TokenKind::KwElse)) s->else_body = parse_stmts();
        expect(TokenKind::KwEnd, "'end'");
        return s;
    }

    StmtPtr parse_loop() {
        auto s = std::make_unique<Stmt>();
        s->kind = StmtKind::Loop;
        s->pos = peek().pos;
        advance(); // from
        s->init_body = parse_stmts();
        expect(TokenKind::KwUntil, "'until'");
        s->expr = parse_expr();
        expect(TokenKind::KwLoop, "'loop'");
        s->then_body = parse_stmts();
        expect(TokenKind::KwEnd, "'end'");
        return s;
    }

    // print(...) is diagnostic output only; the argument is kept verbatim.
    StmtPtr parse_print() {
        auto s = std::make_unique<Stmt>();
        s->kind = StmtKind::Print;
        s->pos = peek().pos;
        advance(); // print
        expect(TokenKind::LParen, "'('");
        std::string text;
        int depth = 1;
        while (depth > 0 && !at(TokenKind::Eof)) {
            const Token &t = peek();
            if (t.kind == TokenKind::LParen) ++depth;
            if (t.kind == TokenKind::RParen && --depth == 0) break;
            if (!text.empty()) text += ' ';
            if (t.kind == TokenKind::StringLit)
                text += '"' + t.text + '"';
            else
                text += t.text;
            advance();
        }
        expect(TokenKind::RParen, "')'");
        s->print_text = std::move(text);
        return s;
    }

    StmtPtr parse_assign_or_call() {
        const Token head = peek();
        if (head.kind == TokenKind::Ident && peek(1).kind == TokenKind::Assign) {
            advance();
            advance();
            auto s = std::make_unique<Stmt>();
            s->kind = StmtKind::Assign;
            s->pos = head.pos;
            s->target = head.text;
            s->expr = parse_expr();
            return s;
        }

        // call statement: [target "."] NAME ["(" args ")"]
        auto s = std::make_unique<Stmt>();
        s->kind = StmtKind::Call;
        s->pos = head.pos;
        if (head.kind == TokenKind::KwCurrent) {
            advance();
            expect(TokenKind::Dot, "'.'");
            auto cur = std::make_unique<SynExpr>();
            cur->kind = SynExprKind::CurrentLit;
            cur->pos = head.pos;
            s->call_target = std::move(cur);
            if (const Token *t = expect(TokenKind::Ident, "method name")) s->method = t->text;
        } else {
            advance();
            if (accept(TokenKind::Dot)) {
                auto tgt = std::make_unique<SynExpr>();
                tgt->kind = SynExprKind::Name;
                tgt->pos = head.pos;
                tgt->name = head.text;
                s->call_target = std::move(tgt);
                if (const Token *t = expect(TokenKind::Ident, "method name")) s->method = t->text;
            } else {
                s->method = head.text;
            }
        }
        if (accept(TokenKind::LParen)) {
            parse_args(s->args);
            expect(TokenKind::RParen, "')'");
        }
        return s;
    }

    void parse_args(std::vector<SynExprPtr> &out) {
        if (at(TokenKind::RParen)) return;
        out.push_back(parse_expr());
        while (accept(TokenKind::Comma)) out.push_back(parse_expr());
    }

    // ---- expressions --------------------------------------------------------
    // precedence: or < and < comparison < additive < multiplicative < unary

    SynExprPtr parse_expr() { return parse_or(); }

    SynExprPtr parse_or() {
        SynExprPtr e = parse_and();
        while (at(TokenKind::KwOr)) {
            SourcePos pos = advance().pos;
            e = mk_binary(BinaryOp::Or, pos, std::move(e), parse_and());
        }
        return e;
    }

    SynExprPtr parse_and() {
        SynExprPtr e = parse_cmp();
        while (at(TokenKind::KwAnd)) {
            SourcePos pos = advance().pos;
            e = mk_binary(BinaryOp::And, pos, std::move(e), parse_cmp());
        }
        return e;
    }

    SynExprPtr parse_cmp() {
        SynExprPtr e = parse_add();
        for (;;) {
            BinaryOp op;
            switch (peek().kind) {
            case TokenKind::Lt: op = BinaryOp::Lt; break;
            case TokenKind::Le: op = BinaryOp::Le; break;
            case TokenKind::Eq: op = BinaryOp::Eq; break;
            case TokenKind::Ne: op = BinaryOp::Ne; break;
            default: return e;
            }
            SourcePos pos = advance().pos;
            e = mk_binary(op, pos, std::move(e), parse_add());
        }
    }

    SynExprPtr parse_add() {
        SynExprPtr e = parse_mul();
        for (;;) {
            BinaryOp op;
            switch (peek().kind) {
            case TokenKind::Plus: op = BinaryOp::Add; break;
            case TokenKind::Minus: op = BinaryOp::Sub; break;
            default: return e;
            }
            SourcePos pos = advance().pos;
            e = mk_binary(op, pos, std::move(e), parse_mul());
        }
    }

    SynExprPtr parse_mul() {
        SynExprPtr e = parse_unary();
        for (;;) {
            BinaryOp op;
            switch (peek().kind) {
            case TokenKind::Star: op = BinaryOp::Mul; break;
            case TokenKind::IntDiv: op = BinaryOp::Div; break;
            default: return e;
            }
            SourcePos pos = advance().pos;
            e = mk_binary(op, pos, std::move(e), parse_unary());
        }
    }

    SynExprPtr parse_unary() {
        if (at(TokenKind::Minus) || at(TokenKind::KwNot)) {
            const Token &t = advance();
            auto e = std::make_unique<SynExpr>();
            e->kind = SynExprKind::Unary;
            e->pos = t.pos;
            e->un_op = t.kind == TokenKind::Minus ? UnaryOp::Neg : UnaryOp::Not;
            e->lhs = parse_unary();
            return e;
        }
        return parse_postfix();
    }

    // primary with optional `.name(args)` chains (each link a query call)
    SynExprPtr parse_postfix() {
        SynExprPtr e = parse_primary();
        while (at(TokenKind::Dot)) {
            SourcePos pos = advance().pos;
            auto call = std::make_unique<SynExpr>();
            call->kind = SynExprKind::Call;
            call->pos = pos;
            if (const Token *t = expect(TokenKind::Ident, "query name")) call->name = t->text;
            if (accept(TokenKind::LParen)) {
                parse_args(call->args);
                expect(TokenKind::RParen, "')'");
            }
            call->call_target = std::move(e);
            e = std::move(call);
        }
        return e;
    }

    SynExprPtr parse_primary() {
        const Token &t = peek();
        auto e = std::make_unique<SynExpr>();
        e->pos = t.pos;
        switch (t.kind) {
        case TokenKind::IntLit:
            e->kind = SynExprKind::IntLit;
            try {
                e->int_value = std::stoll(t.text);
            } catch (const std::out_of_range &) {
                error(t.pos, "integer literal out of range: " + t.text);
            }
            advance();
            return e;
        case TokenKind::KwTrue:
        case TokenKind::KwFalse:
            e->kind = SynExprKind::BoolLit;
            e->bool_value = t.kind == TokenKind::KwTrue;
            advance();
            return e;
        case TokenKind::KwVoid:
            e->kind = SynExprKind::VoidLit;
            advance();
            return e;
        case TokenKind::KwCurrent:
            e->kind = SynExprKind::CurrentLit;
            advance();
            return e;
        case TokenKind::Ident: {
            advance();
            if (at(TokenKind::LParen)) {
                e->kind = SynExprKind::Call;
                e->name = t.text;
                advance();
                parse_args(e->args);
                expect(TokenKind::RParen, "')'");
            } else {
                e->kind = SynExprKind::Name;
                e->name = t.text;
            }
            return e;
        }
        case TokenKind::LParen: {
            advance();
            SynExprPtr inner = parse_expr();
            expect(TokenKind::RParen, "')'");
            return inner;
        }
        default:
            error(t.pos, "expected expression, got " + describe(t));
            if (!at(TokenKind::Eof)) advance();
            e->kind = SynExprKind::IntLit;
            return e;
        }
    }

    SynExprPtr mk_binary(BinaryOp op, SourcePos pos, SynExprPtr l, SynExprPtr r) {
        auto e = std::make_unique<SynExpr>();
        e->kind = SynExprKind::Binary;
        e->pos = pos;
        e->bin_op = op;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        return e;
    }
};

// ---- pretty printer ---------------------------------------------------------

struct Printer {
    std::ostringstream out;
    int indent = 0;

    void line() { out << '\n'; }
    void put_indent() {
        for (int i = 0; i < indent; ++i) out << "    ";
    }

    static const char *bin_op_text(BinaryOp op) {
        switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "//";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "/=";
        case BinaryOp::And: return "and";
        case BinaryOp::Or: return "or";
        }
        return "?";
    }

    static int prec(const SynExpr &e) {
        if (e.kind == SynExprKind::Unary) return 5;
        if (e.kind != SynExprKind::Binary) return 6;
        switch (e.bin_op) {
        case BinaryOp::Or: return 0;
        case BinaryOp::And: return 1;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 2;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 3;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 4;
        }
        return 6;
    }

    void expr(const SynExpr &e, int parent_prec = -1) {
        int my = prec(e);
        bool paren = e.kind == SynExprKind::Binary && my <= parent_prec;
        if (paren) out << '(';
        switch (e.kind) {
        case SynExprKind::IntLit: out << e.int_value; break;
        case SynExprKind::BoolLit: out << (e.bool_value ? "true" : "false"); break;
        case SynExprKind::VoidLit: out << "Void"; break;
        case SynExprKind::CurrentLit: out << "Current"; break;
        case SynExprKind::Name: out << e.name; break;
        case SynExprKind::Unary:
            out << (e.un_op == UnaryOp::Neg ? "-" : "not ");
            expr(*e.lhs, my);
            break;
        case SynExprKind::Binary:
            expr(*e.lhs, my - 1); // left-assoc: equal precedence fine on the left
            out << ' ' << bin_op_text(e.bin_op) << ' ';
            expr(*e.rhs, my);
            break;
        case SynExprKind::Call:
            if (e.call_target) {
                expr(*e.call_target, 6);
                out << '.';
            }
            out << e.name;
            args(e.args);
            break;
        }
        if (paren) out << ')';
    }

    void args(const std::vector<SynExprPtr> &as) {
        if (as.empty()) return;
        out << '(';
        for (std::size_t i = 0; i < as.size(); ++i) {
            if (i) out << ", ";
            expr(*as[i]);
        }
        out << ')';
    }

    void type(const DeclaredType &t) {
        if (t.separate) out << "separate ";
        switch (t.base) {
        case BaseType::Integer: out << "INTEGER"; break;
        case BaseType::Boolean: out << "BOOLEAN"; break;
        case BaseType::Reference: out << t.class_name; break;
        }
    }

    void stmt(const Stmt &s) {
        put_indent();
        switch (s.kind) {
        case StmtKind::Create:
            out << "create " << s.target;
            if (s.creation_method) {
                out << '.' << *s.creation_method;
                args(s.args);
            }
            break;
        case StmtKind::Assign:
            out << s.target << " := ";
            expr(*s.expr);
            break;
        case StmtKind::Call:
            if (s.call_target) {
                expr(*s.call_target, 6);
                out << '.';
            }
            out << s.method;
            args(s.args);
            break;
        case StmtKind::If:
            out << "if ";
            expr(*s.expr);
            out << " then";
            line();
            block(s.then_body);
            if (!s.else_body.empty()) {
                put_indent();
                out << "else";
                line();
                block(s.else_body);
            }
            put_indent();
            out << "end";
            break;
        case StmtKind::Loop:
            out << "from";
            line();
            block(s.init_body);
            put_indent();
            out << "until ";
            expr(*s.expr);
            line();
            put_indent();
            out << "loop";
            line();
            block(s.then_body);
            put_indent();
            out << "end";
            break;
        case StmtKind::Print:
            out << "print(" << s.print_text << ')';
            break;
        }
        line();
    }

    void block(const std::vector<StmtPtr> &stmts) {
        ++indent;
        for (const auto &s : stmts) stmt(*s);
        --indent;
    }

    void method(const MethodDecl &m) {
        put_indent();
        out << m.name;
        if (!m.formals.empty()) {
            out << " (";
            for (std::size_t i = 0; i < m.formals.size(); ++i) {
                if (i) out << "; ";
                out << m.formals[i].name << ": ";
                type(m.formals[i].type);
            }
            out << ')';
        }
        if (m.result_type) {
            out << ": ";
            type(*m.result_type);
        }
        line();
        ++indent;
        if (m.require_expr) {
            put_indent();
            out << "require ";
            expr(*m.require_expr);
            line();
        }
        if (!m.locals.empty()) {
            put_indent();
            out << "local";
            line();
            ++indent;
            for (const auto &l : m.locals) {
                put_indent();
                out << l.name << ": ";
                type(l.type);
                line();
            }
            --indent;
        }
        put_indent();
        out << "do";
        line();
        block(m.body);
        if (m.ensure_expr) {
            put_indent();
            out << "ensure ";
            expr(*m.ensure_expr);
            line();
        }
        put_indent();
        out << "end";
        line();
    }

    void cls(const ClassDecl &c) {
        out << "class " << c.name;
        if (c.is_root) out << " root";
        line();
        ++indent;
        for (const auto &a : c.attributes) {
            put_indent();
            out << a.name << ": ";
            type(a.type);
            line();
        }
        if (!c.attributes.empty() && !c.methods.empty()) line();
        for (std::size_t i = 0; i < c.methods.size(); ++i) {
            if (i) line();
            method(c.methods[i]);
        }
        --indent;
        out << "end";
        line();
    }
};

} // namespace

SyntaxTree parse(const std::vector<Token> &tokens, DiagnosticList &diags) {
    Parser p(tokens, diags);
    return p.parse_program();
}

std::string pretty_print(const SyntaxTree &tree) {
    Printer p;
    for (std::size_t i = 0; i < tree.classes.size(); ++i) {
        if (i) p.line();
        p.cls(tree.classes[i]);
    }
    return p.out.str();
}

std::string pretty_print(const SynExpr &expr) {
    Printer p;
    p.expr(expr);
    return p.out.str();
}

} // namespace cscoop
