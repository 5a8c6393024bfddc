#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cscoop/driver.hpp"
#include "cscoop/lexer.hpp"
#include "cscoop/parser.hpp"
#include "support/helpers.hpp"

#include <filesystem>

using namespace cscoop;
using cscoop::test::read_file;

namespace {

std::vector<Token> lex(const std::string &text, DiagnosticList &diags) {
    SourceUnit unit("<t>", text);
    diags.set_path("<t>");
    return tokenize(unit, diags);
}

std::vector<TokenKind> kinds(const std::string &text) {
    DiagnosticList diags;
    std::vector<TokenKind> ks;
    for (const Token &t : lex(text, diags)) ks.push_back(t.kind);
    return ks;
}

CompileResult compile(const std::string &text) { return compile_text(text, "<t>"); }

bool error_mentions(const DiagnosticList &diags, const std::string &needle) {
    for (const Diagnostic &d : diags.all())
        if (d.severity == Severity::Error && d.message.find(needle) != std::string::npos)
            return true;
    return false;
}

// small well-formed program used by several cases below
const char *kCellText = R"(
class CELL
    value: INTEGER

    put (v: INTEGER)
        do
            value := v
        end

    get: INTEGER
        do
            Result := value
        end
end

class APP root
    c: separate CELL

    make
        do
            create c
            talk (c)
        end

    talk (x: separate CELL)
        do
            x.put (1)
        end
end
)";

} // namespace

TEST_CASE("minimal statement tokens") {
    using K = TokenKind;
    auto ks = kinds("x := 1");
    REQUIRE(ks == std::vector<K>{K::Ident, K::Assign, K::IntLit, K::Eof});

    DiagnosticList diags;
    auto toks = lex("x := 1", diags);
    CHECK(toks[0].text == "x");
    CHECK(toks[2].text == "1");
    CHECK(!diags.has_errors());
}

TEST_CASE("comments are stripped") {
    using K = TokenKind;
    CHECK(kinds("-- note\nend") == std::vector<K>{K::KwEnd, K::Eof});
    CHECK(kinds("-- only a comment") == std::vector<K>{K::Eof});
    // a comment marker inside a string is text, not a comment
    DiagnosticList diags;
    auto toks = lex("print (\"a -- b\")", diags);
    REQUIRE(toks.size() == 5); // print ( string ) eof
    CHECK(toks[2].kind == K::StringLit);
    CHECK(toks[2].text == "a -- b");
}

TEST_CASE("operator lexing") {
    using K = TokenKind;
    CHECK(kinds("a // b /= c <= d") ==
          std::vector<K>{K::Ident, K::IntDiv, K::Ident, K::Ne, K::Ident, K::Le, K::Ident,
                         K::Eof});
    CHECK(kinds("x : y := z < w = v") ==
          std::vector<K>{K::Ident, K::Colon, K::Ident, K::Assign, K::Ident, K::Lt, K::Ident,
                         K::Eq, K::Ident, K::Eof});
}

TEST_CASE("keywords vs identifiers") {
    using K = TokenKind;
    CHECK(kinds("classx class Void voidx") ==
          std::vector<K>{K::Ident, K::KwClass, K::KwVoid, K::Ident, K::Eof});
    CHECK(kinds("true false Current Result") ==
          std::vector<K>{K::KwTrue, K::KwFalse, K::KwCurrent, K::Ident, K::Eof});
}

TEST_CASE("lexical error is reported and skipped") {
    DiagnosticList diags;
    auto toks = lex("x := $ 1", diags);
    CHECK(diags.has_errors());
    REQUIRE(!toks.empty());
    CHECK(toks.back().kind == TokenKind::Eof);
    // the surrounding tokens survive
    CHECK(toks[0].kind == TokenKind::Ident);
    CHECK(toks[1].kind == TokenKind::Assign);
    CHECK(toks[2].kind == TokenKind::IntLit);
}

TEST_CASE("positions point at the right line") {
    DiagnosticList diags;
    auto toks = lex("class A\n    x: INTEGER\nend", diags);
    REQUIRE(toks.size() >= 5);
    CHECK(toks[0].pos.line == 1);
    CHECK(toks[2].pos.line == 2); // x
    CHECK(toks[2].pos.column == 5);
    CHECK(toks.back().pos.line == 3);
}

TEST_CASE("parse shapes of a small program") {
    CompileResult res = compile(kCellText);
    REQUIRE(res.ok());
    REQUIRE(res.tree.classes.size() == 2);

    const ClassDecl &cell = res.tree.classes[0];
    CHECK(cell.name == "CELL");
    CHECK(!cell.is_root);
    REQUIRE(cell.attributes.size() == 1);
    CHECK(cell.attributes[0].type.base == BaseType::Integer);
    REQUIRE(cell.methods.size() == 2);
    CHECK(!cell.methods[0].is_query());
    REQUIRE(cell.methods[1].is_query());
    CHECK(cell.methods[1].result_type->base == BaseType::Integer);

    const ClassDecl &app = res.tree.classes[1];
    CHECK(app.is_root);
    CHECK(res.tree.root_class == "APP");
    REQUIRE(app.attributes.size() == 1);
    CHECK(app.attributes[0].type.separate);
    CHECK(app.attributes[0].type.class_name == "CELL");

    const MethodDecl &mk = app.methods[0];
    REQUIRE(mk.body.size() == 2);
    CHECK(mk.body[0]->kind == StmtKind::Create);
    CHECK(mk.body[1]->kind == StmtKind::Call);
}

TEST_CASE("if and loop statement structure") {
    CompileResult res = compile(R"(
class APP root
    x: INTEGER

    make
        local
            i: INTEGER
        do
            if x < 1 then
                x := 1
            else
                x := 2
            end
            from
                i := 0
            until x < i
            loop
                i := i + 1
            end
        end
end
)");
    REQUIRE(res.ok());
    const MethodDecl &mk = res.tree.classes[0].methods[0];
    REQUIRE(mk.locals.size() == 1);
    REQUIRE(mk.body.size() == 2);
    const Stmt &iff = *mk.body[0];
    CHECK(iff.kind == StmtKind::If);
    CHECK(iff.then_body.size() == 1);
    CHECK(iff.else_body.size() == 1);
    const Stmt &lp = *mk.body[1];
    CHECK(lp.kind == StmtKind::Loop);
    CHECK(lp.init_body.size() == 1);
    CHECK(lp.then_body.size() == 1);
    REQUIRE(lp.expr != nullptr);
    CHECK(lp.expr->kind == SynExprKind::Binary);
}

TEST_CASE("expression precedence") {
    CompileResult res = compile(R"(
class APP root
    x: INTEGER
    b: BOOLEAN

    make
        do
            x := 1 + 2 * 3
            b := not b and 1 < x or b
        end
end
)");
    REQUIRE(res.ok());
    const MethodDecl &mk = res.tree.classes[0].methods[0];
    const SynExpr &sum = *mk.body[0]->expr;
    REQUIRE(sum.kind == SynExprKind::Binary);
    CHECK(sum.bin_op == BinaryOp::Add);
    CHECK(sum.lhs->kind == SynExprKind::IntLit);
    REQUIRE(sum.rhs->kind == SynExprKind::Binary);
    CHECK(sum.rhs->bin_op == BinaryOp::Mul);

    // or is the loosest, then and, then not; comparison binds tighter still
    const SynExpr &orr = *mk.body[1]->expr;
    REQUIRE(orr.kind == SynExprKind::Binary);
    CHECK(orr.bin_op == BinaryOp::Or);
    REQUIRE(orr.lhs->kind == SynExprKind::Binary);
    CHECK(orr.lhs->bin_op == BinaryOp::And);
    CHECK(orr.lhs->lhs->kind == SynExprKind::Unary);
    CHECK(orr.lhs->rhs->bin_op == BinaryOp::Lt);
}

TEST_CASE("parenthesized grouping overrides precedence") {
    CompileResult res = compile(R"(
class APP root
    x: INTEGER

    make
        do
            x := (1 + 2) * 3
        end
end
)");
    REQUIRE(res.ok());
    const SynExpr &e = *res.tree.classes[0].methods[0].body[0]->expr;
    REQUIRE(e.kind == SynExprKind::Binary);
    CHECK(e.bin_op == BinaryOp::Mul);
    CHECK(e.lhs->bin_op == BinaryOp::Add);
}

TEST_CASE("pretty-print round trip is a fixpoint") {
    // one of everything: attributes, separate types, contracts, locals,
    // create with and without arguments, if/else, loop, queries, print
    const char *text = R"(
class ITEM
    weight: INTEGER
    tag: BOOLEAN

    make (w: INTEGER)
        do
            weight := w
        end

    heavier_than (limit: INTEGER): BOOLEAN
        do
            Result := limit < weight
        end
end

class APP root
    it: separate ITEM
    plain: ITEM
    total: INTEGER

    make
        local
            i: INTEGER
        do
            create it.make (3)
            create plain.make (1)
            print ("starting")
            from
                i := 0
            until 2 < i
            loop
                weigh (it, i)
                i := i + 1
            end
            if plain.heavier_than (0) and not (total = 0) then
                total := 0 - total
            else
                total := total * 2
            end
        end

    weigh (x: separate ITEM; bonus: INTEGER)
        require
            0 <= bonus
        do
            total := total + bonus
        ensure
            0 <= total
        end
end
)";
    CompileResult first = compile(text);
    REQUIRE(first.ok());
    std::string once = pretty_print(first.tree);

    CompileResult second = compile(once);
    REQUIRE(second.ok());
    std::string twice = pretty_print(second.tree);
    CHECK(once == twice);
}

TEST_CASE("every shipped program parses back from its pretty form") {
    namespace fs = std::filesystem;
    for (const char *dir : {"/benchmarks", "/tests/micro"}) {
        for (const auto &entry : fs::directory_iterator(cscoop::test::source_dir() + dir)) {
            if (entry.path().extension() != ".cscoop") continue;
            INFO(entry.path().string());
            CompileResult res = compile(read_file(entry.path().string()));
            REQUIRE(res.ok());
            CompileResult again = compile(pretty_print(res.tree));
            REQUIRE(again.ok());
            CHECK(pretty_print(res.tree) == pretty_print(again.tree));
        }
    }
}

TEST_CASE("empty input") {
    CompileResult res = compile("");
    CHECK(!res.ok());
    CHECK(error_mentions(res.diags, "no classes"));
}

TEST_CASE("missing end is a parse error") {
    CompileResult res = compile("class A\n    x: INTEGER\n");
    CHECK(!res.ok());
    CHECK(res.diags.has_errors());
}

TEST_CASE("symbol table contents") {
    CompileResult res = compile(kCellText);
    REQUIRE(res.ok());
    const ClassInfo *cell = res.env.find_class("CELL");
    REQUIRE(cell != nullptr);
    CHECK(cell->attr_index.at("value") == 0);
    const MethodSig *get = res.env.find_method("CELL", "get");
    REQUIRE(get != nullptr);
    CHECK(get->is_query());
    const MethodSig *put = res.env.find_method("CELL", "put");
    REQUIRE(put != nullptr);
    CHECK(!put->is_query());
    REQUIRE(put->formals.size() == 1);
    CHECK(res.env.root_class == "APP");
    CHECK(res.env.find_class("NOPE") == nullptr);
}

TEST_CASE("duplicate declarations are rejected") {
    CompileResult res = compile(R"(
class A
    eat
        do
        end

    eat
        do
        end
end

class APP root
    make
        do
        end
end
)");
    CHECK(!res.ok());
    CHECK(error_mentions(res.diags, "duplicate method 'eat'"));

    res = compile(R"(
class A
    x: INTEGER
    x: BOOLEAN
end

class APP root
    make
        do
        end
end
)");
    CHECK(!res.ok());
    CHECK(error_mentions(res.diags, "duplicate attribute 'x'"));

    res = compile(R"(
class A
end

class A
end

class APP root
    make
        do
        end
end
)");
    CHECK(!res.ok());
    CHECK(error_mentions(res.diags, "duplicate class 'A'"));
}

TEST_CASE("unknown type in a declaration") {
    CompileResult res = compile(R"(
class APP root
    z: BAZ

    make
        do
        end
end
)");
    CHECK(!res.ok());
    CHECK(error_mentions(res.diags, "unknown type 'BAZ'"));
}

TEST_CASE("root class needs a parameterless make") {
    CompileResult res = compile("class APP root\nend\n");
    CHECK(!res.ok());
    CHECK(error_mentions(res.diags, "has no 'make'"));
}

TEST_CASE("type errors in expressions") {
    auto bad = [](const std::string &body, const std::string &needle) {
        CompileResult res = compile("class APP root\n    b: BOOLEAN\n    x: INTEGER\n"
                                    "    make\n        do\n            " +
                                    body + "\n        end\nend\n");
        CAPTURE(body);
        CHECK(!res.ok());
        CHECK(error_mentions(res.diags, needle));
    };
    bad("b := 1 + true", "'+' needs");
    bad("x := true", "expected INTEGER");
    bad("b := 1 < true", "'<' needs");
    bad("b := 1 = true", "cannot compare");
    bad("x := 0 - b", "needs");
    bad("b := not x", "'not' needs");
    bad("x := nope", "unknown name 'nope'");
}

TEST_CASE("statement-level check errors") {
    CompileResult res = compile(R"(
class APP root
    make
        do
            Result := 1
        end
end
)");
    CHECK(error_mentions(res.diags, "'Result' outside a query"));

    res = compile(R"(
class APP root
    make
        do
        end

    f (v: INTEGER)
        do
            v := 1
        end
end
)");
    CHECK(error_mentions(res.diags, "cannot assign to formal"));

    res = compile(R"(
class CELL
    get: INTEGER
        do
            Result := 0
        end
end

class APP root
    c: CELL

    make
        do
            create c
            c.get
        end
end
)");
    CHECK(error_mentions(res.diags, "cannot be used as an instruction"));
}

TEST_CASE("argument checking") {
    CompileResult res = compile(R"(
class CELL
    put (v: INTEGER)
        do
        end
end

class APP root
    c: CELL

    make
        do
            create c
            c.put (1, 2)
        end
end
)");
    CHECK(error_mentions(res.diags, "expects 1 argument"));

    res = compile(R"(
class CELL
    put (v: INTEGER)
        do
        end
end

class APP root
    c: CELL

    make
        do
            create c
            c.put (true)
        end
end
)");
    CHECK(error_mentions(res.diags, "argument 1 of 'put'"));
}

TEST_CASE("separate calls must go through a separate formal") {
    CompileResult res = compile(R"(
class W
    ping
        do
        end
end

class APP root
    w: separate W

    make
        do
            create w
            w.ping
        end
end
)");
    CHECK(!res.ok());
    CHECK(error_mentions(res.diags, "separate formal"));
}

TEST_CASE("query purity rules") {
    CompileResult res = compile(R"(
class APP root
    x: INTEGER

    make
        do
        end

    f: INTEGER
        require
            x = 0
        do
            Result := x
        end
end
)");
    CHECK(error_mentions(res.diags, "queries cannot have require clauses"));

    res = compile(R"(
class W
end

class APP root
    make
        do
        end

    f (w: separate W): INTEGER
        do
            Result := 0
        end
end
)");
    CHECK(error_mentions(res.diags, "cannot take separate arguments"));

    res = compile(R"(
class APP root
    x: INTEGER

    make
        do
        end

    f: INTEGER
        do
            x := 1
            Result := x
        end
end
)");
    CHECK(error_mentions(res.diags, "queries cannot modify attributes"));
}

TEST_CASE("separate queries must return a value type") {
    CompileResult res = compile(R"(
class CELL
    self: CELL

    get_ref: CELL
        do
            Result := self
        end
end

class APP root
    c: separate CELL
    p: CELL

    make
        do
            create c
            grab (c)
        end

    grab (x: separate CELL)
        do
            p := x.get_ref
        end
end
)");
    CHECK(!res.ok());
    CHECK(error_mentions(res.diags, "must return INTEGER or BOOLEAN"));
}

TEST_CASE("calls on Void literal are rejected statically") {
    CompileResult res = compile(R"(
class APP root
    make
        do
            Void.f
        end
end
)");
    CHECK(!res.ok());
}

TEST_CASE("uniform access: bare name may resolve to a query") {
    CompileResult res = compile(R"(
class APP root
    x: INTEGER

    make
        do
            x := doubled
        end

    doubled: INTEGER
        do
            Result := x * 2
        end
end
)");
    REQUIRE(res.ok());
    const SynExpr &e = *res.tree.classes[0].methods[0].body[0]->expr;
    CHECK(e.binding == BindingSpace::QueryCall);
}

TEST_CASE("all shipped sources compile clean") {
    namespace fs = std::filesystem;
    std::size_t count = 0;
    for (const char *dir : {"/benchmarks", "/tests/micro"}) {
        for (const auto &entry : fs::directory_iterator(cscoop::test::source_dir() + dir)) {
            if (entry.path().extension() != ".cscoop") continue;
            INFO(entry.path().string());
            CompileResult res = compile_file(entry.path().string());
            CHECK(res.ok());
            ++count;
        }
    }
    CHECK(count >= 20);
}
