#pragma once

#include "cscoop/diagnostics.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cscoop {

// ---------------------------------------------------------------------------
// Declared types

enum class BaseType : std::uint8_t { Integer, Boolean, Reference };

struct DeclaredType {
    BaseType base = BaseType::Integer;
    std::string class_name; // set iff base == Reference
    bool separate = false;  // class types only

    bool is_reference() const { return base == BaseType::Reference; }
    bool operator==(const DeclaredType &) const = default;
};

// ---------------------------------------------------------------------------
// Expressions
//
// Expressions are parsed untyped; `check` fills in the annotation fields
// (static type, resolved bindings, call classification).

enum class UnaryOp : std::uint8_t { Neg, Not };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Lt, Le, Eq, Ne, And, Or };

// Where a name resolved. Filled in by the checker.
enum class BindingSpace : std::uint8_t {
    Unresolved,
    Local,
    Formal,
    Attribute,
    ResultVar,   // the implicit query result variable
    QueryCall,   // uniform access: bare name that names a query of the own class
};

struct ExprType {
    BaseType base = BaseType::Integer;
    std::string class_name;
    bool separate = false;
    bool is_void_literal = false; // the type of the `Void` expression
};

struct SynExpr;
using SynExprPtr = std::unique_ptr<SynExpr>;

enum class SynExprKind : std::uint8_t {
    IntLit,
    BoolLit,
    VoidLit,
    CurrentLit,
    Name,     // identifier; binding resolved by check
    Unary,
    Binary,
    Call,     // target.method(args) or method(args); queries only in expressions
};

struct SynExpr {
    SynExprKind kind = SynExprKind::IntLit;
    SourcePos pos;

    std::int64_t int_value = 0; // IntLit
    bool bool_value = false;    // BoolLit
    std::string name;           // Name: identifier; Call: method name
    UnaryOp un_op = UnaryOp::Neg;
    BinaryOp bin_op = BinaryOp::Add;
    SynExprPtr lhs, rhs;        // Unary uses lhs only
    SynExprPtr call_target;     // Call: null means unqualified (Current)
    std::vector<SynExprPtr> args;

    // --- checker annotations ---
    ExprType type;
    BindingSpace binding = BindingSpace::Unresolved;
    std::uint32_t binding_index = 0;   // index within locals/formals/attributes
    std::string callee_class;          // Call / QueryCall binding: resolved class
    bool call_is_separate = false;     // Call: target statically separate
};

SynExprPtr clone_expr(const SynExpr &e);

// ---------------------------------------------------------------------------
// Statements

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class StmtKind : std::uint8_t { Create, Assign, Call, If, Loop, Print };

struct Stmt {
    StmtKind kind = StmtKind::Call;
    SourcePos pos;

    // Create: target name, optional creation call
    // Assign: target name := expr
    std::string target;
    std::optional<std::string> creation_method;
    SynExprPtr expr; // Assign rhs / If condition / Loop until-condition
    std::vector<SynExprPtr> args; // Create / Call arguments

    // Call: optional qualified target expression (null = Current), method name
    SynExprPtr call_target;
    std::string method;

    std::vector<StmtPtr> then_body; // If then / Loop body
    std::vector<StmtPtr> else_body; // If else
    std::vector<StmtPtr> init_body; // Loop from-part

    std::string print_text; // Print: raw argument text, kept as annotation

    // --- checker annotations ---
    BindingSpace target_binding = BindingSpace::Unresolved; // Create/Assign target
    std::uint32_t target_index = 0;
    std::string callee_class;      // Create/Call resolved class
    bool call_is_separate = false; // Call: target statically separate
    bool callee_is_query = false;  // Call statement on a query is an error; kept for messages
};

// ---------------------------------------------------------------------------
// Declarations

struct VarDecl {
    std::string name;
    DeclaredType type;
    SourcePos pos;
};

struct MethodDecl {
    std::string name;
    SourcePos pos;
    std::vector<VarDecl> formals;
    std::vector<VarDecl> locals;
    std::optional<DeclaredType> result_type; // present iff query
    SynExprPtr require_expr;
    SynExprPtr ensure_expr;
    std::vector<StmtPtr> body;

    bool is_query() const { return result_type.has_value(); }
};

struct ClassDecl {
    std::string name;
    SourcePos pos;
    bool is_root = false;
    std::vector<VarDecl> attributes;
    std::vector<MethodDecl> methods;
};

struct SyntaxTree {
    std::vector<ClassDecl> classes;
    std::string root_class;
};

} // namespace cscoop
