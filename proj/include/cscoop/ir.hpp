#pragma once

#include "cscoop/ast.hpp"
#include "cscoop/diagnostics.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cscoop {

// ---------------------------------------------------------------------------
// Lowered expressions. Pure: evaluation never changes a configuration.
// Separate query calls are hoisted into Query actions during lowering, so an
// IrExpr only ever reads frame slots, object state, and (in contract
// positions) the state reachable through locked formals.

enum class VarSpace : std::uint8_t { Local, Formal, ResultVar };

struct VarRef {
    VarSpace space = VarSpace::Local;
    std::uint32_t index = 0;
    std::string name; // diagnostic / export label

    bool operator==(const VarRef &) const = default;
};

enum class IrExprKind : std::uint8_t {
    IntConst,
    BoolConst,
    VoidConst,
    CurrentRef,
    ReadVar,     // frame slot
    ReadAttr,    // attribute of Current
    ReadAttrOf,  // attribute of an evaluated target (contract clauses)
    Unary,
    Binary,
    QueryInline, // query executed in place by the evaluator
};

struct IrExpr;
using IrExprPtr = std::unique_ptr<IrExpr>;

struct IrExpr {
    IrExprKind kind = IrExprKind::IntConst;
    SourcePos pos;

    std::int64_t int_value = 0;
    bool bool_value = false;
    VarRef var;                   // ReadVar
    std::uint32_t attr_index = 0; // ReadAttr / ReadAttrOf
    std::string attr_name;
    UnaryOp un_op = UnaryOp::Neg;
    BinaryOp bin_op = BinaryOp::Add;
    IrExprPtr lhs, rhs;          // Unary uses lhs only
    IrExprPtr target;            // ReadAttrOf / QueryInline
    std::string cls, method;     // QueryInline callee
    std::vector<IrExprPtr> args; // QueryInline
};

IrExprPtr clone_ir_expr(const IrExpr &e);
std::string ir_expr_text(const IrExpr &e);

// Assignment / creation destination: a frame slot or an attribute of Current.
struct Place {
    bool is_attr = false;
    VarRef var;                   // when !is_attr
    std::uint32_t attr_index = 0; // when is_attr
    std::string attr_name;
};

// ---------------------------------------------------------------------------
// Actions: the atomic steps of the transition system. One action fires per
// macro step; everything else is deterministic stabilization.

enum class ActionKind : std::uint8_t {
    Lock,      // acquire all lock_targets at once, when guard holds
    Unlock,    // release what this activation's Lock acquired
    Branch,    // enabled iff cond == expect
    Assign,    // dst := src
    Create,    // fresh object (and processor when separate_create)
    Command,   // asynchronous call on a separate target
    LocalCall, // synchronous call on the own processor
    Query,     // separate query: send request, await result into dst
    PostCheck, // ensure clause; failure flags the configuration
    Noop,      // print and empty bodies
};

struct Action {
    ActionKind kind = ActionKind::Noop;
    SourcePos pos;

    std::vector<IrExprPtr> lock_targets; // Lock
    IrExprPtr guard;                     // Lock (optional)
    IrExprPtr cond;                      // Branch / PostCheck
    bool expect = true;                  // Branch
    Place dst;                           // Assign / Create / Query
    IrExprPtr src;                       // Assign
    std::string cls;                     // Create / Command / LocalCall / Query class
    std::string method;                  // callee ("" for plain create)
    bool separate_create = false;        // Create
    IrExprPtr target;                    // Command / LocalCall / Query
    std::vector<IrExprPtr> args;         // Create / Command / LocalCall / Query
    std::string note;                    // Noop annotation

    std::string label() const; // short text for exports and traces
};

struct ActionEdge {
    int from = 0;
    int to = 0;
    Action action;
};

// ---------------------------------------------------------------------------
// Control-flow graph of one method. Nodes are dense ints; entry is 0; a node
// without outgoing edges is final.

struct IrVarDecl {
    std::string name;
    DeclaredType type;
};

struct MethodGraph {
    std::string class_name;
    std::string method_name;
    bool is_query = false;
    std::optional<DeclaredType> result_type;
    std::vector<IrVarDecl> formals;
    std::vector<IrVarDecl> locals; // user locals first, then compiler temps
    int entry = 0;
    int node_count = 1;
    std::vector<ActionEdge> edges;
    std::map<int, std::vector<std::size_t>> out_edges; // node -> edge indices

    bool is_final(int node) const { return out_edges.find(node) == out_edges.end(); }
    const std::vector<std::size_t> &out(int node) const {
        static const std::vector<std::size_t> none;
        auto it = out_edges.find(node);
        return it == out_edges.end() ? none : it->second;
    }
};

struct AttrLayout {
    std::string name;
    DeclaredType type;
};

struct ClassLayout {
    std::string name;
    std::vector<AttrLayout> attributes;
};

struct Program {
    std::map<std::string, ClassLayout> classes;
    std::map<std::string, std::map<std::string, MethodGraph>> methods; // class -> name -> graph
    std::string root_class;
    bool postcondition_checks = false;

    std::uint64_t fingerprint = 0; // FNV-1a over the canonical serialization

    const MethodGraph *find_method(const std::string &cls, const std::string &name) const {
        auto ci = methods.find(cls);
        if (ci == methods.end()) return nullptr;
        auto mi = ci->second.find(name);
        return mi == ci->second.end() ? nullptr : &mi->second;
    }
    const ClassLayout *find_class(const std::string &cls) const {
        auto it = classes.find(cls);
        return it == classes.end() ? nullptr : &it->second;
    }
};

// ---------------------------------------------------------------------------
// Lowering

struct LowerOptions {
    bool postcondition_checks = false;
};

// Lowers one checked method into its control-flow graph. The method must
// carry checker annotations (bindings, callee classes).
MethodGraph lower_method(const MethodDecl &method, const std::string &class_name,
                         const LowerOptions &options);

// Appends a loop's subgraph (init, exit test, body, back edge) to g starting
// at node `cur`; returns the node control continues from after the loop.
int lower_loop(MethodGraph &g, const Stmt &loop, int cur, const LowerOptions &options);

// Lowers a whole checked tree. The tree must have passed check().
std::shared_ptr<const Program> lower_program(const SyntaxTree &tree, const LowerOptions &options);

// Stable byte serialization of a program; equal programs (same source, same
// options) serialize identically across runs and platforms.
std::string serialize_program(const Program &p);

std::uint64_t fnv1a(const std::string &bytes);

} // namespace cscoop
