#pragma once

#include "cscoop/ast.hpp"
#include "cscoop/diagnostics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cscoop {

struct MethodSig {
    std::string name;
    SourcePos pos;
    std::vector<VarDecl> formals;
    std::optional<DeclaredType> result_type;

    bool is_query() const { return result_type.has_value(); }
};

struct ClassInfo {
    std::string name;
    SourcePos pos;
    bool is_root = false;
    std::vector<VarDecl> attributes;           // declaration order = object layout
    std::map<std::string, std::uint32_t> attr_index;
    std::map<std::string, MethodSig> methods;
};

// Symbol table for a whole program. Keyed maps keep lookups and iteration
// independent of declaration order.
struct TypeEnv {
    std::map<std::string, ClassInfo> classes;
    std::string root_class;

    const ClassInfo *find_class(const std::string &name) const {
        auto it = classes.find(name);
        return it == classes.end() ? nullptr : &it->second;
    }
    const MethodSig *find_method(const std::string &cls, const std::string &method) const {
        const ClassInfo *c = find_class(cls);
        if (!c) return nullptr;
        auto it = c->methods.find(method);
        return it == c->methods.end() ? nullptr : &it->second;
    }
};

// Builds the symbol table: class/feature tables, duplicate and unknown-type
// detection. Usable even with errors (entries for valid parts exist).
TypeEnv collect_types(const SyntaxTree &tree, DiagnosticList &diags);

// Type-checks the tree against env and annotates it in place (bindings,
// static types, call classification). Returns true when no errors were added.
bool check(SyntaxTree &tree, const TypeEnv &env, DiagnosticList &diags);

} // namespace cscoop
