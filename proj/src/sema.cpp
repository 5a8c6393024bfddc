#include "cscoop/sema.hpp"

#include <cassert>

namespace cscoop {

namespace {

std::string type_text(const DeclaredType &t) {
    std::string s;
    if (t.separate) s += "separate ";
    switch (t.base) {
    case BaseType::Integer: s += "INTEGER"; break;
    case BaseType::Boolean: s += "BOOLEAN"; break;
    case BaseType::Reference: s += t.class_name; break;
    }
    return s;
}

std::string type_text(const ExprType &t) {
    std::string s;
    if (t.is_void_literal) return "Void";
    if (t.separate) s += "separate ";
    switch (t.base) {
    case BaseType::Integer: s += "INTEGER"; break;
    case BaseType::Boolean: s += "BOOLEAN"; break;
    case BaseType::Reference: s += t.class_name; break;
    }
    return s;
}

ExprType from_declared(const DeclaredType &d) {
    ExprType t;
    t.base = d.base;
    t.class_name = d.class_name;
    t.separate = d.separate;
    return t;
}

} // namespace

// ---------------------------------------------------------------------------
// collect_types

TypeEnv collect_types(const SyntaxTree &tree, DiagnosticList &diags) {
    TypeEnv env;
    env.root_class = tree.root_class;

    for (const ClassDecl &c : tree.classes) {
        if (env.classes.count(c.name)) {
            diags.error(c.pos, "duplicate class '" + c.name + "'");
            continue;
        }
        if (c.name == "INTEGER" || c.name == "BOOLEAN") {
            diags.error(c.pos, "class name '" + c.name + "' collides with a basic type");
            continue;
        }
        ClassInfo info;
        info.name = c.name;
        info.pos = c.pos;
        info.is_root = c.is_root;
        for (const VarDecl &a : c.attributes) {
            if (info.attr_index.count(a.name)) {
                diags.error(a.pos, "duplicate attribute '" + a.name + "' in class " + c.name);
                continue;
            }
            info.attr_index[a.name] = static_cast<std::uint32_t>(info.attributes.size());
            info.attributes.push_back(a);
        }
        for (const MethodDecl &m : c.methods) {
            if (info.methods.count(m.name)) {
                diags.error(m.pos, "duplicate method '" + m.name + "' in class " + c.name);
                continue;
            }
            if (info.attr_index.count(m.name)) {
                diags.error(m.pos,
                            "method '" + m.name + "' collides with an attribute of class " + c.name);
                continue;
            }
            MethodSig sig;
            sig.name = m.name;
            sig.pos = m.pos;
            sig.formals = m.formals;
            sig.result_type = m.result_type;
            info.methods[m.name] = std::move(sig);
        }
        env.classes[c.name] = std::move(info);
    }

    // second pass: every named class type must exist
    auto check_type = [&](const DeclaredType &t, SourcePos pos) {
        if (t.is_reference() && !env.classes.count(t.class_name))
            diags.error(pos, "unknown type '" + t.class_name + "'");
    };
    for (const ClassDecl &c : tree.classes) {
        for (const VarDecl &a : c.attributes) check_type(a.type, a.pos);
        for (const MethodDecl &m : c.methods) {
            for (const VarDecl &f : m.formals) check_type(f.type, f.pos);
            for (const VarDecl &l : m.locals) check_type(l.type, l.pos);
            if (m.result_type) check_type(*m.result_type, m.pos);
        }
    }

    if (!env.root_class.empty()) {
        const ClassInfo *root = env.find_class(env.root_class);
        if (root) {
            auto it = root->methods.find("make");
            if (it == root->methods.end())
                diags.error(root->pos, "root class " + env.root_class + " has no 'make' procedure");
            else if (it->second.is_query() || !it->second.formals.empty())
                diags.error(it->second.pos,
                            "root creation procedure 'make' must be a command without arguments");
        }
    }
    return env;
}

// ---------------------------------------------------------------------------
// check

namespace {

class Checker {
public:
    Checker(const TypeEnv &env, DiagnosticList &diags) : env_(env), diags_(diags) {}

    void run(SyntaxTree &tree) {
        for (ClassDecl &c : tree.classes) {
            cls_ = env_.find_class(c.name);
            if (!cls_) continue; // duplicate class; already reported
            for (MethodDecl &m : c.methods) check_method(m);
        }
    }

private:
    const TypeEnv &env_;
    DiagnosticList &diags_;
    const ClassInfo *cls_ = nullptr;
    MethodDecl *method_ = nullptr;
    bool in_require_ = false;
    bool in_ensure_ = false;

    void error(SourcePos pos, std::string msg) { diags_.error(pos, std::move(msg)); }

    // --- scope lookups ---

    const VarDecl *find_local(const std::string &n, std::uint32_t &idx) const {
        for (std::size_t i = 0; i < method_->locals.size(); ++i)
            if (method_->locals[i].name == n) {
                idx = static_cast<std::uint32_t>(i);
                return &method_->locals[i];
            }
        return nullptr;
    }
    const VarDecl *find_formal(const std::string &n, std::uint32_t &idx) const {
        for (std::size_t i = 0; i < method_->formals.size(); ++i)
            if (method_->formals[i].name == n) {
                idx = static_cast<std::uint32_t>(i);
                return &method_->formals[i];
            }
        return nullptr;
    }
    const VarDecl *find_attr(const std::string &n, std::uint32_t &idx) const {
        auto it = cls_->attr_index.find(n);
        if (it == cls_->attr_index.end()) return nullptr;
        idx = it->second;
        return &cls_->attributes[idx];
    }

    bool in_query() const { return method_->is_query(); }

    // --- method ---

    void check_method(MethodDecl &m) {
        method_ = &m;
        for (std::size_t i = 0; i < m.formals.size(); ++i)
            for (std::size_t j = i + 1; j < m.formals.size(); ++j)
                if (m.formals[i].name == m.formals[j].name)
                    error(m.formals[j].pos, "duplicate formal '" + m.formals[j].name + "'");
        for (std::size_t i = 0; i < m.locals.size(); ++i) {
            for (std::size_t j = i + 1; j < m.locals.size(); ++j)
                if (m.locals[i].name == m.locals[j].name)
                    error(m.locals[j].pos, "duplicate local '" + m.locals[j].name + "'");
            std::uint32_t idx;
            if (find_formal(m.locals[i].name, idx))
                error(m.locals[i].pos,
                      "local '" + m.locals[i].name + "' conflicts with a formal argument");
            if (m.locals[i].name == "Result")
                error(m.locals[i].pos, "'Result' cannot be declared");
        }
        for (const VarDecl &f : m.formals)
            if (f.name == "Result") error(f.pos, "'Result' cannot be declared");

        if (m.is_query()) {
            for (const VarDecl &f : m.formals)
                if (f.type.separate)
                    error(f.pos, "query '" + m.name + "' cannot take separate arguments");
            if (m.require_expr)
                error(m.require_expr->pos, "queries cannot have require clauses");
        }

        if (m.require_expr) {
            in_require_ = true;
            ExprType t = check_expr(*m.require_expr);
            require_bool(t, m.require_expr->pos, "require clause");
            in_require_ = false;
        }
        check_stmts(m.body);
        if (m.ensure_expr) {
            in_ensure_ = true;
            ExprType t = check_expr(*m.ensure_expr);
            require_bool(t, m.ensure_expr->pos, "ensure clause");
            in_ensure_ = false;
        }
        method_ = nullptr;
    }

    void require_bool(const ExprType &t, SourcePos pos, const char *what) {
        if (t.base != BaseType::Boolean || t.is_void_literal)
            error(pos, std::string(what) + " must be BOOLEAN, got " + type_text(t));
    }

    // --- statements ---

    void check_stmts(std::vector<StmtPtr> &stmts) {
        for (StmtPtr &s : stmts) check_stmt(*s);
    }

    void check_stmt(Stmt &s) {
        switch (s.kind) {
        case StmtKind::Create: check_create(s); break;
        case StmtKind::Assign: check_assign(s); break;
        case StmtKind::Call: check_call_stmt(s); break;
        case StmtKind::If: {
            ExprType t = check_expr(*s.expr);
            require_bool(t, s.expr->pos, "if condition");
            check_stmts(s.then_body);
            check_stmts(s.else_body);
            break;
        }
        case StmtKind::Loop: {
            check_stmts(s.init_body);
            ExprType t = check_expr(*s.expr);
            require_bool(t, s.expr->pos, "until condition");
            check_stmts(s.then_body);
            break;
        }
        case StmtKind::Print:
            break;
        }
    }

    // resolves a create/assign target name; returns its declared type
    const DeclaredType *resolve_target(Stmt &s, const std::string &name, bool allow_attr) {
        std::uint32_t idx;
        if (name == "Result") {
            if (!in_query()) {
                error(s.pos, "'Result' outside a query");
                return nullptr;
            }
            s.target_binding = BindingSpace::ResultVar;
            s.target_index = 0;
            return &*method_->result_type;
        }
        if (const VarDecl *l = find_local(name, idx)) {
            s.target_binding = BindingSpace::Local;
            s.target_index = idx;
            return &l->type;
        }
        if (find_formal(name, idx)) {
            error(s.pos, "cannot assign to formal argument '" + name + "'");
            return nullptr;
        }
        if (const VarDecl *a = find_attr(name, idx)) {
            if (!allow_attr) {
                error(s.pos, "queries cannot modify attributes");
                return nullptr;
            }
            s.target_binding = BindingSpace::Attribute;
            s.target_index = idx;
            return &a->type;
        }
        error(s.pos, "unknown variable '" + name + "'");
        return nullptr;
    }

    void check_create(Stmt &s) {
        if (in_query()) {
            error(s.pos, "queries cannot create objects");
            return;
        }
        const DeclaredType *ty = resolve_target(s, s.target, /*allow_attr=*/true);
        if (!ty) return;
        if (!ty->is_reference()) {
            error(s.pos, "create target '" + s.target + "' must have a class type");
            return;
        }
        const ClassInfo *target_cls = env_.find_class(ty->class_name);
        if (!target_cls) return; // unknown type; reported by collect_types
        s.callee_class = ty->class_name;
        s.call_is_separate = ty->separate;

        if (s.creation_method) {
            auto it = target_cls->methods.find(*s.creation_method);
            if (it == target_cls->methods.end()) {
                error(s.pos, "class " + ty->class_name + " has no procedure '" +
                                 *s.creation_method + "'");
                return;
            }
            const MethodSig &sig = it->second;
            if (sig.is_query()) {
                error(s.pos, "creation procedure '" + sig.name + "' must be a command");
                return;
            }
            check_actuals(s.args, sig, s.pos, ty->separate, sig.name);
        }
    }

    void check_assign(Stmt &s) {
        const DeclaredType *ty = resolve_target(s, s.target, /*allow_attr=*/!in_query());
        ExprType rhs = check_expr(*s.expr);
        if (!ty) return;
        check_compatible(*ty, rhs, s.expr->pos, "assignment to '" + s.target + "'");
    }

    // actual-to-formal compatibility shared by calls and creation calls.
    // remote: the receiving object lives on another processor, so every
    // reference it gets is foreign to it and the formal must say so.
    void check_actuals(std::vector<SynExprPtr> &args, const MethodSig &sig, SourcePos pos,
                       bool remote, const std::string &name) {
        if (args.size() != sig.formals.size()) {
            error(pos, "'" + name + "' expects " + std::to_string(sig.formals.size()) +
                           " argument(s), got " + std::to_string(args.size()));
            // still check the ones we have, without formal pairing
            for (auto &a : args) check_expr(*a);
            return;
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            ExprType at = check_expr(*args[i]);
            const DeclaredType &ft = sig.formals[i].type;
            check_compatible(ft, at, args[i]->pos,
                             "argument " + std::to_string(i + 1) + " of '" + name + "'");
            if (remote && at.base == BaseType::Reference && !at.is_void_literal &&
                !ft.separate)
                error(args[i]->pos, "argument " + std::to_string(i + 1) + " of '" + name +
                                        "' crosses processors; formal '" +
                                        sig.formals[i].name + "' must be separate");
        }
    }

    void check_compatible(const DeclaredType &want, const ExprType &got, SourcePos pos,
                          const std::string &what) {
        if (got.is_void_literal) {
            if (!want.is_reference()) error(pos, what + ": Void needs a class type");
            return;
        }
        if (want.base != got.base) {
            error(pos, what + ": expected " + type_text(want) + ", got " + type_text(got));
            return;
        }
        if (want.is_reference()) {
            if (want.class_name != got.class_name)
                error(pos, what + ": expected " + type_text(want) + ", got " + type_text(got));
            else if (got.separate && !want.separate)
                error(pos, what + ": separate " + got.class_name +
                               " cannot be treated as non-separate");
        }
    }

    void check_call_stmt(Stmt &s) {
        const ClassInfo *target_cls = cls_;
        bool remote = false;
        if (s.call_target) {
            ExprType tt = check_expr(*s.call_target);
            if (tt.is_void_literal) {
                error(s.call_target->pos, "cannot call '" + s.method + "' on Void");
                return;
            }
            if (tt.base != BaseType::Reference) {
                error(s.call_target->pos,
                      "call target must have a class type, got " + type_text(tt));
                return;
            }
            target_cls = env_.find_class(tt.class_name);
            if (!target_cls) return;
            remote = tt.separate;
            if (remote) require_controlled(*s.call_target);
        }
        s.call_is_separate = remote;
        s.callee_class = target_cls->name;

        auto it = target_cls->methods.find(s.method);
        if (it == target_cls->methods.end()) {
            error(s.pos, "class " + target_cls->name + " has no method '" + s.method + "'");
            return;
        }
        const MethodSig &sig = it->second;
        if (sig.is_query()) {
            s.callee_is_query = true;
            error(s.pos, "query '" + s.method + "' cannot be used as an instruction");
            return;
        }
        if (in_query()) {
            error(s.pos, "queries cannot call commands");
            return;
        }
        check_actuals(s.args, sig, s.pos, remote, s.method);
    }

    // A separate target must be locked for the call to be sound; locks are
    // taken per method activation over its separate formals, so the target
    // has to be one of them.
    void require_controlled(const SynExpr &target) {
        if (target.kind == SynExprKind::Name && target.binding == BindingSpace::Formal) {
            std::uint32_t idx = target.binding_index;
            if (method_->formals[idx].type.separate) return;
        }
        error(target.pos, "separate target must be a separate formal argument of the "
                          "enclosing method");
    }

    // --- expressions ---

    ExprType check_expr(SynExpr &e) {
        switch (e.kind) {
        case SynExprKind::IntLit: {
            ExprType t;
            t.base = BaseType::Integer;
            e.type = t;
            return t;
        }
        case SynExprKind::BoolLit: {
            ExprType t;
            t.base = BaseType::Boolean;
            e.type = t;
            return t;
        }
        case SynExprKind::VoidLit: {
            ExprType t;
            t.base = BaseType::Reference;
            t.is_void_literal = true;
            e.type = t;
            return t;
        }
        case SynExprKind::CurrentLit: {
            ExprType t;
            t.base = BaseType::Reference;
            t.class_name = cls_->name;
            e.type = t;
            return t;
        }
        case SynExprKind::Name: return check_name(e);
        case SynExprKind::Unary: return check_unary(e);
        case SynExprKind::Binary: return check_binary(e);
        case SynExprKind::Call: return check_call_expr(e);
        }
        return {};
    }

    ExprType check_name(SynExpr &e) {
        std::uint32_t idx;
        if (e.name == "Result") {
            if (!in_query()) {
                error(e.pos, "'Result' outside a query");
                return {};
            }
            e.binding = BindingSpace::ResultVar;
            e.type = from_declared(*method_->result_type);
            return e.type;
        }
        if (const VarDecl *l = find_local(e.name, idx)) {
            if (in_require_) {
                error(e.pos, "local '" + e.name + "' is not in scope in a require clause");
                return {};
            }
            e.binding = BindingSpace::Local;
            e.binding_index = idx;
            e.type = from_declared(l->type);
            return e.type;
        }
        if (const VarDecl *f = find_formal(e.name, idx)) {
            e.binding = BindingSpace::Formal;
            e.binding_index = idx;
            e.type = from_declared(f->type);
            return e.type;
        }
        if (const VarDecl *a = find_attr(e.name, idx)) {
            e.binding = BindingSpace::Attribute;
            e.binding_index = idx;
            e.type = from_declared(a->type);
            return e.type;
        }
        // uniform access: a parameterless query of the own class
        auto it = cls_->methods.find(e.name);
        if (it != cls_->methods.end() && it->second.is_query() && it->second.formals.empty()) {
            e.binding = BindingSpace::QueryCall;
            e.callee_class = cls_->name;
            e.type = from_declared(*it->second.result_type);
            return e.type;
        }
        error(e.pos, "unknown name '" + e.name + "'");
        return {};
    }

    ExprType check_unary(SynExpr &e) {
        ExprType t = check_expr(*e.lhs);
        ExprType r;
        if (e.un_op == UnaryOp::Neg) {
            if (t.base != BaseType::Integer || t.is_void_literal)
                error(e.pos, "'-' needs an INTEGER operand, got " + type_text(t));
            r.base = BaseType::Integer;
        } else {
            if (t.base != BaseType::Boolean || t.is_void_literal)
                error(e.pos, "'not' needs a BOOLEAN operand, got " + type_text(t));
            r.base = BaseType::Boolean;
        }
        e.type = r;
        return r;
    }

    ExprType check_binary(SynExpr &e) {
        ExprType lt = check_expr(*e.lhs);
        ExprType rt = check_expr(*e.rhs);
        ExprType r;
        auto both = [&](BaseType want, const char *op) {
            bool ok = lt.base == want && rt.base == want && !lt.is_void_literal &&
                      !rt.is_void_literal;
            if (!ok)
                error(e.pos, std::string("'") + op + "' needs " +
                                 (want == BaseType::Integer ? "INTEGER" : "BOOLEAN") +
                                 " operands, got " + type_text(lt) + " and " + type_text(rt));
        };
        switch (e.bin_op) {
        case BinaryOp::Add: both(BaseType::Integer, "+"); r.base = BaseType::Integer; break;
        case BinaryOp::Sub: both(BaseType::Integer, "-"); r.base = BaseType::Integer; break;
        case BinaryOp::Mul: both(BaseType::Integer, "*"); r.base = BaseType::Integer; break;
        case BinaryOp::Div: both(BaseType::Integer, "//"); r.base = BaseType::Integer; break;
        case BinaryOp::Lt: both(BaseType::Integer, "<"); r.base = BaseType::Boolean; break;
        case BinaryOp::Le: both(BaseType::Integer, "<="); r.base = BaseType::Boolean; break;
        case BinaryOp::And: both(BaseType::Boolean, "and"); r.base = BaseType::Boolean; break;
        case BinaryOp::Or: both(BaseType::Boolean, "or"); r.base = BaseType::Boolean; break;
        case BinaryOp::Eq:
        case BinaryOp::Ne: {
            const char *op = e.bin_op == BinaryOp::Eq ? "=" : "/=";
            bool lref = lt.base == BaseType::Reference;
            bool rref = rt.base == BaseType::Reference;
            if (lref != rref)
                error(e.pos, std::string("'") + op + "' cannot compare " + type_text(lt) +
                                 " with " + type_text(rt));
            else if (!lref && lt.base != rt.base)
                error(e.pos, std::string("'") + op + "' cannot compare " + type_text(lt) +
                                 " with " + type_text(rt));
            else if (lref && rref && !lt.is_void_literal && !rt.is_void_literal &&
                     lt.class_name != rt.class_name)
                error(e.pos, std::string("'") + op + "' cannot compare " + type_text(lt) +
                                 " with " + type_text(rt));
            r.base = BaseType::Boolean;
            break;
        }
        }
        e.type = r;
        return r;
    }

    ExprType check_call_expr(SynExpr &e) {
        const ClassInfo *target_cls = cls_;
        bool remote = false;
        if (e.call_target) {
            ExprType tt = check_expr(*e.call_target);
            if (tt.is_void_literal) {
                error(e.call_target->pos, "cannot call '" + e.name + "' on Void");
                return {};
            }
            if (tt.base != BaseType::Reference) {
                error(e.call_target->pos,
                      "call target must have a class type, got " + type_text(tt));
                return {};
            }
            target_cls = env_.find_class(tt.class_name);
            if (!target_cls) return {};
            remote = tt.separate;
            if (remote) {
                if (in_query()) {
                    error(e.pos, "queries cannot access separate objects");
                    return {};
                }
                require_controlled(*e.call_target);
            }
        }
        e.call_is_separate = remote;
        e.callee_class = target_cls->name;

        // qualified parameterless access may be an attribute read; only
        // contracts evaluate with the target's state at hand
        if (e.call_target && e.args.empty()) {
            auto ait = target_cls->attr_index.find(e.name);
            if (ait != target_cls->attr_index.end()) {
                const VarDecl &attr = target_cls->attributes[ait->second];
                if (!in_require_ && !in_ensure_) {
                    error(e.pos, "attribute '" + e.name +
                                     "' can only be read through a query here");
                    return {};
                }
                if (attr.type.is_reference()) {
                    error(e.pos, "contract clauses can only read INTEGER or BOOLEAN "
                                 "attributes of other objects");
                    return {};
                }
                e.binding = BindingSpace::Attribute;
                e.binding_index = ait->second;
                e.type = from_declared(attr.type);
                return e.type;
            }
        }

        auto it = target_cls->methods.find(e.name);
        if (it == target_cls->methods.end()) {
            error(e.pos, "class " + target_cls->name + " has no query '" + e.name + "'");
            return {};
        }
        const MethodSig &sig = it->second;
        if (!sig.is_query()) {
            error(e.pos, "command '" + e.name + "' cannot be used in an expression");
            return {};
        }
        if (remote && sig.result_type->is_reference()) {
            error(e.pos, "query '" + e.name +
                             "' on a separate target must return INTEGER or BOOLEAN");
            return {};
        }
        e.binding = BindingSpace::QueryCall;
        check_actuals(e.args, sig, e.pos, remote, e.name);
        e.type = from_declared(*sig.result_type);
        if (remote) e.type.separate = false; // value results only
        return e.type;
    }
};

} // namespace

bool check(SyntaxTree &tree, const TypeEnv &env, DiagnosticList &diags) {
    std::size_t before = diags.error_count();
    Checker chk(env, diags);
    chk.run(tree);
    return diags.error_count() == before;
}

} // namespace cscoop
