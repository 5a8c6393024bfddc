#include "cscoop/ir.hpp"

#include <cassert>
#include <sstream>

namespace cscoop {

// ---------------------------------------------------------------------------
// IrExpr helpers

IrExprPtr clone_ir_expr(const IrExpr &e) {
    auto c = std::make_unique<IrExpr>();
    c->kind = e.kind;
    c->pos = e.pos;
    c->int_value = e.int_value;
    c->bool_value = e.bool_value;
    c->var = e.var;
    c->attr_index = e.attr_index;
    c->attr_name = e.attr_name;
    c->un_op = e.un_op;
    c->bin_op = e.bin_op;
    if (e.lhs) c->lhs = clone_ir_expr(*e.lhs);
    if (e.rhs) c->rhs = clone_ir_expr(*e.rhs);
    if (e.target) c->target = clone_ir_expr(*e.target);
    c->cls = e.cls;
    c->method = e.method;
    for (const auto &a : e.args) c->args.push_back(clone_ir_expr(*a));
    return c;
}

namespace {

const char *bin_op_text(BinaryOp op) {
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

void expr_text(const IrExpr &e, std::ostringstream &out) {
    switch (e.kind) {
    case IrExprKind::IntConst: out << e.int_value; break;
    case IrExprKind::BoolConst: out << (e.bool_value ? "true" : "false"); break;
    case IrExprKind::VoidConst: out << "Void"; break;
    case IrExprKind::CurrentRef: out << "Current"; break;
    case IrExprKind::ReadVar: out << e.var.name; break;
    case IrExprKind::ReadAttr: out << e.attr_name; break;
    case IrExprKind::ReadAttrOf:
        expr_text(*e.target, out);
        out << '.' << e.attr_name;
        break;
    case IrExprKind::Unary:
        out << (e.un_op == UnaryOp::Neg ? "-" : "not ");
        out << '(';
        expr_text(*e.lhs, out);
        out << ')';
        break;
    case IrExprKind::Binary:
        out << '(';
        expr_text(*e.lhs, out);
        out << ' ' << bin_op_text(e.bin_op) << ' ';
        expr_text(*e.rhs, out);
        out << ')';
        break;
    case IrExprKind::QueryInline:
        expr_text(*e.target, out);
        out << '.' << e.method;
        if (!e.args.empty()) {
            out << '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out << ", ";
                expr_text(*e.args[i], out);
            }
            out << ')';
        }
        break;
    }
}

std::string place_text(const Place &p) {
    return p.is_attr ? p.attr_name : p.var.name;
}

} // namespace

std::string ir_expr_text(const IrExpr &e) {
    std::ostringstream out;
    expr_text(e, out);
    return out.str();
}

std::string Action::label() const {
    std::ostringstream out;
    auto arg_list = [&](const std::vector<IrExprPtr> &as) {
        out << '(';
        for (std::size_t i = 0; i < as.size(); ++i) {
            if (i) out << ", ";
            expr_text(*as[i], out);
        }
        out << ')';
    };
    switch (kind) {
    case ActionKind::Lock:
        out << "lock";
        arg_list(lock_targets);
        if (guard) {
            out << " when ";
            expr_text(*guard, out);
        }
        break;
    case ActionKind::Unlock:
        out << "unlock";
        break;
    case ActionKind::Branch:
        out << (expect ? "when " : "unless ");
        expr_text(*cond, out);
        break;
    case ActionKind::Assign:
        out << place_text(dst) << " := ";
        expr_text(*src, out);
        break;
    case ActionKind::Create:
        out << "create " << place_text(dst) << ": " << (separate_create ? "separate " : "")
            << cls;
        if (!method.empty()) {
            out << '.' << method;
            arg_list(args);
        }
        break;
    case ActionKind::Command:
        out << "call ";
        expr_text(*target, out);
        out << '.' << method;
        arg_list(args);
        break;
    case ActionKind::LocalCall:
        out << "local ";
        expr_text(*target, out);
        out << '.' << method;
        arg_list(args);
        break;
    case ActionKind::Query:
        out << "query " << place_text(dst) << " := ";
        expr_text(*target, out);
        out << '.' << method;
        arg_list(args);
        break;
    case ActionKind::PostCheck:
        out << "ensure ";
        expr_text(*cond, out);
        break;
    case ActionKind::Noop:
        out << "skip";
        if (!note.empty()) out << " [" << note << "]";
        break;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Lowering

namespace {

class Lowerer {
public:
    Lowerer(const std::string &class_name, const MethodDecl &m, const LowerOptions &opt)
        : method_(m), opt_(opt) {
        g_.class_name = class_name;
        g_.method_name = m.name;
        g_.is_query = m.is_query();
        g_.result_type = m.result_type;
        for (const VarDecl &f : m.formals) g_.formals.push_back({f.name, f.type});
        for (const VarDecl &l : m.locals) g_.locals.push_back({l.name, l.type});
    }

    MethodGraph build() {
        int cur = g_.entry;

        std::vector<std::size_t> sep_formals;
        for (std::size_t i = 0; i < method_.formals.size(); ++i)
            if (method_.formals[i].type.separate) sep_formals.push_back(i);

        bool emit_lock = !sep_formals.empty() || method_.require_expr != nullptr;
        if (emit_lock) {
            Action a;
            a.kind = ActionKind::Lock;
            a.pos = method_.pos;
            for (std::size_t i : sep_formals) {
                auto t = std::make_unique<IrExpr>();
                t->kind = IrExprKind::ReadVar;
                t->pos = method_.formals[i].pos;
                t->var = {VarSpace::Formal, static_cast<std::uint32_t>(i),
                          method_.formals[i].name};
                a.lock_targets.push_back(std::move(t));
            }
            if (method_.require_expr) a.guard = lower_atomic(*method_.require_expr);
            cur = emit(cur, std::move(a));
        }

        for (const StmtPtr &s : method_.body) cur = lower_stmt(*s, cur);

        if (method_.ensure_expr && opt_.postcondition_checks) {
            Action a;
            a.kind = ActionKind::PostCheck;
            a.pos = method_.ensure_expr->pos;
            a.cond = lower_atomic(*method_.ensure_expr);
            cur = emit(cur, std::move(a));
        }
        if (!sep_formals.empty()) {
            Action a;
            a.kind = ActionKind::Unlock;
            a.pos = method_.pos;
            cur = emit(cur, std::move(a));
        }
        if (g_.edges.empty()) {
            Action a;
            a.kind = ActionKind::Noop;
            a.pos = method_.pos;
            a.note = "empty";
            emit(cur, std::move(a));
        }
        return std::move(g_);
    }

    // exposed for lower_loop()
    Lowerer(MethodGraph &&g, const MethodDecl &m, const LowerOptions &opt)
        : method_(m), opt_(opt), g_(std::move(g)) {}
    MethodGraph take() { return std::move(g_); }

    int lower_stmt(const Stmt &s, int cur) {
        switch (s.kind) {
        case StmtKind::Create: return lower_create(s, cur);
        case StmtKind::Assign: return lower_assign(s, cur);
        case StmtKind::Call: return lower_call(s, cur);
        case StmtKind::If: return lower_if(s, cur);
        case StmtKind::Loop: return lower_loop_stmt(s, cur);
        case StmtKind::Print: {
            Action a;
            a.kind = ActionKind::Noop;
            a.pos = s.pos;
            a.note = "print(" + s.print_text + ")";
            return emit(cur, std::move(a));
        }
        }
        return cur;
    }

    int lower_loop_stmt(const Stmt &s, int cur) {
        for (const StmtPtr &st : s.init_body) cur = lower_stmt(*st, cur);
        int header = cur;
        int ccur = header;
        IrExprPtr cond = lower_expr(*s.expr, ccur);

        int exit_node = alloc_node();
        int body_start = alloc_node();
        {
            Action t;
            t.kind = ActionKind::Branch;
            t.pos = s.expr->pos;
            t.expect = true;
            t.cond = clone_ir_expr(*cond);
            emit_to(ccur, exit_node, std::move(t));
        }
        {
            Action f;
            f.kind = ActionKind::Branch;
            f.pos = s.expr->pos;
            f.expect = false;
            f.cond = std::move(cond);
            emit_to(ccur, body_start, std::move(f));
        }
        int bcur = body_start;
        for (const StmtPtr &st : s.then_body) bcur = lower_stmt(*st, bcur);
        merge_node(header, bcur);
        return exit_node;
    }

private:
    const MethodDecl &method_;
    const LowerOptions &opt_;
    MethodGraph g_;
    int temp_count_ = 0;

    int alloc_node() { return g_.node_count++; }

    int emit(int from, Action a) {
        int to = alloc_node();
        emit_to(from, to, std::move(a));
        return to;
    }

    void emit_to(int from, int to, Action a) {
        std::size_t idx = g_.edges.size();
        g_.edges.push_back(ActionEdge{from, to, std::move(a)});
        g_.out_edges[from].push_back(idx);
    }

    // redirect every edge touching `gone` to `keep`; `gone` must have no
    // outgoing edges (it is the tail of a finished arm)
    void merge_node(int keep, int gone) {
        if (keep == gone) return;
        assert(g_.out_edges.find(gone) == g_.out_edges.end());
        for (ActionEdge &e : g_.edges) {
            if (e.to == gone) e.to = keep;
        }
    }

    VarRef alloc_temp(BaseType base) {
        std::string name = "$t" + std::to_string(temp_count_++);
        DeclaredType ty;
        ty.base = base;
        std::uint32_t idx = static_cast<std::uint32_t>(g_.locals.size());
        g_.locals.push_back({name, ty});
        return VarRef{VarSpace::Local, idx, name};
    }

    static Place place_for(BindingSpace space, std::uint32_t index, const std::string &name) {
        Place p;
        switch (space) {
        case BindingSpace::Local:
            p.var = {VarSpace::Local, index, name};
            break;
        case BindingSpace::ResultVar:
            p.var = {VarSpace::ResultVar, 0, "Result"};
            break;
        case BindingSpace::Attribute:
            p.is_attr = true;
            p.attr_index = index;
            p.attr_name = name;
            break;
        default:
            assert(false && "unexpected binding for a target");
        }
        return p;
    }

    int lower_create(const Stmt &s, int cur) {
        Action a;
        a.kind = ActionKind::Create;
        a.pos = s.pos;
        a.dst = place_for(s.target_binding, s.target_index, s.target);
        a.cls = s.callee_class;
        a.separate_create = s.call_is_separate;
        if (s.creation_method) a.method = *s.creation_method;
        for (const SynExprPtr &arg : s.args) a.args.push_back(lower_expr(*arg, cur));
        return emit(cur, std::move(a));
    }

    int lower_assign(const Stmt &s, int cur) {
        Action a;
        a.kind = ActionKind::Assign;
        a.pos = s.pos;
        a.dst = place_for(s.target_binding, s.target_index, s.target);
        a.src = lower_expr(*s.expr, cur);
        return emit(cur, std::move(a));
    }

    int lower_call(const Stmt &s, int cur) {
        Action a;
        a.kind = s.call_is_separate ? ActionKind::Command : ActionKind::LocalCall;
        a.pos = s.pos;
        a.cls = s.callee_class;
        a.method = s.method;
        if (s.call_target) {
            a.target = lower_expr(*s.call_target, cur);
        } else {
            a.target = std::make_unique<IrExpr>();
            a.target->kind = IrExprKind::CurrentRef;
            a.target->pos = s.pos;
        }
        for (const SynExprPtr &arg : s.args) a.args.push_back(lower_expr(*arg, cur));
        return emit(cur, std::move(a));
    }

    int lower_if(const Stmt &s, int cur) {
        IrExprPtr cond = lower_expr(*s.expr, cur);
        int tstart = alloc_node();
        int estart = alloc_node();
        {
            Action t;
            t.kind = ActionKind::Branch;
            t.pos = s.expr->pos;
            t.expect = true;
            t.cond = clone_ir_expr(*cond);
            emit_to(cur, tstart, std::move(t));
        }
        {
            Action f;
            f.kind = ActionKind::Branch;
            f.pos = s.expr->pos;
            f.expect = false;
            f.cond = std::move(cond);
            emit_to(cur, estart, std::move(f));
        }
        int tcur = tstart;
        for (const StmtPtr &st : s.then_body) tcur = lower_stmt(*st, tcur);
        int ecur = estart;
        for (const StmtPtr &st : s.else_body) ecur = lower_stmt(*st, ecur);
        merge_node(tcur, ecur);
        return tcur;
    }

    // Statement position: separate query calls become Query actions feeding a
    // fresh temporary, emitted before the consuming action.
    IrExprPtr lower_expr(const SynExpr &e, int &cur) { return lower_any(e, &cur); }

    // Contract position: everything reduces in place, separate queries
    // included — contracts are evaluated atomically with the locks at hand.
    IrExprPtr lower_atomic(const SynExpr &e) { return lower_any(e, nullptr); }

    IrExprPtr lower_any(const SynExpr &e, int *cur) {
        auto out = std::make_unique<IrExpr>();
        out->pos = e.pos;
        switch (e.kind) {
        case SynExprKind::IntLit:
            out->kind = IrExprKind::IntConst;
            out->int_value = e.int_value;
            return out;
        case SynExprKind::BoolLit:
            out->kind = IrExprKind::BoolConst;
            out->bool_value = e.bool_value;
            return out;
        case SynExprKind::VoidLit:
            out->kind = IrExprKind::VoidConst;
            return out;
        case SynExprKind::CurrentLit:
            out->kind = IrExprKind::CurrentRef;
            return out;
        case SynExprKind::Name:
            switch (e.binding) {
            case BindingSpace::Local:
                out->kind = IrExprKind::ReadVar;
                out->var = {VarSpace::Local, e.binding_index, e.name};
                return out;
            case BindingSpace::Formal:
                out->kind = IrExprKind::ReadVar;
                out->var = {VarSpace::Formal, e.binding_index, e.name};
                return out;
            case BindingSpace::ResultVar:
                out->kind = IrExprKind::ReadVar;
                out->var = {VarSpace::ResultVar, 0, "Result"};
                return out;
            case BindingSpace::Attribute:
                out->kind = IrExprKind::ReadAttr;
                out->attr_index = e.binding_index;
                out->attr_name = e.name;
                return out;
            case BindingSpace::QueryCall: {
                out->kind = IrExprKind::QueryInline;
                out->target = std::make_unique<IrExpr>();
                out->target->kind = IrExprKind::CurrentRef;
                out->target->pos = e.pos;
                out->cls = e.callee_class;
                out->method = e.name;
                return out;
            }
            default:
                assert(false && "unresolved name survived checking");
                return out;
            }
        case SynExprKind::Unary:
            out->kind = IrExprKind::Unary;
            out->un_op = e.un_op;
            out->lhs = lower_any(*e.lhs, cur);
            return out;
        case SynExprKind::Binary:
            out->kind = IrExprKind::Binary;
            out->bin_op = e.bin_op;
            out->lhs = lower_any(*e.lhs, cur);
            out->rhs = lower_any(*e.rhs, cur);
            return out;
        case SynExprKind::Call: {
            if (e.binding == BindingSpace::Attribute) {
                // qualified attribute read (contracts only)
                out->kind = IrExprKind::ReadAttrOf;
                out->target = lower_any(*e.call_target, cur);
                out->attr_index = e.binding_index;
                out->attr_name = e.name;
                return out;
            }
            bool hoist = e.call_is_separate && cur != nullptr;
            if (hoist) {
                Action q;
                q.kind = ActionKind::Query;
                q.pos = e.pos;
                q.cls = e.callee_class;
                q.method = e.name;
                q.target = lower_any(*e.call_target, cur);
                for (const SynExprPtr &arg : e.args) q.args.push_back(lower_any(*arg, cur));
                VarRef tmp = alloc_temp(e.type.base);
                q.dst.var = tmp;
                *cur = emit(*cur, std::move(q));
                out->kind = IrExprKind::ReadVar;
                out->var = tmp;
                return out;
            }
            out->kind = IrExprKind::QueryInline;
            if (e.call_target) {
                out->target = lower_any(*e.call_target, cur);
            } else {
                out->target = std::make_unique<IrExpr>();
                out->target->kind = IrExprKind::CurrentRef;
                out->target->pos = e.pos;
            }
            out->cls = e.callee_class;
            out->method = e.name;
            for (const SynExprPtr &arg : e.args) out->args.push_back(lower_any(*arg, cur));
            return out;
        }
        }
        return out;
    }
};

} // namespace

MethodGraph lower_method(const MethodDecl &method, const std::string &class_name,
                         const LowerOptions &options) {
    Lowerer l(class_name, method, options);
    return l.build();
}

int lower_loop(MethodGraph &g, const Stmt &loop, int cur, const LowerOptions &options) {
    assert(loop.kind == StmtKind::Loop);
    static const MethodDecl dummy{};
    Lowerer l(std::move(g), dummy, options);
    int out = l.lower_loop_stmt(loop, cur);
    g = l.take();
    return out;
}

std::shared_ptr<const Program> lower_program(const SyntaxTree &tree,
                                             const LowerOptions &options) {
    auto prog = std::make_shared<Program>();
    prog->root_class = tree.root_class;
    prog->postcondition_checks = options.postcondition_checks;
    for (const ClassDecl &c : tree.classes) {
        ClassLayout layout;
        layout.name = c.name;
        for (const VarDecl &a : c.attributes) layout.attributes.push_back({a.name, a.type});
        prog->classes[c.name] = std::move(layout);
        auto &methods = prog->methods[c.name];
        for (const MethodDecl &m : c.methods)
            methods[m.name] = lower_method(m, c.name, options);
    }
    const_cast<Program *>(prog.get())->fingerprint = fnv1a(serialize_program(*prog));
    return prog;
}

// ---------------------------------------------------------------------------
// Serialization (structural, deterministic)

namespace {

struct Ser {
    std::string out;

    void byte(std::uint8_t b) { out.push_back(static_cast<char>(b)); }
    void num(std::int64_t v) {
        out += std::to_string(v);
        out.push_back(';');
    }
    void str(const std::string &s) {
        num(static_cast<std::int64_t>(s.size()));
        out += s;
    }
    void type(const DeclaredType &t) {
        byte(static_cast<std::uint8_t>(t.base));
        byte(t.separate ? 1 : 0);
        str(t.class_name);
    }
    void expr(const IrExpr *e) {
        if (!e) {
            byte(0xff);
            return;
        }
        byte(static_cast<std::uint8_t>(e->kind));
        switch (e->kind) {
        case IrExprKind::IntConst: num(e->int_value); break;
        case IrExprKind::BoolConst: byte(e->bool_value ? 1 : 0); break;
        case IrExprKind::VoidConst:
        case IrExprKind::CurrentRef: break;
        case IrExprKind::ReadVar:
            byte(static_cast<std::uint8_t>(e->var.space));
            num(e->var.index);
            break;
        case IrExprKind::ReadAttr: num(e->attr_index); break;
        case IrExprKind::ReadAttrOf:
            expr(e->target.get());
            num(e->attr_index);
            break;
        case IrExprKind::Unary:
            byte(static_cast<std::uint8_t>(e->un_op));
            expr(e->lhs.get());
            break;
        case IrExprKind::Binary:
            byte(static_cast<std::uint8_t>(e->bin_op));
            expr(e->lhs.get());
            expr(e->rhs.get());
            break;
        case IrExprKind::QueryInline:
            expr(e->target.get());
            str(e->cls);
            str(e->method);
            num(static_cast<std::int64_t>(e->args.size()));
            for (const auto &a : e->args) expr(a.get());
            break;
        }
    }
    void place(const Place &p) {
        byte(p.is_attr ? 1 : 0);
        if (p.is_attr) {
            num(p.attr_index);
        } else {
            byte(static_cast<std::uint8_t>(p.var.space));
            num(p.var.index);
        }
    }
    void action(const Action &a) {
        byte(static_cast<std::uint8_t>(a.kind));
        num(static_cast<std::int64_t>(a.lock_targets.size()));
        for (const auto &t : a.lock_targets) expr(t.get());
        expr(a.guard.get());
        expr(a.cond.get());
        byte(a.expect ? 1 : 0);
        place(a.dst);
        expr(a.src.get());
        str(a.cls);
        str(a.method);
        byte(a.separate_create ? 1 : 0);
        expr(a.target.get());
        num(static_cast<std::int64_t>(a.args.size()));
        for (const auto &g : a.args) expr(g.get());
        str(a.note);
    }
};

} // namespace

std::string serialize_program(const Program &p) {
    Ser s;
    s.str(p.root_class);
    s.byte(p.postcondition_checks ? 1 : 0);
    s.num(static_cast<std::int64_t>(p.classes.size()));
    for (const auto &[name, layout] : p.classes) {
        s.str(name);
        s.num(static_cast<std::int64_t>(layout.attributes.size()));
        for (const auto &a : layout.attributes) {
            s.str(a.name);
            s.type(a.type);
        }
    }
    for (const auto &[cls, methods] : p.methods) {
        s.str(cls);
        s.num(static_cast<std::int64_t>(methods.size()));
        for (const auto &[name, g] : methods) {
            s.str(name);
            s.byte(g.is_query ? 1 : 0);
            if (g.result_type) s.type(*g.result_type);
            s.num(static_cast<std::int64_t>(g.formals.size()));
            for (const auto &f : g.formals) {
                s.str(f.name);
                s.type(f.type);
            }
            s.num(static_cast<std::int64_t>(g.locals.size()));
            for (const auto &l : g.locals) {
                s.str(l.name);
                s.type(l.type);
            }
            s.num(g.node_count);
            s.num(static_cast<std::int64_t>(g.edges.size()));
            for (const auto &e : g.edges) {
                s.num(e.from);
                s.num(e.to);
                s.action(e.action);
            }
        }
    }
    return s.out;
}

std::uint64_t fnv1a(const std::string &bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace cscoop
