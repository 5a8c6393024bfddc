#include "cscoop/semantics.hpp"

#include <cassert>

namespace cscoop {

namespace {

constexpr int kMaxQueryDepth = 64;
constexpr long kMaxQuerySteps = 200000;

struct Evaluator {
    const Configuration &c;
    int depth = 0;
    long steps = 0;

    EvalResult fail(EvalErrorKind kind, SourcePos pos, std::string detail) {
        EvalResult r;
        r.err = kind;
        r.err_pos = pos;
        r.detail = std::move(detail);
        return r;
    }

    EvalResult eval(Pid pid, const Frame &f, const IrExpr &e) {
        switch (e.kind) {
        case IrExprKind::IntConst: return {Value::of_int(e.int_value)};
        case IrExprKind::BoolConst: return {Value::of_bool(e.bool_value)};
        case IrExprKind::VoidConst: return {Value::void_value()};
        case IrExprKind::CurrentRef: return {Value::of_ref(pid, f.target_oid)};
        case IrExprKind::ReadVar:
            switch (e.var.space) {
            case VarSpace::Local: return {f.locals[e.var.index]};
            case VarSpace::Formal: return {f.formals[e.var.index]};
            case VarSpace::ResultVar: return {f.result};
            }
            return {};
        case IrExprKind::ReadAttr: {
            const ObjectRec *obj = c.find_object(pid, f.target_oid);
            assert(obj && e.attr_index < obj->attrs.size());
            return {obj->attrs[e.attr_index]};
        }
        case IrExprKind::ReadAttrOf: {
            EvalResult t = eval(pid, f, *e.target);
            if (!t.ok()) return t;
            if (t.value.is_void())
                return fail(EvalErrorKind::VoidAccess, e.pos,
                            "attribute '" + e.attr_name + "' read on Void");
            const ObjectRec *obj = c.find_object(t.value.pid, t.value.oid);
            assert(obj && e.attr_index < obj->attrs.size());
            return {obj->attrs[e.attr_index]};
        }
        case IrExprKind::Unary: return eval_unary(pid, f, e);
        case IrExprKind::Binary: return eval_binary(pid, f, e);
        case IrExprKind::QueryInline: return eval_query(pid, f, e);
        }
        return {};
    }

    EvalResult eval_unary(Pid pid, const Frame &f, const IrExpr &e) {
        EvalResult v = eval(pid, f, *e.lhs);
        if (!v.ok()) return v;
        if (e.un_op == UnaryOp::Neg) {
            std::int64_t out;
            if (__builtin_sub_overflow(std::int64_t{0}, v.value.i, &out))
                return fail(EvalErrorKind::Overflow, e.pos, "integer overflow in negation");
            return {Value::of_int(out)};
        }
        return {Value::of_bool(!v.value.b)};
    }

    EvalResult eval_binary(Pid pid, const Frame &f, const IrExpr &e) {
        EvalResult l = eval(pid, f, *e.lhs);
        if (!l.ok()) return l;
        EvalResult r = eval(pid, f, *e.rhs);
        if (!r.ok()) return r;
        const Value &a = l.value;
        const Value &b = r.value;
        std::int64_t out;
        switch (e.bin_op) {
        case BinaryOp::Add:
            if (__builtin_add_overflow(a.i, b.i, &out))
                return fail(EvalErrorKind::Overflow, e.pos, "integer overflow in '+'");
            return {Value::of_int(out)};
        case BinaryOp::Sub:
            if (__builtin_sub_overflow(a.i, b.i, &out))
                return fail(EvalErrorKind::Overflow, e.pos, "integer overflow in '-'");
            return {Value::of_int(out)};
        case BinaryOp::Mul:
            if (__builtin_mul_overflow(a.i, b.i, &out))
                return fail(EvalErrorKind::Overflow, e.pos, "integer overflow in '*'");
            return {Value::of_int(out)};
        case BinaryOp::Div:
            if (b.i == 0) return fail(EvalErrorKind::DivZero, e.pos, "division by zero");
            if (a.i == INT64_MIN && b.i == -1)
                return fail(EvalErrorKind::Overflow, e.pos, "integer overflow in '//'");
            return {Value::of_int(a.i / b.i)};
        case BinaryOp::Lt: return {Value::of_bool(a.i < b.i)};
        case BinaryOp::Le: return {Value::of_bool(a.i <= b.i)};
        case BinaryOp::And: return {Value::of_bool(a.b && b.b)};
        case BinaryOp::Or: return {Value::of_bool(a.b || b.b)};
        case BinaryOp::Eq: return {Value::of_bool(a == b)};
        case BinaryOp::Ne: return {Value::of_bool(!(a == b))};
        }
        return {};
    }

    // Runs a query body to completion on a scratch frame. Query graphs are
    // deterministic straight-line/branching code: Assign, Branch, Noop,
    // PostCheck — nothing else survives checking.
    EvalResult eval_query(Pid pid, const Frame &f, const IrExpr &e) {
        EvalResult t = eval(pid, f, *e.target);
        if (!t.ok()) return t;
        if (t.value.is_void())
            return fail(EvalErrorKind::VoidAccess, e.pos, "query '" + e.method + "' on Void");
        if (depth + 1 > kMaxQueryDepth)
            return fail(EvalErrorKind::QueryDepth, e.pos,
                        "query nesting deeper than " + std::to_string(kMaxQueryDepth));

        Pid tpid = t.value.pid;
        const ObjectRec *obj = c.find_object(tpid, t.value.oid);
        assert(obj);
        const MethodGraph *g = c.program->find_method(obj->cls, e.method);
        assert(g && g->is_query);

        std::vector<Value> args;
        args.reserve(e.args.size());
        for (const auto &a : e.args) {
            EvalResult v = eval(pid, f, *a);
            if (!v.ok()) return v;
            args.push_back(v.value);
        }

        Frame scratch = make_frame(g, t.value.oid, std::move(args));
        ++depth;
        EvalResult out = run_query_frame(tpid, scratch, e.pos);
        --depth;
        return out;
    }

    EvalResult run_query_frame(Pid pid, Frame &f, SourcePos call_pos) {
        while (!f.at_final()) {
            if (++steps > kMaxQuerySteps)
                return fail(EvalErrorKind::QuerySteps, call_pos,
                            "query exceeded " + std::to_string(kMaxQuerySteps) +
                                " steps; assuming it does not terminate");
            const auto &out = f.graph->out(f.node);
            assert(!out.empty());
            const ActionEdge *chosen = nullptr;
            if (f.graph->edges[out[0]].action.kind == ActionKind::Branch) {
                EvalResult cond = eval(pid, f, *f.graph->edges[out[0]].action.cond);
                if (!cond.ok()) return cond;
                for (std::size_t idx : out) {
                    const ActionEdge &edge = f.graph->edges[idx];
                    if (edge.action.expect == cond.value.b) {
                        chosen = &edge;
                        break;
                    }
                }
                assert(chosen);
                f.node = chosen->to;
                continue;
            }
            assert(out.size() == 1);
            const ActionEdge &edge = f.graph->edges[out[0]];
            const Action &a = edge.action;
            switch (a.kind) {
            case ActionKind::Assign: {
                EvalResult v = eval(pid, f, *a.src);
                if (!v.ok()) return v;
                assert(!a.dst.is_attr && "queries do not write attributes");
                if (a.dst.var.space == VarSpace::ResultVar)
                    f.result = v.value;
                else
                    f.locals[a.dst.var.index] = v.value;
                break;
            }
            case ActionKind::PostCheck: {
                EvalResult v = eval(pid, f, *a.cond);
                if (!v.ok()) return v;
                if (!v.value.b)
                    return fail(EvalErrorKind::PostconditionFailed, a.pos,
                                "postcondition of " + f.graph->class_name +
                                    "::" + f.graph->method_name + " violated");
                break;
            }
            case ActionKind::Noop:
                break;
            default:
                assert(false && "impure action in a query body");
                break;
            }
            f.node = edge.to;
        }
        return {f.result};
    }
};

} // namespace

EvalResult evaluate(const Configuration &c, Pid pid, const Frame &frame, const IrExpr &e) {
    Evaluator ev{c};
    return ev.eval(pid, frame, e);
}

} // namespace cscoop
