#include "cscoop/ast.hpp"

namespace cscoop {

SynExprPtr clone_expr(const SynExpr &e) {
    auto c = std::make_unique<SynExpr>();
    c->kind = e.kind;
    c->pos = e.pos;
    c->int_value = e.int_value;
    c->bool_value = e.bool_value;
    c->name = e.name;
    c->un_op = e.un_op;
    c->bin_op = e.bin_op;
    if (e.lhs) c->lhs = clone_expr(*e.lhs);
    if (e.rhs) c->rhs = clone_expr(*e.rhs);
    if (e.call_target) c->call_target = clone_expr(*e.call_target);
    c->args.reserve(e.args.size());
    for (const auto &a : e.args) c->args.push_back(clone_expr(*a));
    c->type = e.type;
    c->binding = e.binding;
    c->binding_index = e.binding_index;
    c->callee_class = e.callee_class;
    c->call_is_separate = e.call_is_separate;
    return c;
}

} // namespace cscoop
