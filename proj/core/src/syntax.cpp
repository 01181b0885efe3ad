#include "luc/syntax.hpp"

#include <algorithm>
#include <cassert>

namespace luc {

bool const_equal(const Const& a, const Const& b) { return a.v == b.v; }

const char* op_name(Op op) {
  switch (op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Eq: return "eq";
    case Op::Lt: return "lt";
    case Op::Not: return "not";
  }
  return "?";
}

ExprPtr mk(Expr::Node node, SourceSpan span, std::uint32_t id) {
  auto e = std::make_shared<Expr>();
  e->node = std::move(node);
  e->span = span;
  e->id = id;
  return e;
}

ExprPtr e_var(std::string name) { return mk(Var{std::move(name)}); }
ExprPtr e_int(std::int64_t v) { return mk(Lit{Const{v}}); }
ExprPtr e_bool(bool v) { return mk(Lit{Const{v}}); }
ExprPtr e_str(std::string v) { return mk(Lit{Const{std::move(v)}}); }
ExprPtr e_func(std::vector<std::string> params, TypePtr annot, ExprPtr body) {
  return mk(FuncVal{std::move(params), std::move(annot), std::move(body)});
}
ExprPtr e_loc(LocId l) { return mk(LocRef{l}); }
ExprPtr e_let(std::string binder, ExprPtr bound, ExprPtr body) {
  return mk(Let{std::move(binder), std::move(bound), std::move(body)});
}
ExprPtr e_apply(ExprPtr callee, std::vector<ExprPtr> args) {
  return mk(Apply{std::move(callee), std::move(args)});
}
ExprPtr e_prim(Op op, std::vector<ExprPtr> args) {
  return mk(PrimApp{op, std::move(args)});
}
ExprPtr e_if(ExprPtr c, ExprPtr t, ExprPtr e) {
  return mk(If{std::move(c), std::move(t), std::move(e)});
}
ExprPtr e_ifhasattr(ExprPtr subject, std::string attr, ExprPtr t, ExprPtr e) {
  return mk(IfHasAttr{std::move(subject), std::move(attr), std::move(t),
                      std::move(e)});
}
ExprPtr e_break(std::string label, ExprPtr arg) {
  return mk(Break{std::move(label), std::move(arg)});
}
ExprPtr e_labeled(std::string label, TypePtr annot, ExprPtr body) {
  return mk(Labeled{std::move(label), std::move(annot), std::move(body)});
}
ExprPtr e_new() { return mk(New{}); }
ExprPtr e_fieldset(ExprPtr subject, std::string field, ExprPtr value) {
  return mk(FieldSet{std::move(subject), std::move(field), std::move(value)});
}
ExprPtr e_fieldget(ExprPtr subject, std::string field) {
  return mk(FieldGet{std::move(subject), std::move(field)});
}

bool is_value(const Expr& e) {
  return e.is<Var>() || e.is<Lit>() || e.is<FuncVal>() || e.is<LocRef>();
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* x = a.as<Var>()) return x->name == b.as<Var>()->name;
  if (const auto* x = a.as<Lit>())
    return const_equal(x->value, b.as<Lit>()->value);
  if (const auto* x = a.as<FuncVal>()) {
    const auto* y = b.as<FuncVal>();
    return x->params == y->params && type_equal(x->annot, y->annot) &&
           expr_equal(x->body, y->body);
  }
  if (const auto* x = a.as<LocRef>()) return x->loc == b.as<LocRef>()->loc;
  if (const auto* x = a.as<Let>()) {
    const auto* y = b.as<Let>();
    return x->binder == y->binder && expr_equal(x->bound, y->bound) &&
           expr_equal(x->body, y->body);
  }
  if (const auto* x = a.as<Apply>()) {
    const auto* y = b.as<Apply>();
    if (!expr_equal(x->callee, y->callee) || x->args.size() != y->args.size())
      return false;
    for (size_t i = 0; i < x->args.size(); ++i)
      if (!expr_equal(x->args[i], y->args[i])) return false;
    return true;
  }
  if (const auto* x = a.as<PrimApp>()) {
    const auto* y = b.as<PrimApp>();
    if (x->op != y->op || x->args.size() != y->args.size()) return false;
    for (size_t i = 0; i < x->args.size(); ++i)
      if (!expr_equal(x->args[i], y->args[i])) return false;
    return true;
  }
  if (const auto* x = a.as<If>()) {
    const auto* y = b.as<If>();
    return expr_equal(x->cond, y->cond) &&
           expr_equal(x->then_branch, y->then_branch) &&
           expr_equal(x->else_branch, y->else_branch);
  }
  if (const auto* x = a.as<IfHasAttr>()) {
    const auto* y = b.as<IfHasAttr>();
    return expr_equal(x->subject, y->subject) && x->attr == y->attr &&
           expr_equal(x->then_branch, y->then_branch) &&
           expr_equal(x->else_branch, y->else_branch);
  }
  if (const auto* x = a.as<Break>()) {
    const auto* y = b.as<Break>();
    return x->label == y->label && expr_equal(x->arg, y->arg);
  }
  if (const auto* x = a.as<Labeled>()) {
    const auto* y = b.as<Labeled>();
    return x->label == y->label && type_equal(x->annot, y->annot) &&
           expr_equal(x->body, y->body);
  }
  if (a.is<New>()) return true;
  if (const auto* x = a.as<FieldSet>()) {
    const auto* y = b.as<FieldSet>();
    return expr_equal(x->subject, y->subject) && x->field == y->field &&
           expr_equal(x->value, y->value);
  }
  if (const auto* x = a.as<FieldGet>()) {
    const auto* y = b.as<FieldGet>();
    return expr_equal(x->subject, y->subject) && x->field == y->field;
  }
  return false;
}

void free_vars(const Expr& e, std::set<std::string>& out) {
  if (const auto* x = e.as<Var>()) {
    out.insert(x->name);
  } else if (const auto* x = e.as<FuncVal>()) {
    std::set<std::string> inner;
    free_vars(*x->body, inner);
    for (const auto& p : x->params) inner.erase(p);
    out.insert(inner.begin(), inner.end());
  } else if (const auto* x = e.as<Let>()) {
    free_vars(*x->bound, out);
    std::set<std::string> inner;
    free_vars(*x->body, inner);
    inner.erase(x->binder);
    out.insert(inner.begin(), inner.end());
  } else if (const auto* x = e.as<Apply>()) {
    free_vars(*x->callee, out);
    for (const auto& a : x->args) free_vars(*a, out);
  } else if (const auto* x = e.as<PrimApp>()) {
    for (const auto& a : x->args) free_vars(*a, out);
  } else if (const auto* x = e.as<If>()) {
    free_vars(*x->cond, out);
    free_vars(*x->then_branch, out);
    free_vars(*x->else_branch, out);
  } else if (const auto* x = e.as<IfHasAttr>()) {
    free_vars(*x->subject, out);
    free_vars(*x->then_branch, out);
    free_vars(*x->else_branch, out);
  } else if (const auto* x = e.as<Break>()) {
    // The label lives in the same namespace as variables (it is looked up
    // in the type environment) but is not a term variable at runtime.
    free_vars(*x->arg, out);
  } else if (const auto* x = e.as<Labeled>()) {
    free_vars(*x->body, out);
  } else if (const auto* x = e.as<FieldSet>()) {
    free_vars(*x->subject, out);
    free_vars(*x->value, out);
  } else if (const auto* x = e.as<FieldGet>()) {
    free_vars(*x->subject, out);
  }
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  free_vars(e, out);
  return out;
}

bool source_form(const Expr& e) {
  if (e.is<LocRef>()) return false;
  bool ok = true;
  auto walk = [&](const ExprPtr& c) { ok = ok && source_form(*c); };
  if (const auto* x = e.as<FuncVal>()) walk(x->body);
  else if (const auto* x = e.as<Let>()) { walk(x->bound); walk(x->body); }
  else if (const auto* x = e.as<Apply>()) {
    walk(x->callee);
    for (const auto& a : x->args) walk(a);
  } else if (const auto* x = e.as<PrimApp>()) {
    for (const auto& a : x->args) walk(a);
  } else if (const auto* x = e.as<If>()) {
    walk(x->cond); walk(x->then_branch); walk(x->else_branch);
  } else if (const auto* x = e.as<IfHasAttr>()) {
    walk(x->subject); walk(x->then_branch); walk(x->else_branch);
  } else if (const auto* x = e.as<Break>()) walk(x->arg);
  else if (const auto* x = e.as<Labeled>()) walk(x->body);
  else if (const auto* x = e.as<FieldSet>()) { walk(x->subject); walk(x->value); }
  else if (const auto* x = e.as<FieldGet>()) walk(x->subject);
  return ok;
}

namespace {

// Picks a name not free in any pending replacement and distinct from the
// original, for parameter renaming during capture avoidance.
std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  for (int i = 0;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

ExprPtr subst(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub);

ExprPtr subst_binder_body(const ExprPtr& body,
                          std::vector<std::string>& binders,
                          std::map<std::string, ExprPtr> sub) {
  for (const auto& b : binders) sub.erase(b);
  if (sub.empty()) return body;

  // Rename binders that would capture free variables of a replacement.
  std::set<std::string> fv_replacements;
  for (const auto& [_, v] : sub) free_vars(*v, fv_replacements);
  std::map<std::string, ExprPtr> renames;
  std::set<std::string> avoid = fv_replacements;
  free_vars(*body, avoid);
  bool renamed = false;
  for (auto& b : binders) {
    if (fv_replacements.count(b)) {
      std::string nb = fresh_name(b, avoid);
      avoid.insert(nb);
      renames[b] = e_var(nb);
      b = nb;
      renamed = true;
    }
  }
  ExprPtr inner = renamed ? subst(body, renames) : body;
  return subst(inner, sub);
}

ExprPtr subst(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
  if (sub.empty()) return e;
  if (const auto* x = e->as<Var>()) {
    auto it = sub.find(x->name);
    if (it == sub.end()) return e;
    return it->second;
  }
  if (e->is<Lit>() || e->is<LocRef>() || e->is<New>()) return e;
  if (const auto* x = e->as<FuncVal>()) {
    std::vector<std::string> params = x->params;
    ExprPtr body = subst_binder_body(x->body, params, sub);
    if (body == x->body && params == x->params) return e;
    return mk(FuncVal{std::move(params), x->annot, std::move(body)}, e->span,
              e->id);
  }
  if (const auto* x = e->as<Let>()) {
    ExprPtr bound = subst(x->bound, sub);
    std::vector<std::string> binders{x->binder};
    ExprPtr body = subst_binder_body(x->body, binders, sub);
    if (bound == x->bound && body == x->body && binders[0] == x->binder)
      return e;
    return mk(Let{binders[0], std::move(bound), std::move(body)}, e->span,
              e->id);
  }
  if (const auto* x = e->as<Apply>()) {
    ExprPtr callee = subst(x->callee, sub);
    std::vector<ExprPtr> args;
    args.reserve(x->args.size());
    for (const auto& a : x->args) args.push_back(subst(a, sub));
    return mk(Apply{std::move(callee), std::move(args)}, e->span, e->id);
  }
  if (const auto* x = e->as<PrimApp>()) {
    std::vector<ExprPtr> args;
    args.reserve(x->args.size());
    for (const auto& a : x->args) args.push_back(subst(a, sub));
    return mk(PrimApp{x->op, std::move(args)}, e->span, e->id);
  }
  if (const auto* x = e->as<If>()) {
    return mk(If{subst(x->cond, sub), subst(x->then_branch, sub),
                 subst(x->else_branch, sub)},
              e->span, e->id);
  }
  if (const auto* x = e->as<IfHasAttr>()) {
    return mk(IfHasAttr{subst(x->subject, sub), x->attr,
                        subst(x->then_branch, sub),
                        subst(x->else_branch, sub)},
              e->span, e->id);
  }
  if (const auto* x = e->as<Break>()) {
    return mk(Break{x->label, subst(x->arg, sub)}, e->span, e->id);
  }
  if (const auto* x = e->as<Labeled>()) {
    return mk(Labeled{x->label, x->annot, subst(x->body, sub)}, e->span,
              e->id);
  }
  if (const auto* x = e->as<FieldSet>()) {
    return mk(FieldSet{subst(x->subject, sub), x->field,
                       subst(x->value, sub)},
              e->span, e->id);
  }
  if (const auto* x = e->as<FieldGet>()) {
    return mk(FieldGet{subst(x->subject, sub), x->field}, e->span, e->id);
  }
  assert(false && "unhandled expression alternative");
  return e;
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const std::string& x, const ExprPtr& v) {
  assert(is_value(*v));
  return subst(e, {{x, v}});
}

ExprPtr substitute_many(const ExprPtr& e,
                        const std::map<std::string, ExprPtr>& sub) {
  for ([[maybe_unused]] const auto& [_, v] : sub) assert(is_value(*v));
  return subst(e, sub);
}

ExprPtr assign_ids(const ExprPtr& e, std::uint32_t& next_id) {
  std::uint32_t my_id = next_id++;
  Expr::Node node = e->node;
  if (auto* x = std::get_if<FuncVal>(&node)) {
    x->body = assign_ids(x->body, next_id);
  } else if (auto* x = std::get_if<Let>(&node)) {
    x->bound = assign_ids(x->bound, next_id);
    x->body = assign_ids(x->body, next_id);
  } else if (auto* x = std::get_if<Apply>(&node)) {
    x->callee = assign_ids(x->callee, next_id);
    for (auto& a : x->args) a = assign_ids(a, next_id);
  } else if (auto* x = std::get_if<PrimApp>(&node)) {
    for (auto& a : x->args) a = assign_ids(a, next_id);
  } else if (auto* x = std::get_if<If>(&node)) {
    x->cond = assign_ids(x->cond, next_id);
    x->then_branch = assign_ids(x->then_branch, next_id);
    x->else_branch = assign_ids(x->else_branch, next_id);
  } else if (auto* x = std::get_if<IfHasAttr>(&node)) {
    x->subject = assign_ids(x->subject, next_id);
    x->then_branch = assign_ids(x->then_branch, next_id);
    x->else_branch = assign_ids(x->else_branch, next_id);
  } else if (auto* x = std::get_if<Break>(&node)) {
    x->arg = assign_ids(x->arg, next_id);
  } else if (auto* x = std::get_if<Labeled>(&node)) {
    x->body = assign_ids(x->body, next_id);
  } else if (auto* x = std::get_if<FieldSet>(&node)) {
    x->subject = assign_ids(x->subject, next_id);
    x->value = assign_ids(x->value, next_id);
  } else if (auto* x = std::get_if<FieldGet>(&node)) {
    x->subject = assign_ids(x->subject, next_id);
  }
  return mk(std::move(node), e->span, my_id);
}

}  // namespace luc
