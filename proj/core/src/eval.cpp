#include "luc/eval.hpp"

#include <cassert>
#include <sstream>

#include "luc/pretty.hpp"

namespace luc {

const char* stuck_reason_name(StuckReason r) {
  switch (r) {
    case StuckReason::MissingFieldAtRuntime: return "MissingFieldAtRuntime";
    case StuckReason::DeltaTypeTrap: return "DeltaTypeTrap";
    case StuckReason::ArityTrap: return "ArityTrap";
    case StuckReason::NotAFunction: return "NotAFunction";
    case StuckReason::NotABoolean: return "NotABoolean";
    case StuckReason::UnboundLocation: return "UnboundLocation";
    case StuckReason::DanglingBreak: return "DanglingBreak";
  }
  return "?";
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Let: return "Let";
    case Rule::BetaV: return "BetaV";
    case Rule::IfTrue: return "IfTrue";
    case Rule::IfFalse: return "IfFalse";
    case Rule::IfhtrTrue: return "IfhtrTrue";
    case Rule::IfhtrFalse: return "IfhtrFalse";
    case Rule::BrkP: return "BrkP";
    case Rule::LblPop: return "LblPop";
    case Rule::New: return "New";
    case Rule::SetRef: return "SetRef";
    case Rule::Deref: return "Deref";
    case Rule::OpEval: return "OpEval";
  }
  return "?";
}

std::optional<ExprPtr> delta(Op op, const std::vector<ExprPtr>& args) {
  auto lit = [](const ExprPtr& e) -> const Const* {
    const auto* l = e->as<Lit>();
    return l ? &l->value : nullptr;
  };
  auto wrap = [](std::uint64_t v) {
    return static_cast<std::int64_t>(v);
  };
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      if (args.size() != 2) return std::nullopt;
      const Const* a = lit(args[0]);
      const Const* b = lit(args[1]);
      if (!a || !b || !a->is_int() || !b->is_int()) return std::nullopt;
      std::uint64_t x = static_cast<std::uint64_t>(a->as_int());
      std::uint64_t y = static_cast<std::uint64_t>(b->as_int());
      std::uint64_t r = op == Op::Add ? x + y : op == Op::Sub ? x - y : x * y;
      return e_int(wrap(r));
    }
    case Op::Eq: {
      if (args.size() != 2) return std::nullopt;
      const Const* a = lit(args[0]);
      const Const* b = lit(args[1]);
      if (!a || !b) return std::nullopt;
      if (a->is_int() && b->is_int()) return e_bool(a->as_int() == b->as_int());
      if (a->is_str() && b->is_str()) return e_bool(a->as_str() == b->as_str());
      return std::nullopt;
    }
    case Op::Lt: {
      if (args.size() != 2) return std::nullopt;
      const Const* a = lit(args[0]);
      const Const* b = lit(args[1]);
      if (!a || !b || !a->is_int() || !b->is_int()) return std::nullopt;
      return e_bool(a->as_int() < b->as_int());
    }
    case Op::Not: {
      if (args.size() != 1) return std::nullopt;
      const Const* a = lit(args[0]);
      if (!a || !a->is_bool()) return std::nullopt;
      return e_bool(!a->as_bool());
    }
  }
  return std::nullopt;
}

namespace {

ExprPtr wrap_frame(const Frame& f, const ExprPtr& hole) {
  if (const auto* x = std::get_if<LetFrame>(&f))
    return e_let(x->binder, hole, x->body);
  if (const auto* x = std::get_if<CalleeFrame>(&f))
    return e_apply(hole, x->args);
  if (const auto* x = std::get_if<ArgsFrame>(&f)) {
    std::vector<ExprPtr> args = x->done;
    args.push_back(hole);
    args.insert(args.end(), x->pending.begin(), x->pending.end());
    return e_apply(x->callee, std::move(args));
  }
  if (const auto* x = std::get_if<OpFrame>(&f)) {
    std::vector<ExprPtr> args = x->done;
    args.push_back(hole);
    args.insert(args.end(), x->pending.begin(), x->pending.end());
    return e_prim(x->op, std::move(args));
  }
  if (const auto* x = std::get_if<IfFrame>(&f))
    return e_if(hole, x->then_branch, x->else_branch);
  if (const auto* x = std::get_if<BreakFrame>(&f))
    return e_break(x->label, hole);
  if (const auto* x = std::get_if<LabelFrame>(&f))
    return e_labeled(x->label, x->annot, hole);
  assert(false);
  return hole;
}

Stuck stuck(StuckReason r, Config c) { return Stuck{r, std::move(c)}; }

}  // namespace

ExprPtr plug(const std::vector<Frame>& stack, const ExprPtr& redex) {
  ExprPtr e = redex;
  for (auto it = stack.rbegin(); it != stack.rend(); ++it)
    e = wrap_frame(*it, e);
  return e;
}

StepOutcome step(const Config& start) {
  Config c = start;

  // Decomposition: push frames until the focus is a value or a redex.
  // These moves are administrative and not counted as steps.
  for (;;) {
    const Expr& e = *c.redex;
    if (is_value(e)) break;
    if (const auto* x = e.as<Let>()) {
      if (is_value(*x->bound)) break;
      c.stack.push_back(LetFrame{x->binder, x->body});
      c.redex = x->bound;
      continue;
    }
    if (const auto* x = e.as<Apply>()) {
      if (!is_value(*x->callee)) {
        c.stack.push_back(CalleeFrame{x->args});
        c.redex = x->callee;
        continue;
      }
      size_t i = 0;
      while (i < x->args.size() && is_value(*x->args[i])) ++i;
      if (i == x->args.size()) break;  // beta redex
      ArgsFrame f{x->callee,
                  {x->args.begin(), x->args.begin() + i},
                  {x->args.begin() + i + 1, x->args.end()}};
      c.redex = x->args[i];
      c.stack.push_back(std::move(f));
      continue;
    }
    if (const auto* x = e.as<PrimApp>()) {
      size_t i = 0;
      while (i < x->args.size() && is_value(*x->args[i])) ++i;
      if (i == x->args.size()) break;  // delta redex
      OpFrame f{x->op,
                {x->args.begin(), x->args.begin() + i},
                {x->args.begin() + i + 1, x->args.end()}};
      c.redex = x->args[i];
      c.stack.push_back(std::move(f));
      continue;
    }
    if (const auto* x = e.as<If>()) {
      if (is_value(*x->cond)) break;
      c.stack.push_back(IfFrame{x->then_branch, x->else_branch});
      c.redex = x->cond;
      continue;
    }
    if (const auto* x = e.as<Break>()) {
      if (is_value(*x->arg)) break;
      c.stack.push_back(BreakFrame{x->label});
      c.redex = x->arg;
      continue;
    }
    if (const auto* x = e.as<Labeled>()) {
      c.stack.push_back(LabelFrame{x->label, x->annot});
      c.redex = x->body;
      continue;
    }
    break;  // new, field ops, ifhasattr: redexes
  }

  // Value propagation. An exposed variable cannot occur in a closed
  // program; it is stuck rather than propagated.
  if (is_value(*c.redex)) {
    if (c.redex->is<Var>())
      return stuck(StuckReason::UnboundLocation, std::move(c));
    if (c.stack.empty()) return Done{c.store, c.redex};
    Frame top = c.stack.back();

    if (auto* f = std::get_if<LetFrame>(&top)) {
      c.stack.pop_back();
      c.redex = substitute(f->body, f->binder, c.redex);
      return Stepped{std::move(c), Rule::Let, std::nullopt};
    }

    if (auto* f = std::get_if<CalleeFrame>(&top)) {
      // Administrative: shift focus from the callee to the arguments.
      c.stack.pop_back();
      c.redex = e_apply(c.redex, f->args);
      return step(c);
    }

    if (auto* f = std::get_if<ArgsFrame>(&top)) {
      c.stack.pop_back();
      std::vector<ExprPtr> done = f->done;
      done.push_back(c.redex);
      size_t i = 0;
      while (i < f->pending.size() && is_value(*f->pending[i]))
        done.push_back(f->pending[i++]);
      if (i == f->pending.size()) {
        c.redex = e_apply(f->callee, std::move(done));
        return step(c);  // beta redex
      }
      ExprPtr next = f->pending[i];
      c.stack.push_back(ArgsFrame{
          f->callee, std::move(done),
          {f->pending.begin() + i + 1, f->pending.end()}});
      c.redex = next;
      return step(c);
    }

    if (auto* f = std::get_if<OpFrame>(&top)) {
      c.stack.pop_back();
      std::vector<ExprPtr> done = f->done;
      done.push_back(c.redex);
      size_t i = 0;
      while (i < f->pending.size() && is_value(*f->pending[i]))
        done.push_back(f->pending[i++]);
      if (i == f->pending.size()) {
        c.redex = e_prim(f->op, std::move(done));
        return step(c);  // delta redex
      }
      ExprPtr next = f->pending[i];
      c.stack.push_back(OpFrame{
          f->op, std::move(done),
          {f->pending.begin() + i + 1, f->pending.end()}});
      c.redex = next;
      return step(c);
    }

    if (auto* f = std::get_if<IfFrame>(&top)) {
      c.stack.pop_back();
      c.redex = e_if(c.redex, f->then_branch, f->else_branch);
      // fall through to redex dispatch
    } else if (std::get_if<BreakFrame>(&top)) {
      const std::string label = std::get<BreakFrame>(top).label;
      c.stack.pop_back();
      c.redex = e_break(label, c.redex);
      // fall through to redex dispatch
    } else if (std::get_if<LabelFrame>(&top)) {
      c.stack.pop_back();
      return Stepped{std::move(c), Rule::LblPop, std::nullopt};
    } else {
      assert(false && "unhandled frame");
    }
  }

  // Redex dispatch.
  const Expr& e = *c.redex;

  if (e.is<Var>()) return stuck(StuckReason::UnboundLocation, std::move(c));

  if (const auto* x = e.as<If>()) {
    const auto* lit = x->cond->as<Lit>();
    if (!lit || !lit->value.is_bool())
      return stuck(StuckReason::NotABoolean, std::move(c));
    bool b = lit->value.as_bool();
    c.redex = b ? x->then_branch : x->else_branch;
    return Stepped{std::move(c), b ? Rule::IfTrue : Rule::IfFalse,
                   std::nullopt};
  }

  if (const auto* x = e.as<Break>()) {
    if (x->arg->is<Var>() || !is_value(*x->arg))
      return stuck(StuckReason::UnboundLocation, std::move(c));
    ExprPtr v = x->arg;
    const std::string label = x->label;
    // Unwind to the nearest enclosing label frame with this name.
    for (;;) {
      if (c.stack.empty())
        return stuck(StuckReason::DanglingBreak, std::move(c));
      Frame inner = c.stack.back();
      c.stack.pop_back();
      if (const auto* lf = std::get_if<LabelFrame>(&inner)) {
        if (lf->label == label) break;
      }
    }
    c.redex = v;
    return Stepped{std::move(c), Rule::BrkP, std::nullopt};
  }

  if (e.is<New>()) {
    LocId l = c.next_loc++;
    std::uint32_t node = e.id;
    c.store[l] = Object{};
    c.redex = e_loc(l);
    return Stepped{std::move(c), Rule::New, std::make_pair(node, l)};
  }

  if (const auto* x = e.as<FieldSet>()) {
    const auto* loc = x->subject->as<LocRef>();
    if (!loc) return stuck(StuckReason::UnboundLocation, std::move(c));
    if (x->value->is<Var>() || !is_value(*x->value))
      return stuck(StuckReason::UnboundLocation, std::move(c));
    auto it = c.store.find(loc->loc);
    if (it == c.store.end())
      return stuck(StuckReason::UnboundLocation, std::move(c));
    ExprPtr v = x->value;
    it->second[x->field] = v;
    c.redex = v;
    return Stepped{std::move(c), Rule::SetRef, std::nullopt};
  }

  if (const auto* x = e.as<FieldGet>()) {
    const auto* loc = x->subject->as<LocRef>();
    if (!loc) return stuck(StuckReason::UnboundLocation, std::move(c));
    auto it = c.store.find(loc->loc);
    if (it == c.store.end())
      return stuck(StuckReason::UnboundLocation, std::move(c));
    auto fit = it->second.find(x->field);
    if (fit == it->second.end())
      return stuck(StuckReason::MissingFieldAtRuntime, std::move(c));
    c.redex = fit->second;
    return Stepped{std::move(c), Rule::Deref, std::nullopt};
  }

  if (const auto* x = e.as<IfHasAttr>()) {
    const auto* loc = x->subject->as<LocRef>();
    if (!loc) return stuck(StuckReason::UnboundLocation, std::move(c));
    auto it = c.store.find(loc->loc);
    if (it == c.store.end())
      return stuck(StuckReason::UnboundLocation, std::move(c));
    bool has = it->second.count(x->attr) > 0;
    c.redex = has ? x->then_branch : x->else_branch;
    return Stepped{std::move(c), has ? Rule::IfhtrTrue : Rule::IfhtrFalse,
                   std::nullopt};
  }

  if (const auto* x = e.as<Apply>()) {
    const auto* fn = x->callee->as<FuncVal>();
    if (!fn) {
      if (x->callee->is<Var>())
        return stuck(StuckReason::UnboundLocation, std::move(c));
      return stuck(StuckReason::NotAFunction, std::move(c));
    }
    if (fn->params.size() != x->args.size())
      return stuck(StuckReason::ArityTrap, std::move(c));
    std::map<std::string, ExprPtr> sub;
    for (size_t i = 0; i < fn->params.size(); ++i)
      sub[fn->params[i]] = x->args[i];
    c.redex = substitute_many(fn->body, sub);
    return Stepped{std::move(c), Rule::BetaV, std::nullopt};
  }

  if (const auto* x = e.as<PrimApp>()) {
    auto v = delta(x->op, x->args);
    if (!v) return stuck(StuckReason::DeltaTypeTrap, std::move(c));
    c.redex = *v;
    return Stepped{std::move(c), Rule::OpEval, std::nullopt};
  }

  // A let with a value binding reaches here only through the propagation
  // phase; anything else is outside the evaluable grammar.
  if (const auto* x = e.as<Let>()) {
    if (x->bound->is<Var>())
      return stuck(StuckReason::UnboundLocation, std::move(c));
    c.redex = substitute(x->body, x->binder, x->bound);
    return Stepped{std::move(c), Rule::Let, std::nullopt};
  }

  return stuck(StuckReason::UnboundLocation, std::move(c));
}

RunResult run(const ExprPtr& e, long max_steps, const StepCallback& on_step) {
  Config c{Store{}, {}, e, 0};
  long steps = 0;
  for (;;) {
    StepOutcome out = step(c);
    if (auto* done = std::get_if<Done>(&out))
      return RunResult{*done, steps, done->store};
    if (auto* st = std::get_if<Stuck>(&out))
      return RunResult{*st, steps, st->config.store};
    auto& s = std::get<Stepped>(out);
    ++steps;
    if (on_step) on_step(steps, s.rule, s.config);
    c = std::move(s.config);
    if (steps >= max_steps) return RunResult{StepLimit{c}, steps, c.store};
  }
}

std::string store_to_string(const Store& s) {
  std::ostringstream os;
  os << '{';
  bool first_loc = true;
  for (const auto& [l, obj] : s) {
    if (!first_loc) os << ',';
    first_loc = false;
    os << 'l' << l << ":{";
    bool first_f = true;
    for (const auto& [f, v] : obj) {
      if (!first_f) os << ',';
      first_f = false;
      os << f << '=' << pretty_print(v);
    }
    os << '}';
  }
  os << '}';
  return os.str();
}

}  // namespace luc
