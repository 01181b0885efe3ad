#include "luc/typecheck.hpp"

#include <cassert>
#include <optional>
#include <set>
#include <sstream>

#include "luc/pretty.hpp"

namespace luc {

const char* type_error_kind_name(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::UnboundVariable: return "UnboundVariable";
    case TypeErrorKind::UnboundLocation: return "UnboundLocation";
    case TypeErrorKind::NotAnObjectVariable: return "NotAnObjectVariable";
    case TypeErrorKind::MissingField: return "MissingField";
    case TypeErrorKind::IndefiniteFieldType: return "IndefiniteFieldType";
    case TypeErrorKind::ConditionNotBool: return "ConditionNotBool";
    case TypeErrorKind::BranchJoinFailure: return "BranchJoinFailure";
    case TypeErrorKind::CallPreconditionFailure:
      return "CallPreconditionFailure";
    case TypeErrorKind::ArityMismatch: return "ArityMismatch";
    case TypeErrorKind::AnnotationMismatch: return "AnnotationMismatch";
    case TypeErrorKind::BreakPostconditionFailure:
      return "BreakPostconditionFailure";
    case TypeErrorKind::LabelPostconditionFailure:
      return "LabelPostconditionFailure";
    case TypeErrorKind::FilterEmptiesField: return "FilterEmptiesField";
    case TypeErrorKind::PrimopSignatureMismatch:
      return "PrimopSignatureMismatch";
  }
  return "?";
}

std::string TypeError::render(const std::string& filename) const {
  std::ostringstream os;
  os << filename << ':' << span.line << ':' << span.col << ": "
     << type_error_kind_name(kind) << " [" << rule << "]: " << detail;
  return os.str();
}

std::string fresh_var_name(int index) { return "X" + std::to_string(index); }

namespace {

struct CheckFail {
  TypeError err;
};

struct PrimSig {
  std::vector<TypePtr> params;
  TypePtr result;
};

const PrimSig& prim_sig(Op op) {
  static const PrimSig arith{{t_int(), t_int()}, t_int()};
  static const PrimSig cmp{{t_int(), t_int()}, t_bool()};
  static const PrimSig neg{{t_bool()}, t_bool()};
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul: return arith;
    case Op::Eq:
    case Op::Lt: return cmp;
    case Op::Not: return neg;
  }
  return arith;
}

struct Res {
  TypePtr type;
  ConstraintSet post;
};

class Checker {
 public:
  Checker(const LocEnv& locs, int next_fresh,
          const std::map<std::uint32_t, std::string>& hints,
          bool replay_weakening)
      : locs_(locs), next_fresh_(next_fresh), hints_(hints),
        replay_weakening_(replay_weakening) {
    if (replay_weakening_) {
      for (const auto& [_, t] : locs_)
        if (const auto* v = t->as<TypeVarRef>()) live_vars_.insert(v->name);
    }
  }

  Res check(const ConstraintSet& psi, const TypeEnv& env, const Expr& e);

  int next_fresh() const { return next_fresh_; }
  std::vector<std::pair<std::uint32_t, std::string>> take_new_vars() {
    return std::move(new_vars_);
  }

 private:
  const LocEnv& locs_;
  int next_fresh_;
  const std::map<std::uint32_t, std::string>& hints_;
  bool replay_weakening_;
  std::set<std::string> live_vars_;
  std::vector<std::pair<std::uint32_t, std::string>> new_vars_;

  // Entailment as used by the rule premises. Under replay weakening a
  // required binding on a variable that is neither known nor carried by
  // any location is vacuously satisfied.
  bool entails_here(const ConstraintSet& a, const ConstraintSet& b) const {
    if (!replay_weakening_) return entails(a, b);
    static const RecordType kEmpty;
    for (const auto& [var, rec] : b) {
      auto it = a.find(var);
      if (it == a.end()) {
        if (!live_vars_.count(var)) continue;  // vacuous at this store
        if (!entails_record(kEmpty, rec)) return false;
        continue;
      }
      if (!entails_record(it->second, rec)) return false;
    }
    return true;
  }

  [[noreturn]] static void err(TypeErrorKind kind, const Expr& e,
                               std::string rule, std::string detail) {
    throw CheckFail{TypeError{kind, e.span, std::move(rule),
                              std::move(detail)}};
  }

  // The subject of a field operation or ifhasattr must denote an object,
  // i.e. synthesize to a type variable. A subject that never yields a
  // value (its type is the internal never) marks the whole form as dead
  // code; callers return never with the constraints passed through.
  std::optional<std::string> subject_var(const ConstraintSet& psi,
                                         const TypeEnv& env,
                                         const Expr& subject,
                                         const char* rule) {
    Res r = check(psi, env, subject);
    if (r.type->is<NeverType>()) return std::nullopt;
    if (const auto* v = r.type->as<TypeVarRef>()) return v->name;
    err(TypeErrorKind::NotAnObjectVariable, subject, rule,
        "subject has type " + to_string(r.type) +
            ", which is not a type variable");
  }

  Res check_func(const ConstraintSet& psi, const TypeEnv& env,
                 const Expr& e, const FuncVal& f) {
    TypePtr annot = normalize_type(f.annot);
    const auto* arrow = annot->as<ArrowType>();
    if (!arrow)
      err(TypeErrorKind::AnnotationMismatch, e, "fdecl",
          "function annotation " + to_string(annot) +
              " is not a function type");
    if (arrow->params.size() != f.params.size())
      err(TypeErrorKind::ArityMismatch, e, "fdecl",
          "annotation lists " + std::to_string(arrow->params.size()) +
              " parameter types for " + std::to_string(f.params.size()) +
              " parameters");
    TypeEnv body_env = env;
    for (size_t i = 0; i < f.params.size(); ++i)
      body_env[f.params[i]] = arrow->params[i];
    Res body = check(arrow->pre, body_env, *f.body);
    if (!entails_type(body.type, arrow->result))
      err(TypeErrorKind::AnnotationMismatch, e, "fdecl",
          "body has type " + to_string(body.type) +
              " but the annotation declares " + to_string(arrow->result));
    if (!entails_here(body.post, arrow->post))
      err(TypeErrorKind::AnnotationMismatch, e, "fdecl",
          "body constraints " + to_string(body.post) +
              " do not entail the declared postcondition " +
              to_string(arrow->post));
    return {annot, psi};
  }

  // Shared by label and break: the type bound to a label must be a
  // zero-parameter arrow with an empty precondition.
  const ArrowType* label_arrow(const TypePtr& t, const Expr& e,
                               const char* rule) {
    const auto* arrow = t->as<ArrowType>();
    if (!arrow || !arrow->params.empty() || !arrow->pre.empty())
      err(TypeErrorKind::AnnotationMismatch, e, rule,
          to_string(t) + " is not a label type ([]() -> t [psi])");
    return arrow;
  }
};

Res Checker::check(const ConstraintSet& psi, const TypeEnv& env,
                   const Expr& e) {
  if (const auto* x = e.as<Var>()) {
    auto it = env.find(x->name);
    if (it == env.end())
      err(TypeErrorKind::UnboundVariable, e, "v-access",
          "variable " + x->name + " is not in scope");
    return {it->second, psi};
  }

  if (const auto* x = e.as<Lit>()) {
    return {t_base(x->value.base_name()), psi};
  }

  if (const auto* x = e.as<LocRef>()) {
    auto it = locs_.find(x->loc);
    if (it == locs_.end())
      err(TypeErrorKind::UnboundLocation, e, "l-access",
          "location @loc" + std::to_string(x->loc) +
              " is not in the location environment");
    return {it->second, psi};
  }

  if (e.is<New>()) {
    std::string name;
    auto hint = hints_.find(e.id);
    if (hint != hints_.end())
      name = hint->second;
    else
      name = fresh_var_name(next_fresh_++);
    new_vars_.emplace_back(e.id, name);
    ConstraintSet out = psi;
    out[name] = RecordType{};
    return {t_var(name), out};
  }

  if (const auto* x = e.as<FuncVal>()) {
    return check_func(psi, env, e, *x);
  }

  if (const auto* x = e.as<Let>()) {
    Res bound = check(psi, env, *x->bound);
    TypeEnv body_env = env;
    body_env[x->binder] = bound.type;
    return check(bound.post, body_env, *x->body);
  }

  if (const auto* x = e.as<Apply>()) {
    Res callee = check(psi, env, *x->callee);
    if (callee.type->is<NeverType>()) return {t_never(), callee.post};
    const auto* arrow = callee.type->as<ArrowType>();
    if (!arrow)
      err(TypeErrorKind::AnnotationMismatch, e, "fapp",
          "callee has type " + to_string(callee.type) +
              ", which is not a function type");
    if (arrow->params.size() != x->args.size())
      err(TypeErrorKind::ArityMismatch, e, "fapp",
          "function takes " + std::to_string(arrow->params.size()) +
              " arguments, got " + std::to_string(x->args.size()));
    ConstraintSet cur = callee.post;
    for (size_t i = 0; i < x->args.size(); ++i) {
      Res arg = check(cur, env, *x->args[i]);
      if (!entails_type(arg.type, arrow->params[i]))
        err(TypeErrorKind::CallPreconditionFailure, *x->args[i], "fapp",
            "argument " + std::to_string(i + 1) + " has type " +
                to_string(arg.type) + ", expected " +
                to_string(arrow->params[i]));
      cur = arg.post;
    }
    if (!entails_here(cur, arrow->pre))
      err(TypeErrorKind::CallPreconditionFailure, e, "fapp",
          "constraints at the call site (" + to_string(cur) +
              ") do not entail the precondition [" + to_string(arrow->pre) +
              "]");
    return {arrow->result, update(cur, arrow->post)};
  }

  if (const auto* x = e.as<PrimApp>()) {
    const PrimSig& sig = prim_sig(x->op);
    if (sig.params.size() != x->args.size())
      err(TypeErrorKind::ArityMismatch, e, "primop",
          std::string(op_name(x->op)) + " takes " +
              std::to_string(sig.params.size()) + " arguments, got " +
              std::to_string(x->args.size()));
    ConstraintSet cur = psi;
    for (size_t i = 0; i < x->args.size(); ++i) {
      Res arg = check(cur, env, *x->args[i]);
      if (!entails_type(arg.type, sig.params[i]))
        err(TypeErrorKind::PrimopSignatureMismatch, *x->args[i], "primop",
            std::string(op_name(x->op)) + " argument " +
                std::to_string(i + 1) + " has type " + to_string(arg.type) +
                ", expected " + to_string(sig.params[i]));
      cur = arg.post;
    }
    return {sig.result, cur};
  }

  if (const auto* x = e.as<If>()) {
    Res cond = check(psi, env, *x->cond);
    if (cond.type->is<NeverType>()) return {t_never(), cond.post};
    if (!type_equal(cond.type, t_bool()))
      err(TypeErrorKind::ConditionNotBool, *x->cond, "if",
          "condition has type " + to_string(cond.type) + ", expected bool");
    Res then_r = check(cond.post, env, *x->then_branch);
    Res else_r = check(cond.post, env, *x->else_branch);
    TypeResult a{then_r.type, then_r.post, 0, {}};
    TypeResult b{else_r.type, else_r.post, 0, {}};
    CheckResult joined = join_branches(a, b);
    if (auto* te = std::get_if<TypeError>(&joined)) {
      te->span = e.span;
      throw CheckFail{*te};
    }
    auto& r = std::get<TypeResult>(joined);
    return {r.type, r.post};
  }

  if (const auto* x = e.as<IfHasAttr>()) {
    std::optional<std::string> subject =
        subject_var(psi, env, *x->subject, "ifhasattr");
    if (!subject) return {t_never(), psi};
    const std::string& var = *subject;
    auto filtered = filter_attr(psi, var, x->attr);
    if (!filtered)
      err(TypeErrorKind::FilterEmptiesField, e, "ifhasattr",
          "field " + x->attr + " of " + var +
              " can only be absent; the positive branch is unreachable");
    Res then_r = check(*filtered, env, *x->then_branch);
    Res else_r = check(psi, env, *x->else_branch);
    TypeResult a{then_r.type, then_r.post, 0, {}};
    TypeResult b{else_r.type, else_r.post, 0, {}};
    CheckResult joined = join_branches(a, b);
    if (auto* te = std::get_if<TypeError>(&joined)) {
      te->span = e.span;
      throw CheckFail{*te};
    }
    auto& r = std::get<TypeResult>(joined);
    return {r.type, r.post};
  }

  if (const auto* x = e.as<Labeled>()) {
    TypePtr annot = normalize_type(x->annot);
    const ArrowType* arrow = label_arrow(annot, e, "label");
    TypeEnv body_env = env;
    body_env[x->label] = annot;
    Res body = check(psi, body_env, *x->body);
    if (!entails_type(body.type, arrow->result))
      err(TypeErrorKind::LabelPostconditionFailure, e, "label",
          "body has type " + to_string(body.type) +
              " but the label declares " + to_string(arrow->result));
    if (!entails_here(body.post, arrow->post))
      err(TypeErrorKind::LabelPostconditionFailure, e, "label",
          "body constraints " + to_string(body.post) +
              " do not entail the label postcondition " +
              to_string(arrow->post));
    return {arrow->result, arrow->post};
  }

  if (const auto* x = e.as<Break>()) {
    auto it = env.find(x->label);
    if (it == env.end())
      err(TypeErrorKind::UnboundVariable, e, "break",
          "label " + x->label + " is not in scope");
    const ArrowType* arrow = label_arrow(it->second, e, "break");
    Res arg = check(psi, env, *x->arg);
    if (!entails_type(arg.type, arrow->result))
      err(TypeErrorKind::BreakPostconditionFailure, e, "break",
          "break value has type " + to_string(arg.type) +
              " but label " + x->label + " expects " +
              to_string(arrow->result));
    if (!entails_here(arg.post, arrow->post))
      err(TypeErrorKind::BreakPostconditionFailure, e, "break",
          "constraints at break (" + to_string(arg.post) +
              ") do not entail the label postcondition " +
              to_string(arrow->post));
    // A break never returns normally; its result type is absorbed by any
    // join and the input constraints pass through.
    return {t_never(), psi};
  }

  if (const auto* x = e.as<FieldGet>()) {
    std::optional<std::string> subject =
        subject_var(psi, env, *x->subject, "access");
    if (!subject) return {t_never(), psi};
    const std::string& var = *subject;
    auto vit = psi.find(var);
    if (vit == psi.end())
      err(TypeErrorKind::MissingField, e, "access",
          "no constraint describes " + var);
    auto fit = vit->second.find(x->field);
    if (fit == vit->second.end())
      err(TypeErrorKind::MissingField, e, "access",
          var + " is not known to have field " + x->field);
    if (!is_definite(fit->second))
      err(TypeErrorKind::IndefiniteFieldType, e, "access",
          "field " + x->field + " has indefinite type " +
              to_string(fit->second) + " (may be absent)");
    return {fit->second, psi};
  }

  if (const auto* x = e.as<FieldSet>()) {
    std::optional<std::string> subject =
        subject_var(psi, env, *x->subject, "update");
    if (!subject) return {t_never(), psi};
    const std::string& var = *subject;
    Res value = check(psi, env, *x->value);
    ConstraintSet out = value.post;
    auto vit = out.find(var);
    if (vit == out.end())
      err(TypeErrorKind::MissingField, e, "update",
          "no constraint describes " + var);
    vit->second[x->field] = value.type;
    return {value.type, out};
  }

  assert(false && "unhandled expression alternative");
  throw CheckFail{TypeError{TypeErrorKind::AnnotationMismatch, e.span,
                            "internal", "unhandled expression"}};
}

}  // namespace

CheckResult join_branches(const TypeResult& a, const TypeResult& b) {
  ConstraintSet post = merge(a.post, b.post);
  TypePtr type;
  if (a.type->is<NeverType>())
    type = b.type;
  else if (b.type->is<NeverType>())
    type = a.type;
  else if (type_equal(a.type, b.type))
    type = normalize_type(a.type);
  else
    type = t_or({a.type, b.type});
  int next = std::max(a.next_fresh, b.next_fresh);
  return TypeResult{std::move(type), std::move(post), next, {}};
}

CheckResult synthesize(const TypeState& state, const ExprPtr& e) {
  Checker checker(state.locs, state.next_fresh, state.new_var_hints,
                  state.replay_weakening);
  try {
    Res r = checker.check(state.pre, state.env, *e);
    assert(!contains_bottom(r.type));
    return TypeResult{normalize_type(r.type), normalize_constraints(r.post),
                      checker.next_fresh(), checker.take_new_vars()};
  } catch (const CheckFail& f) {
    return f.err;
  }
}

CheckResult typecheck_program(const ExprPtr& e) {
  CheckResult r = synthesize(TypeState{}, e);
  if (const auto* res = std::get_if<TypeResult>(&r)) {
    for (const auto& d : disjuncts(res->type)) {
      if (const auto* v = d->as<TypeVarRef>()) {
        if (!res->post.count(v->name))
          return TypeError{TypeErrorKind::AnnotationMismatch, e->span,
                           "program",
                           "result type mentions " + v->name +
                               ", which the final constraints do not "
                               "describe"};
      }
    }
  }
  return r;
}

}  // namespace luc
