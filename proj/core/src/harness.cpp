#include "luc/harness.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

#include "luc/constraints.hpp"
#include "luc/parser.hpp"
#include "luc/pretty.hpp"

namespace luc {

// ---------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : state_(seed) {
  // Warm up so small seeds do not produce correlated streams.
  for (int i = 0; i < 4; ++i) splitmix64(state_);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

std::uint32_t Rng::below(std::uint32_t bound) {
  assert(bound > 0);
  return static_cast<std::uint32_t>(next_u64() % bound);
}

bool Rng::chance(std::uint32_t num, std::uint32_t den) {
  return below(den) < num;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  splitmix64(s);
  return s;
}

// ---------------------------------------------------------------------
// Program generation
// ---------------------------------------------------------------------

namespace {

const char* const kFieldPool[] = {"a", "b", "c", "d", "e", "f"};
constexpr int kFieldPoolSize = 6;

void collect_type_vars(const TypePtr& t, std::set<std::string>& out) {
  if (const auto* v = t->as<TypeVarRef>()) {
    out.insert(v->name);
    return;
  }
  if (const auto* o = t->as<OrType>())
    for (const auto& a : o->alts) collect_type_vars(a, out);
  if (const auto* f = t->as<ArrowType>()) {
    for (const auto& [_, rec] : f->pre)
      for (const auto& [__, ft] : rec) collect_type_vars(ft, out);
    for (const auto& p : f->params) collect_type_vars(p, out);
    collect_type_vars(f->result, out);
    for (const auto& [_, rec] : f->post)
      for (const auto& [__, ft] : rec) collect_type_vars(ft, out);
  }
}

bool mentions_any(const TypePtr& t, const std::set<std::string>& vars) {
  std::set<std::string> seen;
  collect_type_vars(t, seen);
  for (const auto& v : seen)
    if (vars.count(v)) return true;
  return false;
}

class ProgramGen {
 public:
  explicit ProgramGen(Rng& rng) : rng_(rng) {}

  ExprPtr gen_program(int depth) {
    Ctx ctx;
    Out g = gen_any(ctx, depth);
    return g.expr;
  }

 private:
  struct Binding {
    std::string name;
    TypePtr type;
  };
  struct Ctx {
    ConstraintSet psi;
    std::vector<Binding> env;
  };
  struct Out {
    ExprPtr expr;
    TypePtr type;
    ConstraintSet post;
  };
  struct LabelScope {
    std::string name;
    TypePtr target;
    std::vector<ConstraintSet> exit_posts;
  };

  Rng& rng_;
  int fresh_ = 0;  // mirrors the checker's fresh-variable counter
  int name_ = 0;
  int label_ = 0;
  std::vector<LabelScope> labels_;

  std::string fresh_term_name() { return "v" + std::to_string(name_++); }
  std::string fresh_param_name() { return "p" + std::to_string(name_++); }
  std::string fresh_label_name() { return "n" + std::to_string(label_++); }
  std::string pick_field() { return kFieldPool[rng_.below(kFieldPoolSize)]; }

  TypePtr pick_base() {
    switch (rng_.below(3)) {
      case 0: return t_int();
      case 1: return t_bool();
      default: return t_str();
    }
  }

  Out literal_of(const Ctx& ctx, const TypePtr& base) {
    const auto* b = base->as<BaseType>();
    assert(b);
    if (b->name == "int")
      return {e_int(static_cast<std::int64_t>(rng_.below(100))), t_int(),
              ctx.psi};
    if (b->name == "bool")
      return {e_bool(rng_.chance(1, 2)), t_bool(), ctx.psi};
    static const char* const strs[] = {"hi", "luc", "x", "obj", ""};
    return {e_str(strs[rng_.below(5)]), t_str(), ctx.psi};
  }

  Out any_literal(const Ctx& ctx) { return literal_of(ctx, pick_base()); }

  // Environment variables of object kind: a type-variable type that the
  // current constraints still describe.
  std::vector<const Binding*> object_vars(const Ctx& ctx) {
    std::vector<const Binding*> out;
    for (const auto& b : ctx.env) {
      if (const auto* v = b.type->as<TypeVarRef>())
        if (ctx.psi.count(v->name)) out.push_back(&b);
    }
    return out;
  }

  const Binding* pick_var_of_type(const Ctx& ctx, const TypePtr& t) {
    std::vector<const Binding*> out;
    for (const auto& b : ctx.env)
      if (type_equal(b.type, t)) out.push_back(&b);
    if (out.empty()) return nullptr;
    return out[rng_.below(static_cast<std::uint32_t>(out.size()))];
  }

  // ----- productions -----

  Out gen_new(Ctx& ctx) {
    std::string x = fresh_var_name(fresh_++);
    ConstraintSet post = ctx.psi;
    post[x] = RecordType{};
    return {e_new(), t_var(x), std::move(post)};
  }

  Out gen_let(Ctx& ctx, int depth) {
    Out bound = gen_any(ctx, depth - 1);
    std::string name = fresh_term_name();
    Ctx body_ctx{bound.post, ctx.env};
    body_ctx.env.push_back({name, bound.type});
    Out body = gen_any(body_ctx, depth - 1);
    return {e_let(name, bound.expr, body.expr), body.type, body.post};
  }

  // A value-shaped right-hand side: literal, in-scope variable, or a
  // tiny closed function.
  Out gen_rhs_value(Ctx& ctx, int depth) {
    if (depth > 0 && !ctx.env.empty() && rng_.chance(1, 3)) {
      const Binding& b =
          ctx.env[rng_.below(static_cast<std::uint32_t>(ctx.env.size()))];
      return {e_var(b.name), b.type, ctx.psi};
    }
    if (depth > 1 && rng_.chance(1, 6)) {
      TypePtr annot = t_arrow({}, {t_int()}, t_int(), {});
      std::string p = fresh_param_name();
      return {e_func({p}, annot, e_var(p)), annot, ctx.psi};
    }
    return any_literal(ctx);
  }

  std::optional<Out> gen_fieldset(Ctx& ctx, int depth) {
    auto objs = object_vars(ctx);
    if (objs.empty()) return std::nullopt;
    const Binding* obj = objs[rng_.below(static_cast<std::uint32_t>(objs.size()))];
    const std::string var = obj->type->as<TypeVarRef>()->name;
    std::string field = pick_field();
    Out rhs = gen_rhs_value(ctx, depth);
    ConstraintSet post = rhs.post;
    post[var][field] = rhs.type;
    return Out{e_fieldset(e_var(obj->name), field, rhs.expr), rhs.type,
               std::move(post)};
  }

  std::optional<Out> gen_fieldget(Ctx& ctx, const TypePtr* want) {
    auto objs = object_vars(ctx);
    std::vector<std::pair<const Binding*, std::string>> candidates;
    for (const auto* obj : objs) {
      const std::string var = obj->type->as<TypeVarRef>()->name;
      for (const auto& [field, ft] : ctx.psi.at(var)) {
        if (!is_definite(ft)) continue;
        if (want && !type_equal(ft, *want)) continue;
        candidates.emplace_back(obj, field);
      }
    }
    if (candidates.empty()) return std::nullopt;
    auto& [obj, field] =
        candidates[rng_.below(static_cast<std::uint32_t>(candidates.size()))];
    TypePtr t = ctx.psi.at(obj->type->as<TypeVarRef>()->name).at(field);
    return Out{e_fieldget(e_var(obj->name), field), t, ctx.psi};
  }

  Out join(const Out& cond_or_prefix, ExprPtr expr, const Out& a,
           const Out& b) {
    (void)cond_or_prefix;
    TypePtr type;
    if (a.type->is<NeverType>())
      type = b.type;
    else if (b.type->is<NeverType>())
      type = a.type;
    else if (type_equal(a.type, b.type))
      type = normalize_type(a.type);
    else
      type = t_or({a.type, b.type});
    return {std::move(expr), type, merge(a.post, b.post)};
  }

  Out gen_if(Ctx& ctx, int depth) {
    Out cond = gen_typed(ctx, t_bool(), depth - 1, false);
    Ctx branch_ctx{cond.post, ctx.env};

    // Updating the same object differently in the two branches gives the
    // merge something to reconcile.
    auto objs = object_vars(branch_ctx);
    if (!objs.empty() && rng_.chance(1, 2)) {
      const Binding* obj =
          objs[rng_.below(static_cast<std::uint32_t>(objs.size()))];
      const std::string var = obj->type->as<TypeVarRef>()->name;
      std::string f1 = pick_field();
      std::string f2 = pick_field();
      Out v1 = any_literal(branch_ctx);
      Out v2 = any_literal(branch_ctx);
      ConstraintSet p1 = branch_ctx.psi;
      p1[var][f1] = v1.type;
      ConstraintSet p2 = branch_ctx.psi;
      p2[var][f2] = v2.type;
      Out a{e_fieldset(e_var(obj->name), f1, v1.expr), v1.type, p1};
      Out b{e_fieldset(e_var(obj->name), f2, v2.expr), v2.type, p2};
      return join(cond, e_if(cond.expr, a.expr, b.expr), a, b);
    }

    Out a = gen_any(branch_ctx, depth - 1);
    Out b = gen_any(branch_ctx, depth - 1);
    return join(cond, e_if(cond.expr, a.expr, b.expr), a, b);
  }

  std::optional<Out> gen_ifhasattr(Ctx& ctx, int depth) {
    auto objs = object_vars(ctx);
    if (objs.empty()) return std::nullopt;
    const Binding* obj = objs[rng_.below(static_cast<std::uint32_t>(objs.size()))];
    const std::string var = obj->type->as<TypeVarRef>()->name;
    std::string attr;
    const RecordType& rec = ctx.psi.at(var);
    if (!rec.empty() && rng_.chance(2, 3)) {
      auto it = rec.begin();
      std::advance(it, rng_.below(static_cast<std::uint32_t>(rec.size())));
      attr = it->first;
    } else {
      attr = pick_field();
    }
    auto filtered = filter_attr(ctx.psi, var, attr);
    if (!filtered) return std::nullopt;
    Ctx then_ctx{*filtered, ctx.env};
    Out a = gen_any(then_ctx, depth - 1);
    Ctx else_ctx{ctx.psi, ctx.env};
    Out b = gen_any(else_ctx, depth - 1);
    return join(a, e_ifhasattr(e_var(obj->name), attr, a.expr, b.expr), a, b);
  }

  // Declares a function against the current constraints and applies it,
  // or leaves it bound for later application.
  std::optional<Out> gen_func_apply(Ctx& ctx, int depth) {
    ConstraintSet pre = ctx.psi;

    int nparams = static_cast<int>(rng_.below(3));
    std::vector<TypePtr> param_types;
    std::vector<ExprPtr> args;
    for (int i = 0; i < nparams; ++i) {
      auto objs = object_vars(ctx);
      if (!objs.empty() && rng_.chance(1, 3)) {
        const Binding* obj =
            objs[rng_.below(static_cast<std::uint32_t>(objs.size()))];
        param_types.push_back(obj->type);
        args.push_back(e_var(obj->name));
      } else {
        TypePtr base = pick_base();
        param_types.push_back(base);
        Ctx tmp{ctx.psi, ctx.env};
        Out lit = literal_of(tmp, base);
        args.push_back(lit.expr);
      }
    }

    std::vector<std::string> params;
    Ctx body_ctx{pre, ctx.env};
    for (const auto& pt : param_types) {
      std::string p = fresh_param_name();
      params.push_back(p);
      body_ctx.env.push_back({p, pt});
    }

    // Breaks may not cross a function boundary: the label frame need not
    // be live when the function is eventually applied.
    std::vector<LabelScope> saved_labels;
    saved_labels.swap(labels_);
    int fresh_before = fresh_;
    Out body = gen_any(body_ctx, depth - 1);
    saved_labels.swap(labels_);

    std::set<std::string> minted;
    for (int i = fresh_before; i < fresh_; ++i)
      minted.insert(fresh_var_name(i));

    // The annotation must not mention variables minted inside the body:
    // their names are positional and would not survive re-checking.
    ExprPtr body_expr = body.expr;
    TypePtr result = body.type;
    if (result->is<NeverType>() || mentions_any(result, minted)) {
      Ctx lit_ctx{body.post, body_ctx.env};
      Out lit = any_literal(lit_ctx);
      body_expr = e_let(fresh_term_name(), body_expr, lit.expr);
      result = lit.type;
    }
    ConstraintSet post_annot;
    for (const auto& [v, rec] : body.post) {
      if (minted.count(v)) continue;
      RecordType kept;
      for (const auto& [f, ft] : rec)
        if (!mentions_any(ft, minted)) kept[f] = ft;
      post_annot[v] = std::move(kept);
    }

    TypePtr annot = t_arrow(pre, param_types, result, post_annot);
    ExprPtr fn = e_func(params, annot, body_expr);

    if (rng_.chance(1, 3)) {
      // Bind it; later productions may apply it through the variable.
      std::string name = fresh_term_name();
      Ctx cont_ctx{ctx.psi, ctx.env};
      cont_ctx.env.push_back({name, annot});
      Out cont = gen_any(cont_ctx, depth - 1);
      return Out{e_let(name, fn, cont.expr), cont.type, cont.post};
    }

    ConstraintSet out_post = update(ctx.psi, post_annot);
    return Out{e_apply(fn, args), result, std::move(out_post)};
  }

  std::optional<Out> gen_apply_existing(Ctx& ctx) {
    std::vector<const Binding*> funcs;
    for (const auto& b : ctx.env) {
      const auto* arrow = b.type->as<ArrowType>();
      if (!arrow) continue;
      if (!arrow->pre.empty() && !entails(ctx.psi, arrow->pre)) continue;
      if (!entails(ctx.psi, arrow->pre)) continue;
      funcs.push_back(&b);
    }
    if (funcs.empty()) return std::nullopt;
    const Binding* f = funcs[rng_.below(static_cast<std::uint32_t>(funcs.size()))];
    const auto* arrow = f->type->as<ArrowType>();
    std::vector<ExprPtr> args;
    for (const auto& pt : arrow->params) {
      if (pt->is<BaseType>()) {
        Ctx tmp{ctx.psi, ctx.env};
        args.push_back(literal_of(tmp, pt).expr);
        continue;
      }
      const Binding* arg = pick_var_of_type(ctx, pt);
      if (!arg) return std::nullopt;
      args.push_back(e_var(arg->name));
    }
    ConstraintSet post = update(ctx.psi, arrow->post);
    return Out{e_apply(e_var(f->name), args), arrow->result, std::move(post)};
  }

  Out gen_labeled(Ctx& ctx, int depth, const TypePtr* want = nullptr) {
    TypePtr target = want ? *want : pick_base();
    std::string name = fresh_label_name();
    labels_.push_back({name, target, {}});
    Out body = gen_typed(ctx, target, depth - 1, true);
    LabelScope scope = std::move(labels_.back());
    labels_.pop_back();

    // The label postcondition must be entailed by the body's exit and by
    // every break site: keep the variables they all describe, with their
    // records branch-merged.
    std::vector<const ConstraintSet*> exits;
    exits.push_back(&body.post);
    for (const auto& p : scope.exit_posts) exits.push_back(&p);
    ConstraintSet annot_post;
    for (const auto& [v, rec] : *exits[0]) {
      bool everywhere = true;
      RecordType acc = rec;
      for (size_t i = 1; i < exits.size() && everywhere; ++i) {
        auto it = exits[i]->find(v);
        if (it == exits[i]->end())
          everywhere = false;
        else
          acc = merge_records(acc, it->second);
      }
      if (everywhere) annot_post[v] = std::move(acc);
    }

    TypePtr annot = t_arrow({}, {}, target, annot_post);
    return {e_labeled(name, annot, body.expr), target, annot_post};
  }

  std::optional<Out> gen_break(Ctx& ctx, int depth) {
    if (labels_.empty()) return std::nullopt;
    size_t idx = rng_.below(static_cast<std::uint32_t>(labels_.size()));
    std::string name = labels_[idx].name;
    TypePtr target = labels_[idx].target;
    Out arg = gen_typed(ctx, target, std::min(depth - 1, 2), true);
    labels_[idx].exit_posts.push_back(arg.post);
    // A break never returns; constraints pass through unchanged.
    return Out{e_break(name, arg.expr), t_never(), ctx.psi};
  }

  std::optional<Out> gen_primop(Ctx& ctx, int depth, const TypePtr& want) {
    const auto* b = want->as<BaseType>();
    if (!b || b->name == "str") return std::nullopt;
    if (b->name == "int") {
      Op op = static_cast<Op>(rng_.below(3));  // add, sub, mul
      Out a1 = gen_typed(ctx, t_int(), depth - 1, true);
      Ctx c2{a1.post, ctx.env};
      Out a2 = gen_typed(c2, t_int(), depth - 1, true);
      return Out{e_prim(op, {a1.expr, a2.expr}), t_int(), a2.post};
    }
    if (rng_.chance(1, 3)) {
      Out a = gen_typed(ctx, t_bool(), depth - 1, true);
      return Out{e_prim(Op::Not, {a.expr}), t_bool(), a.post};
    }
    Op op = rng_.chance(1, 2) ? Op::Eq : Op::Lt;
    Out a1 = gen_typed(ctx, t_int(), depth - 1, true);
    Ctx c2{a1.post, ctx.env};
    Out a2 = gen_typed(c2, t_int(), depth - 1, true);
    return Out{e_prim(op, {a1.expr, a2.expr}), t_bool(), a2.post};
  }

  // An expression of exactly the given base type (or never, when a break
  // is allowed to stand in).
  Out gen_typed(Ctx& ctx, const TypePtr& want, int depth, bool never_ok) {
    if (depth <= 0) return literal_of(ctx, want);
    enum {
      kLit, kVar, kFieldGet, kPrimop, kIf, kLet, kBreak, kLabeled,
      kIfHasAttr, kCount
    };
    static const std::uint32_t deep[kCount] = {1, 3, 3, 5, 4, 5, 2, 2, 3};
    static const std::uint32_t shallow[kCount] = {5, 4, 3, 3, 1, 1, 1, 0, 1};
    const std::uint32_t* w = depth >= 2 ? deep : shallow;
    std::uint32_t total = 0;
    for (int i = 0; i < kCount; ++i) total += w[i];
    for (int attempt = 0; attempt < 10; ++attempt) {
      std::uint32_t roll = rng_.below(total);
      int pick = 0;
      while (roll >= w[pick]) roll -= w[pick++];
      switch (pick) {
        case kLit:
          return literal_of(ctx, want);
        case kVar: {
          const Binding* b = pick_var_of_type(ctx, want);
          if (!b) break;
          return {e_var(b->name), want, ctx.psi};
        }
        case kFieldGet: {
          auto r = gen_fieldget(ctx, &want);
          if (!r) break;
          return *r;
        }
        case kPrimop: {
          auto r = gen_primop(ctx, depth, want);
          if (!r) break;
          return *r;
        }
        case kIf: {
          Out cond = gen_typed(ctx, t_bool(), depth - 1, false);
          Ctx bctx{cond.post, ctx.env};
          Out a = gen_typed(bctx, want, depth - 1, false);
          Out b = gen_typed(bctx, want, depth - 1, true);
          return join(cond, e_if(cond.expr, a.expr, b.expr), a, b);
        }
        case kLet: {
          Out bound = gen_any(ctx, depth - 1);
          std::string name = fresh_term_name();
          Ctx bctx{bound.post, ctx.env};
          bctx.env.push_back({name, bound.type});
          Out body = gen_typed(bctx, want, depth - 1, never_ok);
          return {e_let(name, bound.expr, body.expr), body.type, body.post};
        }
        case kBreak: {
          if (!never_ok || labels_.empty()) break;
          auto r = gen_break(ctx, depth);
          if (!r) break;
          return *r;
        }
        case kLabeled: {
          if (depth < 2) break;
          return gen_labeled(ctx, depth - 1, &want);
        }
        case kIfHasAttr: {
          auto objs = object_vars(ctx);
          if (objs.empty()) break;
          const Binding* obj =
              objs[rng_.below(static_cast<std::uint32_t>(objs.size()))];
          const std::string var = obj->type->as<TypeVarRef>()->name;
          std::string attr = pick_field();
          auto filtered = filter_attr(ctx.psi, var, attr);
          if (!filtered) break;
          Ctx tctx{*filtered, ctx.env};
          Out a = gen_typed(tctx, want, depth - 1, false);
          Ctx ectx{ctx.psi, ctx.env};
          Out b = gen_typed(ectx, want, depth - 1, true);
          return join(a, e_ifhasattr(e_var(obj->name), attr, a.expr, b.expr),
                      a, b);
        }
      }
    }
    return literal_of(ctx, want);
  }

  Out gen_any(Ctx& ctx, int depth) {
    if (depth <= 0) return any_literal(ctx);

    // Case index by weight; leaf productions stay rare while the depth
    // budget lasts.
    enum {
      kLit, kVar, kNew, kLet, kFieldSet, kFieldGet, kIf, kIfHasAttr,
      kFuncApply, kLabeled, kApplyExisting, kBreak, kCount
    };
    static const std::uint32_t deep[kCount] = {1, 2, 3, 9, 6, 3,
                                               5, 4, 5, 4, 3, 2};
    static const std::uint32_t shallow[kCount] = {4, 4, 4, 3, 4, 3,
                                                  2, 2, 0, 0, 2, 1};
    const std::uint32_t* w = depth >= 2 ? deep : shallow;
    std::uint32_t total = 0;
    for (int i = 0; i < kCount; ++i) total += w[i];

    for (int attempt = 0; attempt < 12; ++attempt) {
      std::uint32_t roll = rng_.below(total);
      int pick = 0;
      while (roll >= w[pick]) roll -= w[pick++];
      switch (pick) {
        case kLit:
          return any_literal(ctx);
        case kVar: {
          if (ctx.env.empty()) break;
          const Binding& b =
              ctx.env[rng_.below(static_cast<std::uint32_t>(ctx.env.size()))];
          return {e_var(b.name), b.type, ctx.psi};
        }
        case kNew:
          return gen_new(ctx);
        case kLet:
          return gen_let(ctx, depth);
        case kFieldSet: {
          auto r = gen_fieldset(ctx, depth);
          if (!r) break;
          return *r;
        }
        case kFieldGet: {
          auto r = gen_fieldget(ctx, nullptr);
          if (!r) break;
          return *r;
        }
        case kIf:
          return gen_if(ctx, depth);
        case kIfHasAttr: {
          auto r = gen_ifhasattr(ctx, depth);
          if (!r) break;
          return *r;
        }
        case kFuncApply: {
          if (depth < 2) break;
          auto r = gen_func_apply(ctx, depth);
          if (!r) break;
          return *r;
        }
        case kLabeled:
          if (depth < 2) break;
          return gen_labeled(ctx, depth);
        case kApplyExisting: {
          auto r = gen_apply_existing(ctx);
          if (!r) break;
          return *r;
        }
        case kBreak: {
          if (labels_.empty()) break;
          auto r = gen_break(ctx, depth);
          if (!r) break;
          return *r;
        }
      }
    }
    return any_literal(ctx);
  }
};

}  // namespace

ExprPtr generate_program(std::uint64_t seed, int depth) {
  Rng rng(mix_seed(seed, 0xa11c0de));
  ProgramGen gen(rng);
  ExprPtr e = gen.gen_program(depth);
  std::uint32_t next_id = 0;
  return assign_ids(e, next_id);
}

// ---------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::ProgressViolation: return "ProgressViolation";
    case Verdict::SoundnessViolation: return "SoundnessViolation";
    case Verdict::SubjectReductionViolation:
      return "SubjectReductionViolation";
    case Verdict::Diverged: return "Diverged";
    case Verdict::Rejected: return "Rejected";
  }
  return "?";
}

namespace {

// Location typing for a trace: each location is named by the static
// variable of the new that allocated it; superseded allocations (the
// same new fired again) fall back to reserved Z-names.
LocEnv trace_loc_env(const std::map<LocId, std::uint32_t>& alloc_node,
                     const std::map<std::uint32_t, LocId>& latest,
                     const std::map<std::uint32_t, std::string>& static_vars) {
  LocEnv out;
  for (const auto& [l, node] : alloc_node) {
    auto lit = latest.find(node);
    auto sit = static_vars.find(node);
    if (lit != latest.end() && lit->second == l && sit != static_vars.end())
      out[l] = t_var(sit->second);
    else
      out[l] = t_var("Z" + std::to_string(l));
  }
  return out;
}

bool replay_typing(const Config& c, const LocEnv& locs, const TypePtr& t_orig,
                   const ConstraintSet& psi2_orig,
                   const std::map<std::uint32_t, std::string>& static_vars,
                   int counter_start, std::string& details) {
  ExprPtr residual = plug(c.stack, c.redex);
  ConstraintSet psi_in = extract_store_typing(c.store, locs);
  TypeState st;
  st.pre = psi_in;
  st.locs = locs;
  st.next_fresh = counter_start;
  // Pin the variables the original check gave to the remaining news, so
  // annotations written against those names still line up, and let
  // bindings on location-free variables be assumed.
  st.new_var_hints = static_vars;
  st.replay_weakening = true;
  CheckResult cr = synthesize(st, residual);
  if (const auto* err = std::get_if<TypeError>(&cr)) {
    details = "residual no longer typechecks: " + err->render();
    return false;
  }
  const auto& r = std::get<TypeResult>(cr);
  const TypePtr& t_replay = r.type;
  const ConstraintSet& psi_replay = r.post;
  if (!entails_type(t_replay, t_orig)) {
    details = "residual type " + to_string(t_replay) +
              " does not entail the original type " + to_string(t_orig);
    return false;
  }
  // Bindings of the original typing that the residual's typing does not
  // mention at all are conjurable by the branch-merge weakening rule
  // (they describe allocations on paths not taken).
  for (const auto& [var, rec] : psi2_orig) {
    auto it = psi_replay.find(var);
    if (it == psi_replay.end()) continue;
    if (!entails_record(it->second, rec)) {
      details = "constraint for " + var + " (" + to_string(it->second) +
                ") does not entail the original " + to_string(rec);
      return false;
    }
  }
  return true;
}

}  // namespace

TrialReport soundness_trial(const ExprPtr& e, std::uint64_t seed,
                            const TrialOptions& opts) {
  TrialReport report;
  report.program = pretty_print(e);
  report.seed = seed;

  TypePtr t_orig;
  ConstraintSet psi2_orig;
  std::map<std::uint32_t, std::string> static_vars;
  int counter_end = 0;
  bool typed = false;

  if (!opts.skip_typecheck) {
    CheckResult cr = typecheck_program(e);
    if (const auto* err = std::get_if<TypeError>(&cr)) {
      report.verdict = Verdict::Rejected;
      report.details = err->render();
      return report;
    }
    const auto& r = std::get<TypeResult>(cr);
    t_orig = r.type;
    psi2_orig = r.post;
    counter_end = r.next_fresh;
    for (const auto& [node, var] : r.new_vars) static_vars[node] = var;
    typed = true;
  }

  Config c{Store{}, {}, e, 0};
  std::map<LocId, std::uint32_t> alloc_node;
  std::map<std::uint32_t, LocId> latest;
  long steps = 0;
  SatCache cache;
  cache.new_var_hints = static_vars;

  for (;;) {
    StepOutcome out = step(c);

    if (auto* done = std::get_if<Done>(&out)) {
      report.steps = steps;
      if (!typed) {
        report.verdict = Verdict::Pass;
        report.details = "finished (unchecked)";
        return report;
      }
      LocEnv locs = trace_loc_env(alloc_node, latest, static_vars);
      bool v_ok =
          satisfies_value(done->store, locs, done->value, t_orig, &cache);
      bool c_ok = satisfies_constraints(done->store, locs, psi2_orig, &cache);
      if (v_ok && c_ok) {
        report.verdict = Verdict::Pass;
      } else {
        report.verdict = Verdict::SoundnessViolation;
        std::ostringstream os;
        os << "final value " << pretty_print(done->value);
        if (!v_ok) os << " does not satisfy type " << to_string(t_orig);
        if (!c_ok)
          os << (v_ok ? " store" : "; store")
             << " does not satisfy " << to_string(psi2_orig);
        os << "; store=" << store_to_string(done->store);
        report.details = os.str();
      }
      return report;
    }

    if (auto* st = std::get_if<Stuck>(&out)) {
      report.steps = steps;
      if (!typed) {
        report.verdict = Verdict::Pass;
        report.details = std::string("stuck (unchecked): ") +
                         stuck_reason_name(st->reason);
        return report;
      }
      report.verdict = Verdict::ProgressViolation;
      report.details = std::string("stuck: ") + stuck_reason_name(st->reason) +
                       " at " + pretty_print(st->config.redex);
      return report;
    }

    auto& stepped = std::get<Stepped>(out);
    ++steps;
    if (stepped.alloc) {
      auto [node, loc] = *stepped.alloc;
      alloc_node[loc] = node;
      latest[node] = loc;
    }
    c = std::move(stepped.config);

    if (typed && opts.subject_reduction) {
      LocEnv locs = trace_loc_env(alloc_node, latest, static_vars);
      std::string details;
      if (!replay_typing(c, locs, t_orig, psi2_orig, static_vars, counter_end,
                         details)) {
        report.steps = steps;
        report.verdict = Verdict::SubjectReductionViolation;
        report.details = "after step " + std::to_string(steps) + ": " +
                         details;
        return report;
      }
    }

    if (steps >= opts.max_steps) {
      report.steps = steps;
      report.verdict = Verdict::Diverged;
      report.details = "step limit reached";
      return report;
    }
  }
}

FuzzSummary run_fuzz(const FuzzOptions& opts) {
  FuzzSummary summary;
  TrialOptions trial_opts;
  trial_opts.max_steps = opts.max_steps;
  trial_opts.subject_reduction = opts.subject_reduction;
  for (int i = 0; i < opts.count; ++i) {
    std::uint64_t trial_seed = mix_seed(opts.seed, i);
    ExprPtr e = generate_program(trial_seed, opts.depth);
    TrialReport r = soundness_trial(e, trial_seed, trial_opts);
    ++summary.total;
    switch (r.verdict) {
      case Verdict::Pass: ++summary.pass; break;
      case Verdict::Diverged: ++summary.diverged; break;
      case Verdict::ProgressViolation:
        ++summary.progress_violations;
        summary.failures.push_back(r);
        break;
      case Verdict::SoundnessViolation:
        ++summary.soundness_violations;
        summary.failures.push_back(r);
        break;
      case Verdict::SubjectReductionViolation:
        ++summary.subject_reduction_violations;
        summary.failures.push_back(r);
        break;
      case Verdict::Rejected:
        ++summary.rejected;
        summary.failures.push_back(r);
        break;
    }
  }
  return summary;
}

std::string render_fuzz_report(const FuzzOptions& opts,
                               const FuzzSummary& summary) {
  std::ostringstream os;
  os << "fuzz seed=" << opts.seed << " count=" << opts.count
     << " depth=" << opts.depth
     << " subject_reduction=" << (opts.subject_reduction ? 1 : 0)
     << " max_steps=" << opts.max_steps << "\n";
  os << "trials=" << summary.total << " pass=" << summary.pass
     << " diverged=" << summary.diverged
     << " progress_violations=" << summary.progress_violations
     << " soundness_violations=" << summary.soundness_violations
     << " subject_reduction_violations="
     << summary.subject_reduction_violations
     << " rejected=" << summary.rejected << "\n";
  for (const auto& f : summary.failures) {
    os << "FAILURE verdict=" << verdict_name(f.verdict) << " seed=" << f.seed
       << " steps=" << f.steps << "\n";
    os << "  details: " << f.details << "\n";
    os << "  program: " << f.program << "\n";
  }
  os << "result: " << (summary.clean() ? "OK" : "VIOLATIONS") << "\n";
  return os.str();
}

// ---------------------------------------------------------------------
// Random instances for the property suites
// ---------------------------------------------------------------------

namespace {

const char* const kVarPool[] = {"X0", "X1", "X2", "X3", "X4", "X5"};
constexpr int kVarPoolSize = 6;

}  // namespace

TypePtr random_type(Rng& rng, int depth) {
  if (depth <= 0 || rng.chance(1, 2)) {
    switch (rng.below(5)) {
      case 0: return t_int();
      case 1: return t_bool();
      case 2: return t_str();
      case 3: return t_var(kVarPool[rng.below(kVarPoolSize)]);
      default: return t_bot();
    }
  }
  if (rng.chance(1, 5)) {
    // A small arrow; kept shallow.
    std::vector<TypePtr> params;
    int n = static_cast<int>(rng.below(3));
    for (int i = 0; i < n; ++i) params.push_back(random_type(rng, 0));
    return t_arrow(random_constraints(rng, 0, 2, 2), std::move(params),
                   random_type(rng, 0), random_constraints(rng, 0, 2, 2));
  }
  int n = 2 + static_cast<int>(rng.below(2));
  std::vector<TypePtr> alts;
  for (int i = 0; i < n; ++i) alts.push_back(random_type(rng, depth - 1));
  return t_or(std::move(alts));
}

RecordType random_record(Rng& rng, int depth, int max_fields) {
  RecordType rec;
  int n = static_cast<int>(rng.below(static_cast<std::uint32_t>(max_fields) + 1));
  for (int i = 0; i < n; ++i)
    rec[kFieldPool[rng.below(kFieldPoolSize)]] = random_type(rng, depth);
  return rec;
}

ConstraintSet random_constraints(Rng& rng, int depth, int max_vars,
                                 int max_fields) {
  ConstraintSet out;
  int n = static_cast<int>(rng.below(static_cast<std::uint32_t>(max_vars) + 1));
  for (int i = 0; i < n; ++i)
    out[kVarPool[rng.below(kVarPoolSize)]] =
        random_record(rng, depth, max_fields);
  return out;
}

void random_store(Rng& rng, Store& sigma, LocEnv& locs) {
  static const std::vector<ExprPtr> fun_pool = [] {
    std::vector<ExprPtr> fns;
    fns.push_back(e_func({}, t_arrow({}, {}, t_int(), {}), e_int(0)));
    fns.push_back(e_func({"p"}, t_arrow({}, {t_int()}, t_int(), {}),
                         e_var("p")));
    fns.push_back(e_func({"p"}, t_arrow({}, {t_int()}, t_bool(), {}),
                         e_prim(Op::Lt, {e_var("p"), e_int(10)})));
    return fns;
  }();

  sigma.clear();
  locs.clear();
  int n = 1 + static_cast<int>(rng.below(4));
  for (LocId l = 0; l < n; ++l) {
    sigma[l] = Object{};
    locs[l] = t_var(kVarPool[l % kVarPoolSize]);
  }
  for (LocId l = 0; l < n; ++l) {
    int fields = static_cast<int>(rng.below(4));
    for (int i = 0; i < fields; ++i) {
      std::string f = kFieldPool[rng.below(kFieldPoolSize)];
      switch (rng.below(5)) {
        case 0: sigma[l][f] = e_int(static_cast<std::int64_t>(rng.below(50))); break;
        case 1: sigma[l][f] = e_bool(rng.chance(1, 2)); break;
        case 2: sigma[l][f] = e_str("s"); break;
        case 3: sigma[l][f] = e_loc(static_cast<LocId>(rng.below(static_cast<std::uint32_t>(n)))); break;
        default: sigma[l][f] = fun_pool[rng.below(static_cast<std::uint32_t>(fun_pool.size()))]; break;
      }
    }
  }
}

ConstraintSet random_weakening(Rng& rng, const ConstraintSet& psi) {
  ConstraintSet out = normalize_constraints(psi);
  int steps = static_cast<int>(rng.below(5));
  for (int i = 0; i < steps; ++i) {
    if (out.empty()) break;
    auto vit = out.begin();
    std::advance(vit, rng.below(static_cast<std::uint32_t>(out.size())));
    switch (rng.below(4)) {
      case 0:  // drop the whole binding
        out.erase(vit);
        break;
      case 1: {  // drop one field
        if (vit->second.empty()) break;
        auto fit = vit->second.begin();
        std::advance(fit, rng.below(static_cast<std::uint32_t>(vit->second.size())));
        vit->second.erase(fit);
        break;
      }
      case 2: {  // add a possibly-absent field
        std::string f = kFieldPool[rng.below(kFieldPoolSize)];
        if (vit->second.count(f)) break;
        vit->second[f] = t_or({random_type(rng, 1), t_bot()});
        break;
      }
      default: {  // widen one field type
        if (vit->second.empty()) break;
        auto fit = vit->second.begin();
        std::advance(fit, rng.below(static_cast<std::uint32_t>(vit->second.size())));
        fit->second = t_or({fit->second, random_type(rng, 1)});
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------

namespace {

struct LawRunner {
  LawResult result;

  explicit LawRunner(std::string name, bool informational = false) {
    result.name = std::move(name);
    result.informational = informational;
  }

  void record(bool ok, const std::string& counterexample) {
    ++result.trials;
    if (!ok) {
      ++result.failures;
      if (result.counterexample.empty()) result.counterexample = counterexample;
    }
  }
};

std::string cs_str(const ConstraintSet& c) {
  std::string s = to_string(c);
  return s.empty() ? "<empty>" : s;
}

}  // namespace

bool PropsSummary::all_required_hold() const {
  for (const auto& l : laws)
    if (!l.informational && l.failures > 0) return false;
  return true;
}

PropsSummary run_props(const PropsOptions& opts) {
  PropsSummary summary;

  // --- constraint algebra ---
  {
    LawRunner refl("entails-reflexive");
    LawRunner trans_derived("entails-transitive-derived-chain");
    LawRunner trans_filtered("entails-transitive-random-triples");
    LawRunner merge_law("merge-entailment entails(P1, merge(P1,P2))");
    LawRunner update_law("update-entailment entails(P2, update(P1,P2))");
    LawRunner merge_comm("merge-commutative");
    LawRunner merge_assoc("merge-associative");
    LawRunner update_assoc("update-associative");
    LawRunner filter_str("filter-strengthens entails(filter(P,X,a), P)");
    LawRunner merge_shared("merge-entailment on shared-domain pairs", true);
    LawRunner update_rev("update-entailment reversed entails(update(P1,P2), P2)",
                         true);

    Rng rng(mix_seed(opts.seed, 1));
    for (long i = 0; i < opts.algebra_iters; ++i) {
      ConstraintSet p1 = random_constraints(rng, 3, 6, 6);
      ConstraintSet p2 = random_constraints(rng, 3, 6, 6);

      refl.record(entails(p1, p1), cs_str(p1));

      ConstraintSet w1 = random_weakening(rng, p1);
      ConstraintSet w2 = random_weakening(rng, w1);
      trans_derived.record(entails(p1, w1) && entails(w1, w2) &&
                               entails(p1, w2),
                           cs_str(p1) + "  ~>  " + cs_str(w2));

      if (entails(p1, p2)) {
        ConstraintSet p3 = random_weakening(rng, p2);
        if (entails(p2, p3))
          trans_filtered.record(entails(p1, p3),
                                cs_str(p1) + " |- " + cs_str(p2) + " |- " +
                                    cs_str(p3));
      }

      ConstraintSet merged = merge(p1, p2);
      merge_law.record(entails(p1, merged),
                       cs_str(p1) + "  vs merge  " + cs_str(merged));
      merge_comm.record(constraints_equal(merged, merge(p2, p1)),
                        cs_str(p1) + " , " + cs_str(p2));

      ConstraintSet p3 = random_constraints(rng, 2, 4, 4);
      merge_assoc.record(
          constraints_equal(merge(merge(p1, p2), p3), merge(p1, merge(p2, p3))),
          cs_str(p1) + " , " + cs_str(p2) + " , " + cs_str(p3));

      ConstraintSet updated = update(p1, p2);
      update_law.record(entails(p2, updated),
                        cs_str(p2) + "  vs update  " + cs_str(updated));
      update_rev.record(entails(updated, p2),
                        cs_str(updated) + "  vs  " + cs_str(p2));
      update_assoc.record(
          constraints_equal(update(update(p1, p2), p3),
                            update(p1, update(p2, p3))),
          cs_str(p1) + " , " + cs_str(p2) + " , " + cs_str(p3));

      // Shared-domain restriction: bindings of p2 limited to dom(p1).
      ConstraintSet p2_shared;
      for (const auto& [v, rec] : p2)
        if (p1.count(v)) p2_shared[v] = rec;
      merge_shared.record(entails(p1, merge(p1, p2_shared)),
                          cs_str(p1) + " , " + cs_str(p2_shared));

      if (!p1.empty()) {
        auto vit = p1.begin();
        std::advance(vit, rng.below(static_cast<std::uint32_t>(p1.size())));
        std::string attr = kFieldPool[rng.below(kFieldPoolSize)];
        auto filtered = filter_attr(p1, vit->first, attr);
        if (filtered)
          filter_str.record(entails(*filtered, p1),
                            cs_str(*filtered) + "  vs  " + cs_str(p1));
      }
    }

    summary.laws.push_back(refl.result);
    summary.laws.push_back(trans_derived.result);
    summary.laws.push_back(trans_filtered.result);
    summary.laws.push_back(merge_law.result);
    summary.laws.push_back(update_law.result);
    summary.laws.push_back(merge_comm.result);
    summary.laws.push_back(merge_assoc.result);
    summary.laws.push_back(update_assoc.result);
    summary.laws.push_back(filter_str.result);
    summary.laws.push_back(merge_shared.result);
    summary.laws.push_back(update_rev.result);
  }

  // --- satisfaction lemmas ---
  {
    LawRunner extract_sat("extract-store-typing-satisfies");
    LawRunner entail_sound("entailment-soundness (satisfies + entails)");
    LawRunner hasfield("hasfield (definite fields are present)");
    LawRunner completeness("value-completeness");
    LawRunner weaken_closure("weaken-closure satisfies(merge(P,P'))");

    Rng rng(mix_seed(opts.seed, 2));
    SatCache cache;
    for (long i = 0; i < opts.model_iters; ++i) {
      Store sigma;
      LocEnv locs;
      random_store(rng, sigma, locs);
      ConstraintSet exact = extract_store_typing(sigma, locs);

      extract_sat.record(satisfies_constraints(sigma, locs, exact, &cache),
                         store_to_string(sigma) + " vs " + cs_str(exact));

      ConstraintSet weakened = random_weakening(rng, exact);
      bool derived_ok = entails(exact, weakened);
      entail_sound.record(
          derived_ok && satisfies_constraints(sigma, locs, weakened, &cache),
          store_to_string(sigma) + " vs " + cs_str(weakened));

      // hasfield: any definite field of a satisfied constraint is present
      // in every object the variable describes, with a satisfying value.
      {
        bool ok = true;
        std::string ce;
        for (const auto& [var, rec] : weakened) {
          for (const auto& [field, ft] : rec) {
            if (!is_definite(ft)) continue;
            for (const auto& [l, lt] : locs) {
              const auto* lv = lt->as<TypeVarRef>();
              if (!lv || lv->name != var) continue;
              auto oit = sigma.find(l);
              if (oit == sigma.end()) continue;
              auto fit = oit->second.find(field);
              if (fit == oit->second.end() ||
                  !satisfies_value(sigma, locs, fit->second, ft, &cache)) {
                ok = false;
                ce = var + "." + field + " of type " + to_string(ft) +
                     " in " + store_to_string(sigma);
              }
            }
          }
        }
        hasfield.record(ok, ce);
      }

      // Value completeness: a satisfied value synthesizes a type that
      // entails the satisfied one.
      {
        std::vector<std::pair<ExprPtr, TypePtr>> values;
        for (const auto& [l, obj] : sigma) {
          for (const auto& [f, v] : obj) {
            if (const auto* c = v->as<Lit>())
              values.emplace_back(v, t_base(c->value.base_name()));
            else if (const auto* fn = v->as<FuncVal>())
              values.emplace_back(v, fn->annot);
            else if (v->is<LocRef>())
              values.emplace_back(v, locs.at(v->as<LocRef>()->loc));
          }
        }
        values.emplace_back(e_int(7), t_int());
        auto& [v, exact_t] =
            values[rng.below(static_cast<std::uint32_t>(values.size()))];
        TypePtr t = rng.chance(1, 2)
                        ? exact_t
                        : t_or({exact_t, random_type(rng, 1)});
        if (satisfies_value(sigma, locs, v, t, &cache)) {
          TypeState st;
          st.pre = weakened;
          st.locs = locs;
          CheckResult cr = synthesize(st, v);
          bool ok = false;
          std::string ce;
          if (const auto* res = std::get_if<TypeResult>(&cr))
            ok = entails_type(res->type, t);
          else
            ce = std::get<TypeError>(cr).render();
          completeness.record(
              ok, pretty_print(v) + " : " + to_string(t) + " " + ce);
        }
      }

      // Weakening closure on the merge-defined domain.
      {
        ConstraintSet extra = random_constraints(rng, 2, 4, 4);
        ConstraintSet restricted;
        for (const auto& [v, rec] : extra)
          if (exact.count(v)) restricted[v] = rec;
        weaken_closure.record(
            satisfies_constraints(sigma, locs, merge(exact, restricted),
                                  &cache),
            store_to_string(sigma) + " merged with " + cs_str(restricted));
      }
    }

    summary.laws.push_back(extract_sat.result);
    summary.laws.push_back(entail_sound.result);
    summary.laws.push_back(hasfield.result);
    summary.laws.push_back(completeness.result);
    summary.laws.push_back(weaken_closure.result);
  }

  return summary;
}

std::string render_props_report(const PropsSummary& summary) {
  std::ostringstream os;
  for (const auto& l : summary.laws) {
    os << "law " << l.name << ": trials=" << l.trials
       << " failures=" << l.failures << " "
       << (l.failures == 0 ? "OK" : (l.informational ? "FAIL (informational)"
                                                     : "FAIL"))
       << "\n";
    if (l.failures > 0 && !l.counterexample.empty())
      os << "  counterexample: " << l.counterexample << "\n";
  }
  os << "props: " << (summary.all_required_hold() ? "OK" : "FAIL") << "\n";
  return os.str();
}

}  // namespace luc
