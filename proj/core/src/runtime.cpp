#include "luc/runtime.hpp"

#include <cassert>

#include "luc/constraints.hpp"
#include "luc/pretty.hpp"
#include "luc/typecheck.hpp"

namespace luc {

namespace {

// Highest numeric suffix of an X<n>-shaped variable mentioned anywhere in
// t / the location environment; picking a fresh counter past it keeps the
// re-check's minted variables out of the annotation's namespace.
void max_var_index(const TypePtr& t, int& acc);

void max_var_index_cs(const ConstraintSet& cs, int& acc) {
  for (const auto& [var, rec] : cs) {
    if (var.size() > 1 && var[0] == 'X') {
      bool digits = true;
      for (size_t i = 1; i < var.size(); ++i)
        digits = digits && var[i] >= '0' && var[i] <= '9';
      if (digits) acc = std::max(acc, std::stoi(var.substr(1)));
    }
    for (const auto& [_, ft] : rec) max_var_index(ft, acc);
  }
}

void max_var_index(const TypePtr& t, int& acc) {
  if (const auto* v = t->as<TypeVarRef>()) {
    if (v->name.size() > 1 && v->name[0] == 'X') {
      bool digits = true;
      for (size_t i = 1; i < v->name.size(); ++i)
        digits = digits && v->name[i] >= '0' && v->name[i] <= '9';
      if (digits) acc = std::max(acc, std::stoi(v->name.substr(1)));
    }
    return;
  }
  if (const auto* o = t->as<OrType>())
    for (const auto& a : o->alts) max_var_index(a, acc);
  if (const auto* f = t->as<ArrowType>()) {
    max_var_index_cs(f->pre, acc);
    for (const auto& p : f->params) max_var_index(p, acc);
    max_var_index(f->result, acc);
    max_var_index_cs(f->post, acc);
  }
}

bool check_fun_value(const Store&, const LocEnv& locs, const Expr& fn,
                     const TypePtr& arrow_t, SatCache* cache) {
  const auto* fv = fn.as<FuncVal>();
  assert(fv);
  if (!type_equal(fv->annot, arrow_t)) return false;
  TypePtr norm = normalize_type(arrow_t);
  const auto* arrow = norm->as<ArrowType>();
  if (!arrow) return false;

  std::string key;
  if (cache) {
    key = to_string(arrow_t) + "|" + pretty_print(fn) + "|";
    for (const auto& [l, t] : locs)
      key += std::to_string(l) + ":" + to_string(t) + ";";
    auto it = cache->fun_checks.find(key);
    if (it != cache->fun_checks.end()) return it->second;
  }

  int max_idx = -1;
  max_var_index(arrow_t, max_idx);
  for (const auto& [_, t] : locs) max_var_index(t, max_idx);

  TypeState st;
  st.pre = arrow->pre;
  st.locs = locs;
  st.next_fresh = max_idx + 1;
  if (cache) st.new_var_hints = cache->new_var_hints;
  ExprPtr fn_copy = mk(fn.node, fn.span, fn.id);
  CheckResult r = synthesize(st, fn_copy);
  bool ok = std::holds_alternative<TypeResult>(r);
  if (cache) cache->fun_checks[key] = ok;
  return ok;
}

}  // namespace

bool satisfies_value(const Store& sigma, const LocEnv& locs, const ExprPtr& v,
                     const TypePtr& t, SatCache* cache) {
  TypePtr nt = normalize_type(t);
  for (const auto& d : disjuncts(nt)) {
    if (d->is<BottomType>() || d->is<NeverType>()) continue;
    if (const auto* lit = v->as<Lit>()) {
      if (const auto* b = d->as<BaseType>()) {
        if (b->name == lit->value.base_name()) return true;
      }
      continue;
    }
    if (const auto* loc = v->as<LocRef>()) {
      if (const auto* tv = d->as<TypeVarRef>()) {
        auto it = locs.find(loc->loc);
        if (it != locs.end()) {
          if (const auto* lv = it->second->as<TypeVarRef>()) {
            if (lv->name == tv->name) return true;
          }
        }
      }
      continue;
    }
    if (v->is<FuncVal>() && d->is<ArrowType>()) {
      if (check_fun_value(sigma, locs, *v, d, cache)) return true;
    }
  }
  return false;
}

bool satisfies_constraints(const Store& sigma, const LocEnv& locs,
                           const ConstraintSet& psi, SatCache* cache) {
  SatCache local;
  if (!cache) cache = &local;
  for (const auto& [var, rec] : psi) {
    for (const auto& [l, lt] : locs) {
      const auto* lv = lt->as<TypeVarRef>();
      if (!lv || lv->name != var) continue;
      auto sit = sigma.find(l);
      if (sit == sigma.end()) continue;
      const Object& obj = sit->second;
      for (const auto& [field, ft] : rec) {
        TypePtr nft = normalize_type(ft);
        if (contains_bottom(nft)) continue;  // possibly-absent field
        auto fit = obj.find(field);
        if (fit == obj.end()) return false;
        if (!satisfies_value(sigma, locs, fit->second, nft, cache))
          return false;
      }
    }
  }
  return true;
}

ConstraintSet extract_store_typing(const Store& sigma, const LocEnv& locs) {
  ConstraintSet out;
  for (const auto& [l, obj] : sigma) {
    auto lit = locs.find(l);
    assert(lit != locs.end() && "location typing must cover the store");
    const auto* lv = lit->second->as<TypeVarRef>();
    assert(lv && "location typing image must be type variables");
    RecordType rec;
    for (const auto& [field, v] : obj) {
      if (const auto* c = v->as<Lit>()) {
        rec[field] = t_base(c->value.base_name());
      } else if (const auto* f = v->as<FuncVal>()) {
        rec[field] = normalize_type(f->annot);
      } else if (const auto* lr = v->as<LocRef>()) {
        auto tit = locs.find(lr->loc);
        assert(tit != locs.end() && "stored location must be typed");
        rec[field] = tit->second;
      } else {
        assert(false && "store values are constants, functions or locations");
      }
    }
    auto [it, inserted] = out.emplace(lv->name, rec);
    if (!inserted) it->second = merge_records(it->second, rec);
  }
  return out;
}

}  // namespace luc
