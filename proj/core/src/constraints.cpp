#include "luc/constraints.hpp"

#include <algorithm>

namespace luc {

bool is_definite(const TypePtr& t) {
  for (const auto& d : disjuncts(normalize_type(t)))
    if (d->is<BottomType>()) return false;
  return true;
}

RecordType merge_records(const RecordType& a, const RecordType& b) {
  RecordType out;
  for (const auto& [field, ta] : a) {
    auto it = b.find(field);
    if (it != b.end())
      out[field] = t_or({ta, it->second});
    else
      out[field] = t_or({ta, t_bot()});
  }
  for (const auto& [field, tb] : b) {
    if (!a.count(field)) out[field] = t_or({tb, t_bot()});
  }
  return out;
}

ConstraintSet merge(const ConstraintSet& a, const ConstraintSet& b) {
  ConstraintSet out;
  for (const auto& [var, ra] : a) {
    auto it = b.find(var);
    if (it != b.end())
      out[var] = merge_records(ra, it->second);
    else
      out[var] = normalize_record(ra);
  }
  for (const auto& [var, rb] : b) {
    if (!a.count(var)) out[var] = normalize_record(rb);
  }
  return out;
}

ConstraintSet update(const ConstraintSet& a, const ConstraintSet& b) {
  ConstraintSet out = a;
  for (const auto& [var, rb] : b) out[var] = rb;
  return out;
}

std::optional<ConstraintSet> filter_attr(const ConstraintSet& psi,
                                         const std::string& var,
                                         const std::string& attr) {
  auto vit = psi.find(var);
  if (vit == psi.end()) return psi;
  auto fit = vit->second.find(attr);
  if (fit == vit->second.end()) return psi;
  std::optional<TypePtr> kept = non_bottom_part(normalize_type(fit->second));
  if (!kept) return std::nullopt;
  ConstraintSet out = psi;
  out[var][attr] = *kept;
  return out;
}

namespace {

bool atomic_entails(const TypePtr& a, const TypePtr& b) {
  if (a->is<NeverType>()) return true;
  return type_cmp(*a, *b) == 0;
}

}  // namespace

bool entails_type(const TypePtr& t1, const TypePtr& t2) {
  TypePtr a = normalize_type(t1);
  TypePtr b = normalize_type(t2);
  if (a->is<NeverType>()) return true;
  std::vector<TypePtr> right = disjuncts(b);
  for (const auto& d1 : disjuncts(a)) {
    bool found = false;
    for (const auto& d2 : right) {
      if (atomic_entails(d1, d2)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

bool entails_record(const RecordType& r1, const RecordType& r2) {
  for (const auto& [field, t2] : r2) {
    TypePtr nt2 = normalize_type(t2);
    if (contains_bottom(nt2)) continue;
    auto it = r1.find(field);
    if (it == r1.end()) return false;
    if (!entails_type(it->second, nt2)) return false;
  }
  return true;
}

bool entails(const ConstraintSet& a, const ConstraintSet& b) {
  static const RecordType kEmpty;
  for (const auto& [var, r2] : b) {
    auto it = a.find(var);
    const RecordType& r1 = it == a.end() ? kEmpty : it->second;
    if (!entails_record(r1, r2)) return false;
  }
  return true;
}

}  // namespace luc
