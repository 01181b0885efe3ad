#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "luc/eval.hpp"
#include "luc/types.hpp"

namespace luc {

// Memoizes function-body re-typechecks performed by value satisfaction.
// new_var_hints pins the fresh variable each `new` node received in the
// original check of the program the values came from, so embedded
// annotations that mention those variables still line up.
struct SatCache {
  std::map<std::string, bool> fun_checks;
  std::map<std::uint32_t, std::string> new_var_hints;
};

// Decision procedure for v : t under store sigma and location typing.
// Constants satisfy their base type; a location satisfies the variable
// it is mapped to; a function value satisfies an arrow equal to its
// annotation whose body re-typechecks; a disjunction is satisfied when
// some disjunct is; bottom is satisfied by nothing.
bool satisfies_value(const Store& sigma, const LocEnv& locs, const ExprPtr& v,
                     const TypePtr& t, SatCache* cache = nullptr);

// Decision procedure for sigma under locs satisfying psi. For every
// binding X <| {a: t, ...} and every location mapped to X: a field whose
// type carries a bottom disjunct is unconstrained ("possibly absent");
// otherwise the field must be present and its value must satisfy the
// type. Extra runtime fields are always permitted.
bool satisfies_constraints(const Store& sigma, const LocEnv& locs,
                           const ConstraintSet& psi,
                           SatCache* cache = nullptr);

// The exact constraint set describing a concrete store: every field of
// every object is typed precisely (base type for constants, annotation
// for function values, the mapped variable for locations). When several
// locations share a variable their records are branch-merged.
// satisfies_constraints(sigma, locs, result) holds by construction for
// stores whose function values typecheck.
ConstraintSet extract_store_typing(const Store& sigma, const LocEnv& locs);

}  // namespace luc
