#pragma once

#include <optional>

#include "luc/types.hpp"

namespace luc {

// A type is definite when no disjunct is bottom: constants, variables,
// arrows, and disjunctions of definite types.
bool is_definite(const TypePtr& t);

// Branch-merge of two records. Shared fields join their types; a field
// present on one side only has its type joined with bottom ("possibly
// absent"). Result is canonical.
RecordType merge_records(const RecordType& a, const RecordType& b);

// Branch-merge of constraint sets: shared variables merge their records,
// one-sided bindings are kept verbatim.
ConstraintSet merge(const ConstraintSet& a, const ConstraintSet& b);

// Right-biased override: bindings of b win, bindings only in a survive.
ConstraintSet update(const ConstraintSet& a, const ConstraintSet& b);

// Attribute filter used by the positive ifhasattr branch: removes the
// bottom disjuncts from field a of X's record. No-op when X is unbound
// or its record lacks a. nullopt when every disjunct of a's type is
// bottom (the branch is statically unreachable).
std::optional<ConstraintSet> filter_attr(const ConstraintSet& psi,
                                         const std::string& var,
                                         const std::string& attr);

// Entailment, "left is at least as strong as right".
//
// On types this is the closure of reflexivity, disjunct injection and
// disjunction congruence: every disjunct of t1 must occur in t2. The
// internal never type entails everything.
bool entails_type(const TypePtr& t1, const TypePtr& t2);

// On records: fields of r2 must either be entailed by the same field of
// r1, or carry a bottom disjunct (introducing a "possibly absent" field
// is sound, and is what a one-sided branch merge produces).
bool entails_record(const RecordType& r1, const RecordType& r2);

// On constraint sets: each binding of b needs a matching binding in a;
// a binding on a variable unknown to a is entailed only when the empty
// record entails it (every field possibly absent).
bool entails(const ConstraintSet& a, const ConstraintSet& b);

}  // namespace luc
