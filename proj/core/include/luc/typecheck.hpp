#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "luc/constraints.hpp"
#include "luc/syntax.hpp"
#include "luc/types.hpp"

namespace luc {

enum class TypeErrorKind {
  UnboundVariable,
  UnboundLocation,
  NotAnObjectVariable,
  MissingField,
  IndefiniteFieldType,
  ConditionNotBool,
  BranchJoinFailure,
  CallPreconditionFailure,
  ArityMismatch,
  AnnotationMismatch,
  BreakPostconditionFailure,
  LabelPostconditionFailure,
  FilterEmptiesField,
  PrimopSignatureMismatch,
};

const char* type_error_kind_name(TypeErrorKind k);

struct TypeError {
  TypeErrorKind kind;
  SourceSpan span;
  std::string rule;  // typing rule the error arose in
  std::string detail;

  // <file>:<line>:<col>: <kind> [<rule>]: <detail>
  std::string render(const std::string& filename = "<input>") const;
};

// The state threaded left-to-right by the checker. Fresh type variables
// are drawn from next_fresh ("X0", "X1", ...), which makes checking a
// deterministic, replayable function of its inputs. A replay can pin the
// variable each `new` node received in an earlier check through
// new_var_hints (keyed by node id); hinted nodes do not consume the
// counter.
struct TypeState {
  ConstraintSet pre;
  TypeEnv env;
  LocEnv locs;
  int next_fresh = 0;
  std::map<std::uint32_t, std::string> new_var_hints;
  // Subject-reduction replay mode: constraint bindings on variables that
  // no location carries are vacuous at the replayed store and may be
  // assumed, mirroring the declarative branch-merge weakening. Checks on
  // variables with live locations stay strict.
  bool replay_weakening = false;
};

struct TypeResult {
  TypePtr type;
  ConstraintSet post;
  int next_fresh = 0;
  // Which fresh variable each `new` node produced, in check order.
  std::vector<std::pair<std::uint32_t, std::string>> new_vars;
};

using CheckResult = std::variant<TypeResult, TypeError>;

// Synthesizes the result type and output constraints of e.
CheckResult synthesize(const TypeState& state, const ExprPtr& e);

// Joins the two branch results of a conditional: equal types stay, the
// internal never type is absorbed, anything else becomes a disjunction;
// output constraints are branch-merged.
CheckResult join_branches(const TypeResult& a, const TypeResult& b);

// Entry point: empty contexts, then checks that every type variable in
// the result type is described by the final constraints.
CheckResult typecheck_program(const ExprPtr& e);

std::string fresh_var_name(int index);

}  // namespace luc
