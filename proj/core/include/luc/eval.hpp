#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "luc/syntax.hpp"

namespace luc {

using Object = std::map<std::string, ExprPtr>;  // field -> value
using Store = std::map<LocId, Object>;

// Basic evaluation contexts, innermost frame last.
struct LetFrame {
  std::string binder;
  ExprPtr body;
};
struct CalleeFrame {
  std::vector<ExprPtr> args;
};
struct ArgsFrame {
  ExprPtr callee;  // a value
  std::vector<ExprPtr> done;
  std::vector<ExprPtr> pending;
};
struct OpFrame {
  Op op;
  std::vector<ExprPtr> done;
  std::vector<ExprPtr> pending;
};
struct IfFrame {
  ExprPtr then_branch;
  ExprPtr else_branch;
};
struct BreakFrame {
  std::string label;
};
struct LabelFrame {
  std::string label;
  TypePtr annot;
};

using Frame = std::variant<LetFrame, CalleeFrame, ArgsFrame, OpFrame, IfFrame,
                           BreakFrame, LabelFrame>;

struct Config {
  Store store;
  std::vector<Frame> stack;
  ExprPtr redex;
  LocId next_loc = 0;
};

enum class StuckReason {
  MissingFieldAtRuntime,
  DeltaTypeTrap,
  ArityTrap,
  NotAFunction,
  NotABoolean,
  // Also covers redexes outside the evaluable grammar: unresolved
  // variables and field/introspection subjects that are not locations.
  UnboundLocation,
  DanglingBreak,
};

const char* stuck_reason_name(StuckReason r);

enum class Rule {
  Let, BetaV, IfTrue, IfFalse, IfhtrTrue, IfhtrFalse, BrkP, LblPop, New,
  SetRef, Deref, OpEval,
};

const char* rule_name(Rule r);

struct Stepped {
  Config config;
  Rule rule;
  // Set by (New): the id of the new node and the allocated location.
  std::optional<std::pair<std::uint32_t, LocId>> alloc;
};
struct Done {
  Store store;
  ExprPtr value;
};
struct Stuck {
  StuckReason reason;
  Config config;
};
struct StepLimit {
  Config config;
};

using StepOutcome = std::variant<Done, Stepped, Stuck>;
using Outcome = std::variant<Done, Stepped, Stuck, StepLimit>;

// delta interpretation of the primitive operators. Integers wrap at 64
// bits; eq compares two strings by value; any other tag combination is a
// DeltaTypeTrap (returned as nullopt).
std::optional<ExprPtr> delta(Op op, const std::vector<ExprPtr>& args);

// Applies exactly one semantic rule after (uncounted) context
// decomposition. Deterministic: a configuration has one outcome.
StepOutcome step(const Config& c);

// Recomposes the focused expression from the context stack.
ExprPtr plug(const std::vector<Frame>& stack, const ExprPtr& redex);

struct RunResult {
  Outcome outcome;
  long steps = 0;
  Store store;
};

using StepCallback =
    std::function<void(long step_index, Rule rule, const Config& after)>;

// Iterates step from the initial configuration of e. e should be closed.
RunResult run(const ExprPtr& e, long max_steps,
              const StepCallback& on_step = nullptr);

std::string store_to_string(const Store& s);

}  // namespace luc
