#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "luc/eval.hpp"
#include "luc/runtime.hpp"
#include "luc/syntax.hpp"
#include "luc/typecheck.hpp"

namespace luc {

// Deterministic 64-bit generator (splitmix-seeded xorshift*), so reports
// are byte-identical across runs and platforms for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  // Uniform in [0, bound); bound > 0.
  std::uint32_t below(std::uint32_t bound);
  bool chance(std::uint32_t num, std::uint32_t den);

 private:
  std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------
// Type-directed program generation.
//
// Generation tracks the same (constraints, environment, fresh-variable
// counter) state the checker threads, so emitted programs typecheck by
// construction. Coverage at depth >= 3 includes every source expression
// alternative: labeled/break pairs, ifhasattr, field updates on shared
// variables across branches, and function declaration + application.
// ---------------------------------------------------------------------

ExprPtr generate_program(std::uint64_t seed, int depth);

// ---------------------------------------------------------------------
// Metatheory trials.
// ---------------------------------------------------------------------

enum class Verdict {
  Pass,
  ProgressViolation,
  SoundnessViolation,
  SubjectReductionViolation,
  Diverged,
  Rejected,  // program did not typecheck (not produced by the generator)
};

const char* verdict_name(Verdict v);

struct TrialReport {
  std::string program;  // pretty-printed
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::Pass;
  long steps = 0;
  std::string details;
};

struct TrialOptions {
  long max_steps = 100000;
  bool subject_reduction = false;
  // Evaluate without requiring a successful typecheck; final-state
  // satisfaction checks are skipped (used for out-of-fragment demos).
  bool skip_typecheck = false;
};

// Runs e stepwise and checks the soundness claims: a well-typed program
// never sticks (progress); when it finishes, the final value and store
// satisfy the synthesized type and constraints; optionally, after every
// step the recomposed residual re-typechecks against the original typing
// up to entailment (subject reduction).
TrialReport soundness_trial(const ExprPtr& e, std::uint64_t seed,
                            const TrialOptions& opts);

struct FuzzOptions {
  std::uint64_t seed = 0;
  int count = 1000;
  int depth = 6;
  bool subject_reduction = false;
  long max_steps = 100000;
};

struct FuzzSummary {
  long total = 0;
  long pass = 0;
  long diverged = 0;
  long progress_violations = 0;
  long soundness_violations = 0;
  long subject_reduction_violations = 0;
  long rejected = 0;
  std::vector<TrialReport> failures;

  bool clean() const {
    return progress_violations == 0 && soundness_violations == 0 &&
           subject_reduction_violations == 0 && rejected == 0;
  }
};

FuzzSummary run_fuzz(const FuzzOptions& opts);
std::string render_fuzz_report(const FuzzOptions& opts,
                               const FuzzSummary& summary);

// ---------------------------------------------------------------------
// Random instances and rule-application weakening for the property
// suites (shared with the tests).
// ---------------------------------------------------------------------

TypePtr random_type(Rng& rng, int depth);
RecordType random_record(Rng& rng, int depth, int max_fields);
ConstraintSet random_constraints(Rng& rng, int depth, int max_vars,
                                 int max_fields);

// A coherent store and location typing: no dangling locations, function
// values drawn from a small well-typed pool, distinct variables.
void random_store(Rng& rng, Store& sigma, LocEnv& locs);

// Applies 0..4 entailment rule instances (drop binding, drop field, add
// possibly-absent field, widen a field type) to produce a consequence of
// psi: entails(psi, result) always holds.
ConstraintSet random_weakening(Rng& rng, const ConstraintSet& psi);

struct LawResult {
  std::string name;
  long trials = 0;
  long failures = 0;
  bool informational = false;  // reported but not part of the exit status
  std::string counterexample;
};

struct PropsOptions {
  std::uint64_t seed = 0;
  long algebra_iters = 10000;
  long model_iters = 5000;
};

struct PropsSummary {
  std::vector<LawResult> laws;
  bool all_required_hold() const;
};

PropsSummary run_props(const PropsOptions& opts);
std::string render_props_report(const PropsSummary& summary);

}  // namespace luc
