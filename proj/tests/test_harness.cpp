#include "doctest.h"
#include "luc/harness.hpp"
#include "luc/parser.hpp"
#include "luc/pretty.hpp"
#include "luc/typecheck.hpp"

#include <set>
#include <string>
#include <variant>

using namespace luc;

namespace {

void collect_kinds(const Expr& e, std::set<std::string>& kinds) {
  if (e.is<Var>()) kinds.insert("var");
  if (e.is<Lit>()) kinds.insert("lit");
  if (e.is<FuncVal>()) kinds.insert("func");
  if (e.is<Let>()) kinds.insert("let");
  if (e.is<Apply>()) kinds.insert("apply");
  if (e.is<PrimApp>()) kinds.insert("primop");
  if (e.is<If>()) kinds.insert("if");
  if (e.is<IfHasAttr>()) kinds.insert("ifhasattr");
  if (e.is<Break>()) kinds.insert("break");
  if (e.is<Labeled>()) kinds.insert("labeled");
  if (e.is<New>()) kinds.insert("new");
  if (e.is<FieldSet>()) kinds.insert("fieldset");
  if (e.is<FieldGet>()) kinds.insert("fieldget");
  auto walk = [&](const ExprPtr& c) { collect_kinds(*c, kinds); };
  if (const auto* x = e.as<FuncVal>()) walk(x->body);
  else if (const auto* x = e.as<Let>()) { walk(x->bound); walk(x->body); }
  else if (const auto* x = e.as<Apply>()) {
    walk(x->callee);
    for (const auto& a : x->args) walk(a);
  } else if (const auto* x = e.as<PrimApp>()) {
    for (const auto& a : x->args) walk(a);
  } else if (const auto* x = e.as<If>()) {
    walk(x->cond); walk(x->then_branch); walk(x->else_branch);
  } else if (const auto* x = e.as<IfHasAttr>()) {
    walk(x->then_branch); walk(x->else_branch);
  } else if (const auto* x = e.as<Break>()) walk(x->arg);
  else if (const auto* x = e.as<Labeled>()) walk(x->body);
  else if (const auto* x = e.as<FieldSet>()) { walk(x->subject); walk(x->value); }
  else if (const auto* x = e.as<FieldGet>()) walk(x->subject);
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 1234567ULL}) {
    ExprPtr a = generate_program(seed, 6);
    ExprPtr b = generate_program(seed, 6);
    CHECK(pretty_print(a) == pretty_print(b));
    CHECK(expr_equal(a, b));
  }
  CHECK(pretty_print(generate_program(1, 6)) !=
        pretty_print(generate_program(2, 6)));
}

TEST_CASE("depth zero yields a constant") {
  ExprPtr e = generate_program(5, 0);
  CHECK(e->is<Lit>());
}

TEST_CASE("generated programs are closed, source-form, and well-typed") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    ExprPtr e = generate_program(seed, 6);
    CHECK(free_vars(*e).empty());
    CHECK(source_form(*e));
    CheckResult r = typecheck_program(e);
    if (const auto* err = std::get_if<TypeError>(&r)) {
      INFO("seed " << seed << ": " << pretty_print(e));
      INFO(err->render());
      CHECK(false);
    }
  }
}

TEST_CASE("generation covers every expression alternative") {
  std::set<std::string> kinds;
  for (std::uint64_t seed = 0; seed < 400; ++seed)
    collect_kinds(*generate_program(seed, 6), kinds);
  for (const char* k :
       {"var", "lit", "func", "let", "apply", "primop", "if", "ifhasattr",
        "break", "labeled", "new", "fieldset", "fieldget"}) {
    INFO("missing alternative: " << k);
    CHECK(kinds.count(k) == 1);
  }
}

TEST_CASE("soundness trial on a small update program") {
  ParseResult pr = parse_program("let x = new in x.a := 1");
  ExprPtr e = std::get<ExprPtr>(pr);
  TrialReport r = soundness_trial(e, 0, TrialOptions{});
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.steps >= 3);
  CHECK(r.steps <= 5);
  RunResult rr = run(e, 100);
  const auto& done = std::get<Done>(rr.outcome);
  CHECK(done.store.size() == 1);
  CHECK(expr_equal(done.store.at(0).at("a"), e_int(1)));
}

TEST_CASE("divergent programs report Diverged") {
  ParseResult pr = parse_program(
      "let r = new in "
      "let u = (r.f := func(x): [ ](int) -> int [ ] { r.f(x) }) in "
      "r.f(0)");
  TrialOptions opts;
  opts.max_steps = 500;
  opts.skip_typecheck = true;  // out of the typed fragment
  TrialReport r = soundness_trial(std::get<ExprPtr>(pr), 0, opts);
  CHECK(r.verdict == Verdict::Diverged);
  CHECK(r.steps == 500);
}

TEST_CASE("ill-typed programs are reported as rejected") {
  ParseResult pr = parse_program("let x = new in x.a");
  TrialReport r = soundness_trial(std::get<ExprPtr>(pr), 0, TrialOptions{});
  CHECK(r.verdict == Verdict::Rejected);
}

TEST_CASE("trials pass with per-step subject-reduction replay") {
  TrialOptions opts;
  opts.subject_reduction = true;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    ExprPtr e = generate_program(seed, 5);
    TrialReport r = soundness_trial(e, seed, opts);
    INFO("seed " << seed << ": " << r.program);
    INFO("details: " << r.details);
    CHECK((r.verdict == Verdict::Pass || r.verdict == Verdict::Diverged));
  }
}

TEST_CASE("fuzz summaries are clean and rendering is deterministic") {
  FuzzOptions opts;
  opts.seed = 42;
  opts.count = 40;
  opts.depth = 5;
  FuzzSummary s1 = run_fuzz(opts);
  CHECK(s1.clean());
  CHECK(s1.total == 40);
  FuzzSummary s2 = run_fuzz(opts);
  CHECK(render_fuzz_report(opts, s1) == render_fuzz_report(opts, s2));
}

TEST_CASE("props: required laws other than the two flagged ones hold") {
  PropsOptions opts;
  opts.algebra_iters = 400;
  opts.model_iters = 200;
  PropsSummary s = run_props(opts);
  for (const auto& law : s.laws) {
    if (law.name.rfind("merge-entailment entails", 0) == 0 ||
        law.name.rfind("update-entailment entails", 0) == 0)
      continue;  // see the acceptance suite: these fail by design analysis
    if (law.informational) continue;
    INFO(law.name << " counterexample: " << law.counterexample);
    CHECK(law.failures == 0);
  }
}

TEST_CASE("trial reports are reproducible from their seed") {
  FuzzOptions opts;
  opts.seed = 7;
  opts.count = 10;
  opts.depth = 6;
  opts.subject_reduction = true;
  FuzzSummary s = run_fuzz(opts);
  CHECK(s.clean());
  FuzzSummary again = run_fuzz(opts);
  CHECK(render_fuzz_report(opts, s) == render_fuzz_report(opts, again));
}
