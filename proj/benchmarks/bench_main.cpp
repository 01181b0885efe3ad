#include <benchmark/benchmark.h>

#include "luc/constraints.hpp"
#include "luc/eval.hpp"
#include "luc/harness.hpp"
#include "luc/parser.hpp"
#include "luc/typecheck.hpp"

namespace {

const char* kProgram =
    "let x = new in "
    "let u = x.a := 1 in "
    "let f = func(p) : [X0 <| {a: int}](int) -> int [X0 <| {a: int}] "
    "{ add(p, x.a) } in "
    "if lt(f(1), 10) then x.a := f(2) else 0";

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) {
    auto r = luc::parse_program(kProgram);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Parse);

void BM_Typecheck(benchmark::State& state) {
  auto e = std::get<luc::ExprPtr>(luc::parse_program(kProgram));
  for (auto _ : state) {
    auto r = luc::typecheck_program(e);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Typecheck);

void BM_Evaluate(benchmark::State& state) {
  auto e = std::get<luc::ExprPtr>(luc::parse_program(kProgram));
  for (auto _ : state) {
    auto r = luc::run(e, 100000);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Evaluate);

void BM_Entails(benchmark::State& state) {
  luc::Rng rng(7);
  luc::ConstraintSet a = luc::random_constraints(rng, 4, 6, 6);
  luc::ConstraintSet b = luc::random_weakening(rng, a);
  for (auto _ : state) {
    bool r = luc::entails(a, b);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Entails);

void BM_GenerateAndCheck(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto e = luc::generate_program(seed++, 5);
    auto r = luc::typecheck_program(e);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_GenerateAndCheck);

}  // namespace

BENCHMARK_MAIN();
