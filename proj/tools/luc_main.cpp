#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "luc/eval.hpp"
#include "luc/harness.hpp"
#include "luc/parser.hpp"
#include "luc/pretty.hpp"
#include "luc/typecheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTypeError = 1;
constexpr int kExitParseError = 2;
constexpr int kExitStuck = 3;
constexpr int kExitStepLimit = 4;
constexpr int kExitUsage = 64;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int cmd_check(const std::string& path, bool json) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "error: cannot read " << path << "\n";
    return kExitUsage;
  }
  luc::ParseResult pr = luc::parse_program(text);
  if (const auto* perr = std::get_if<luc::ParseError>(&pr)) {
    if (json) {
      nlohmann::json j;
      j["type"] = nullptr;
      j["post_constraints"] = nullptr;
      j["errors"] = {perr->render(path)};
      std::cout << j.dump() << "\n";
    } else {
      std::cerr << perr->render(path) << "\n";
    }
    return kExitParseError;
  }
  luc::CheckResult cr = luc::typecheck_program(std::get<luc::ExprPtr>(pr));
  if (const auto* terr = std::get_if<luc::TypeError>(&cr)) {
    if (json) {
      nlohmann::json j;
      j["type"] = nullptr;
      j["post_constraints"] = nullptr;
      j["errors"] = {terr->render(path)};
      std::cout << j.dump() << "\n";
    } else {
      std::cerr << terr->render(path) << "\n";
    }
    return kExitTypeError;
  }
  const auto& r = std::get<luc::TypeResult>(cr);
  if (json) {
    nlohmann::json j;
    j["type"] = luc::to_string(r.type);
    j["post_constraints"] = luc::to_string(r.post);
    j["errors"] = nlohmann::json::array();
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "type: " << luc::to_string(r.type)
              << "  post: " << luc::to_string(r.post) << "\n";
  }
  return kExitOk;
}

int cmd_run(const std::string& path, long max_steps, bool trace, bool unsafe) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "error: cannot read " << path << "\n";
    return kExitUsage;
  }
  luc::ParseResult pr = luc::parse_program(text);
  if (const auto* perr = std::get_if<luc::ParseError>(&pr)) {
    std::cerr << perr->render(path) << "\n";
    return kExitParseError;
  }
  luc::ExprPtr e = std::get<luc::ExprPtr>(pr);

  if (!unsafe) {
    luc::CheckResult cr = luc::typecheck_program(e);
    if (const auto* terr = std::get_if<luc::TypeError>(&cr)) {
      std::cerr << terr->render(path) << "\n";
      return kExitTypeError;
    }
  }

  luc::StepCallback on_step;
  if (trace) {
    on_step = [](long n, luc::Rule rule, const luc::Config& after) {
      std::cout << "step=" << n << " rule=" << luc::rule_name(rule)
                << " redex=" << luc::pretty_print(after.redex)
                << " store=" << luc::store_to_string(after.store) << "\n";
    };
  }
  luc::RunResult rr = luc::run(e, max_steps, on_step);

  if (const auto* done = std::get_if<luc::Done>(&rr.outcome)) {
    std::cout << "value: " << luc::pretty_print(done->value) << "\n";
    std::cout << "steps: " << rr.steps << "\n";
    std::cout << "store: " << luc::store_to_string(done->store) << "\n";
    return kExitOk;
  }
  if (const auto* st = std::get_if<luc::Stuck>(&rr.outcome)) {
    std::cout << "stuck: " << luc::stuck_reason_name(st->reason)
              << " at " << luc::pretty_print(st->config.redex) << "\n";
    std::cout << "steps: " << rr.steps << "\n";
    std::cout << "store: " << luc::store_to_string(st->config.store) << "\n";
    return kExitStuck;
  }
  std::cout << "step limit (" << rr.steps << " steps)\n";
  return kExitStepLimit;
}

int cmd_fuzz(const luc::FuzzOptions& opts) {
  luc::FuzzSummary summary = luc::run_fuzz(opts);
  std::cout << luc::render_fuzz_report(opts, summary);
  return summary.clean() ? kExitOk : kExitTypeError;
}

int cmd_props(const luc::PropsOptions& opts) {
  luc::PropsSummary summary = luc::run_props(opts);
  std::cout << luc::render_props_report(summary);
  return summary.all_required_hold() ? kExitOk : kExitTypeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"luc: a little object calculus with flow-sensitive "
               "structural typing"};
  app.require_subcommand(1);

  std::string path;
  bool json = false;
  auto* check = app.add_subcommand("check", "parse and typecheck a program");
  check->add_option("file", path, "program file (.luc)")->required();
  check->add_flag("--json", json, "machine-readable output");

  std::string run_path;
  long max_steps = 100000;
  bool trace = false;
  bool unsafe = false;
  auto* run = app.add_subcommand("run", "typecheck then evaluate a program");
  run->add_option("file", run_path, "program file (.luc)")->required();
  run->add_option("--max-steps", max_steps, "step budget (default 100000)");
  run->add_flag("--trace", trace, "print one line per step");
  run->add_flag("--unsafe", unsafe, "skip the typechecker");

  luc::FuzzOptions fuzz_opts;
  auto* fuzz = app.add_subcommand(
      "fuzz", "generate well-typed programs and check the soundness claims");
  fuzz->add_option("--seed", fuzz_opts.seed, "generator seed (default 0)");
  fuzz->add_option("--count", fuzz_opts.count, "number of trials (default 1000)");
  fuzz->add_option("--depth", fuzz_opts.depth, "generation depth (default 6)");
  fuzz->add_flag("--subject-reduction", fuzz_opts.subject_reduction,
                 "re-typecheck the residual after every step");
  fuzz->add_option("--max-steps", fuzz_opts.max_steps,
                   "per-trial step budget (default 100000)");

  luc::PropsOptions props_opts;
  long iters = 0;
  auto* props = app.add_subcommand(
      "props", "run the constraint-algebra and satisfaction property suites");
  props->add_option("--iters", iters,
                    "iterations for the algebra laws (satisfaction lemmas "
                    "run half as many; defaults 10000/5000)");
  props->add_option("--seed", props_opts.seed, "suite seed (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (check->parsed()) return cmd_check(path, json);
  if (run->parsed()) return cmd_run(run_path, max_steps, trace, unsafe);
  if (fuzz->parsed()) return cmd_fuzz(fuzz_opts);
  if (props->parsed()) {
    if (iters > 0) {
      props_opts.algebra_iters = iters;
      props_opts.model_iters = std::max(1L, iters / 2);
    }
    return cmd_props(props_opts);
  }
  return kExitUsage;
}
