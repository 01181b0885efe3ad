// Acceptance suite: runs each numbered criterion at its stated size and
// tolerance and prints one PASS/FAIL line per criterion.
//
// usage: acceptance [N | --all] --luc <path-to-cli> --corpus <dir>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "luc/eval.hpp"
#include "luc/harness.hpp"
#include "luc/parser.hpp"
#include "luc/pretty.hpp"
#include "luc/typecheck.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_luc_path;
std::string g_corpus_dir;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  std::string full = cmd + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.output.append(buf.data(), n);
  int status = pclose(pipe);
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  return r;
}

bool read_file(const fs::path& p, std::string& out) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Corpus files declare expectations in leading comments:
//   # expect-error: <TypeErrorKind>
//   # expect-stuck: <StuckReason>
std::string header_field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) != 0) break;
    auto pos = line.find(key + ":");
    if (pos != std::string::npos) {
      std::string v = line.substr(pos + key.size() + 1);
      while (!v.empty() && (v.front() == ' ' || v.front() == '\t'))
        v.erase(v.begin());
      while (!v.empty() && (v.back() == ' ' || v.back() == '\r'))
        v.pop_back();
      return v;
    }
  }
  return "";
}

std::vector<fs::path> corpus_files(const std::string& prefix) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(g_corpus_dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() != ".luc") continue;
    std::string name = entry.path().filename().string();
    if (prefix.empty() || name.rfind(prefix, 0) == 0)
      out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct CriterionOutcome {
  bool pass = false;
  std::string detail;
};

const luc::LawResult* find_law(const luc::PropsSummary& s,
                               const std::string& prefix) {
  for (const auto& l : s.laws)
    if (l.name.rfind(prefix, 0) == 0) return &l;
  return nullptr;
}

// 1. Constraint-algebra laws, 10,000 instances each, under 60 s.
CriterionOutcome criterion1() {
  auto t0 = Clock::now();
  luc::PropsOptions opts;
  opts.algebra_iters = 10000;
  opts.model_iters = 1;
  luc::PropsSummary s = luc::run_props(opts);
  double secs = seconds_since(t0);

  std::ostringstream os;
  bool pass = true;
  for (const char* prefix :
       {"entails-reflexive", "entails-transitive-derived-chain",
        "entails-transitive-random-triples", "merge-entailment entails",
        "update-entailment entails"}) {
    const auto* law = find_law(s, prefix);
    if (!law) {
      pass = false;
      os << " [missing law " << prefix << "]";
      continue;
    }
    os << " " << law->name << "=" << (law->trials - law->failures) << "/"
       << law->trials;
    if (law->failures > 0) pass = false;
  }
  os << " time=" << secs << "s";
  if (secs >= 60.0) pass = false;
  return {pass, os.str()};
}

// 2. Soundness of entailment against stores, 5,000 trials.
CriterionOutcome criterion2() {
  luc::PropsOptions opts;
  opts.algebra_iters = 1;
  opts.model_iters = 5000;
  luc::PropsSummary s = luc::run_props(opts);
  const auto* law = find_law(s, "entailment-soundness");
  if (!law) return {false, "law missing"};
  std::ostringstream os;
  os << " ok=" << (law->trials - law->failures) << "/" << law->trials;
  if (law->failures > 0) os << " counterexample: " << law->counterexample;
  return {law->failures == 0, os.str()};
}

// 3. hasfield and value-completeness suites, 5,000 instances each.
CriterionOutcome criterion3() {
  luc::PropsOptions opts;
  opts.algebra_iters = 1;
  opts.model_iters = 5000;
  luc::PropsSummary s = luc::run_props(opts);
  const auto* hf = find_law(s, "hasfield");
  const auto* vc = find_law(s, "value-completeness");
  if (!hf || !vc) return {false, "law missing"};
  std::ostringstream os;
  os << " hasfield=" << (hf->trials - hf->failures) << "/" << hf->trials
     << " value-completeness=" << (vc->trials - vc->failures) << "/"
     << vc->trials;
  return {hf->failures == 0 && vc->failures == 0, os.str()};
}

// 4. Progress + soundness fuzz: 1000 programs at depth 6, under 5 min.
CriterionOutcome criterion4() {
  auto t0 = Clock::now();
  luc::FuzzOptions opts;
  opts.count = 1000;
  opts.depth = 6;
  luc::FuzzSummary s = luc::run_fuzz(opts);
  double secs = seconds_since(t0);
  std::ostringstream os;
  os << " pass=" << s.pass << " diverged=" << s.diverged
     << " progress=" << s.progress_violations
     << " soundness=" << s.soundness_violations
     << " rejected=" << s.rejected << " time=" << secs << "s";
  bool pass = s.progress_violations == 0 && s.soundness_violations == 0 &&
              s.rejected == 0 && secs < 300.0;
  if (!s.failures.empty())
    os << " first: " << s.failures[0].details
       << " program: " << s.failures[0].program;
  return {pass, os.str()};
}

// 5. Subject-reduction replay: 200 fuzzed programs at depth 5 plus the
// well-typed corpus, every step re-checked, under 5 min.
CriterionOutcome criterion5() {
  auto t0 = Clock::now();
  luc::FuzzOptions opts;
  opts.count = 200;
  opts.depth = 5;
  opts.subject_reduction = true;
  luc::FuzzSummary s = luc::run_fuzz(opts);
  std::ostringstream os;
  os << " fuzz_pass=" << s.pass
     << " sr_violations=" << s.subject_reduction_violations;
  bool pass = s.clean();
  if (!s.failures.empty())
    os << " first: " << s.failures[0].details
       << " program: " << s.failures[0].program;

  long corpus_ok = 0, corpus_total = 0;
  luc::TrialOptions trial_opts;
  trial_opts.subject_reduction = true;
  for (const auto& path : corpus_files("ok_")) {
    std::string text;
    if (!read_file(path, text)) continue;
    luc::ParseResult pr = luc::parse_program(text);
    if (!std::holds_alternative<luc::ExprPtr>(pr)) {
      pass = false;
      os << " [parse failure " << path.filename().string() << "]";
      continue;
    }
    ++corpus_total;
    luc::TrialReport r =
        luc::soundness_trial(std::get<luc::ExprPtr>(pr), 0, trial_opts);
    if (r.verdict == luc::Verdict::Pass || r.verdict == luc::Verdict::Diverged) {
      ++corpus_ok;
    } else {
      pass = false;
      os << " [" << path.filename().string() << ": "
         << luc::verdict_name(r.verdict) << " " << r.details << "]";
    }
  }
  double secs = seconds_since(t0);
  os << " corpus=" << corpus_ok << "/" << corpus_total << " time=" << secs
     << "s";
  if (corpus_total < 50) {
    pass = false;
    os << " [corpus smaller than 50 programs]";
  }
  if (secs >= 300.0) pass = false;
  return {pass, os.str()};
}

// 6. Negative controls: ill-typed corpus programs are rejected with the
// expected error kind; the runtime-failing subset sticks accordingly.
CriterionOutcome criterion6() {
  std::ostringstream os;
  bool pass = true;
  long total = 0, stuck_checked = 0;
  for (const auto& path : corpus_files("bad_")) {
    std::string text;
    if (!read_file(path, text)) continue;
    std::string want_err = header_field(text, "expect-error");
    std::string want_stuck = header_field(text, "expect-stuck");
    if (want_err.empty()) {
      pass = false;
      os << " [" << path.filename().string() << ": no expect-error header]";
      continue;
    }
    ++total;
    CommandResult check =
        run_command(g_luc_path + " check " + path.string());
    if (check.exit_code != 1 ||
        check.output.find(want_err) == std::string::npos) {
      pass = false;
      os << " [" << path.filename().string() << ": check exit="
         << check.exit_code << " wanted " << want_err << " got: "
         << check.output << "]";
    }
    if (!want_stuck.empty()) {
      ++stuck_checked;
      CommandResult runr = run_command(g_luc_path + " run --unsafe " +
                                       path.string());
      if (runr.exit_code != 3 ||
          runr.output.find(want_stuck) == std::string::npos) {
        pass = false;
        os << " [" << path.filename().string() << ": run exit="
           << runr.exit_code << " wanted stuck " << want_stuck << "]";
      }
    }
  }
  os << " programs=" << total << " runtime_checked=" << stuck_checked;
  if (total < 10) {
    pass = false;
    os << " [need at least 10 negative programs]";
  }
  return {pass, os.str()};
}

// 7. Parser round-trip on the corpus and 1,000 generated programs.
CriterionOutcome criterion7() {
  long ok = 0, total = 0;
  std::ostringstream os;
  bool pass = true;
  for (const auto& path : corpus_files("")) {
    std::string text;
    if (!read_file(path, text)) continue;
    luc::ParseResult pr = luc::parse_program(text);
    if (!std::holds_alternative<luc::ExprPtr>(pr)) continue;  // bad_* parse-error cases
    ++total;
    luc::ExprPtr e = std::get<luc::ExprPtr>(pr);
    luc::ParseResult again = luc::parse_program(luc::pretty_print(e));
    if (std::holds_alternative<luc::ExprPtr>(again) &&
        luc::expr_equal(std::get<luc::ExprPtr>(again), e)) {
      ++ok;
    } else {
      pass = false;
      os << " [corpus round-trip failed: " << path.filename().string() << "]";
    }
  }
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    luc::ExprPtr e = luc::generate_program(seed, 6);
    ++total;
    luc::ParseResult again = luc::parse_program(luc::pretty_print(e));
    if (std::holds_alternative<luc::ExprPtr>(again) &&
        luc::expr_equal(std::get<luc::ExprPtr>(again), e)) {
      ++ok;
    } else {
      pass = false;
      os << " [generated round-trip failed: seed " << seed << "]";
    }
  }
  os << " ok=" << ok << "/" << total;
  return {pass && ok == total, os.str()};
}

// 8. Determinism: repeated fuzz runs with the same seed are byte-identical.
CriterionOutcome criterion8() {
  std::string cmd =
      g_luc_path + " fuzz --seed 42 --count 200 --depth 5";
  CommandResult a = run_command(cmd);
  CommandResult b = run_command(cmd);
  std::ostringstream os;
  os << " bytes=" << a.output.size();
  bool pass = a.exit_code == 0 && b.exit_code == 0 && a.output == b.output &&
              !a.output.empty();
  if (a.output != b.output) os << " [outputs differ]";
  if (a.exit_code != 0) os << " [exit " << a.exit_code << "]";
  return {pass, os.str()};
}

struct Criterion {
  int number;
  const char* title;
  CriterionOutcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "constraint-algebra laws (10k instances each, <60s)", criterion1},
    {2, "entailment soundness against stores (5k trials)", criterion2},
    {3, "hasfield + value-completeness (5k instances each)", criterion3},
    {4, "progress + soundness fuzz (1000 programs, depth 6, <5min)",
     criterion4},
    {5, "subject-reduction replay (200 fuzzed + corpus, <5min)", criterion5},
    {6, "negative controls (>=10 ill-typed programs)", criterion6},
    {7, "parser round-trip (corpus + 1000 generated)", criterion7},
    {8, "fuzz determinism (byte-identical reports)", criterion8},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--luc" && i + 1 < argc) {
      g_luc_path = argv[++i];
    } else if (arg == "--corpus" && i + 1 < argc) {
      g_corpus_dir = argv[++i];
    } else if (arg == "--all") {
      for (const auto& c : kCriteria) selected.push_back(c.number);
    } else {
      try {
        selected.push_back(std::stoi(arg));
      } catch (...) {
        std::cerr << "usage: acceptance [N | --all] --luc <cli> --corpus "
                     "<dir>\n";
        return 2;
      }
    }
  }
  if (selected.empty())
    for (const auto& c : kCriteria) selected.push_back(c.number);

  bool all_pass = true;
  for (int n : selected) {
    for (const auto& c : kCriteria) {
      if (c.number != n) continue;
      CriterionOutcome out = c.fn();
      std::cout << "CRITERION " << c.number << " ["
                << (out.pass ? "PASS" : "FAIL") << "] " << c.title << ":"
                << out.detail << "\n";
      if (!out.pass) all_pass = false;
    }
  }
  return all_pass ? 0 : 1;
}
