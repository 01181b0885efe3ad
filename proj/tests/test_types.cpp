#include "doctest.h"
#include "luc/harness.hpp"
#include "luc/types.hpp"

#include <algorithm>
#include <map>
#include <vector>

using namespace luc;

namespace {

// Oracle for normalization: the disjunct leaves of a type, as a multiset
// collapsed to a set of rendered atoms.
void leaves(const TypePtr& t, std::vector<std::string>& out) {
  if (const auto* o = t->as<OrType>()) {
    for (const auto& a : o->alts) leaves(a, out);
    return;
  }
  out.push_back(to_string(normalize_type(t)));
}

std::vector<std::string> leaf_set(const TypePtr& t) {
  std::vector<std::string> out;
  leaves(t, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TEST_CASE("normalize: idempotent fixed points") {
  CHECK(type_equal(t_or({t_int(), t_int()}), t_int()));
  CHECK(to_string(normalize_type(t_bot())) == "bot");
  CHECK(to_string(t_or({t_int(), t_int()})) == "int");
}

TEST_CASE("normalize: nested disjunction flattens to canonical 3-way") {
  TypePtr t = t_or({t_or({t_int(), t_bot()}), t_str()});
  CHECK(to_string(t) == "int \\/ str \\/ bot");
  CHECK(leaf_set(t) == std::vector<std::string>{"bot", "int", "str"});
}

TEST_CASE("normalize agrees with the leaf-set oracle on random types") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    TypePtr t = random_type(rng, 4);
    TypePtr n = normalize_type(t);
    CHECK(leaf_set(t) == leaf_set(n));
    // idempotence
    CHECK(type_cmp(*n, *normalize_type(n)) == 0);
  }
}

TEST_CASE("type_equal: commutativity and variables") {
  CHECK(type_equal(t_or({t_int(), t_str()}), t_or({t_str(), t_int()})));
  CHECK_FALSE(type_equal(t_var("X"), t_var("Y")));
  RecordType r{{"a", t_int()}};
  CHECK(record_equal(r, RecordType{{"a", t_or({t_int(), t_int()})}}));
}

TEST_CASE("type_equal is an equivalence relation on random types") {
  Rng rng(12);
  std::vector<TypePtr> pool;
  for (int i = 0; i < 60; ++i) pool.push_back(random_type(rng, 3));
  for (const auto& a : pool) CHECK(type_equal(a, a));
  for (int i = 0; i < 300; ++i) {
    const TypePtr& a = pool[rng.below(60)];
    const TypePtr& b = pool[rng.below(60)];
    const TypePtr& c = pool[rng.below(60)];
    CHECK(type_equal(a, b) == type_equal(b, a));
    if (type_equal(a, b) && type_equal(b, c)) CHECK(type_equal(a, c));
  }
}

TEST_CASE("arrow types compare componentwise") {
  ConstraintSet pre{{"X", RecordType{{"a", t_int()}}}};
  TypePtr f1 = t_arrow(pre, {t_int()}, t_int(), {});
  TypePtr f2 = t_arrow(pre, {t_int()}, t_int(), {});
  TypePtr f3 = t_arrow({}, {t_int()}, t_int(), {});
  CHECK(type_equal(f1, f2));
  CHECK_FALSE(type_equal(f1, f3));
}

TEST_CASE("rename_type_vars substitutes consistently, including arrows") {
  std::map<std::string, std::string> ren{{"X0", "R0"}};
  TypePtr t = t_arrow({{"X0", RecordType{{"a", t_var("X0")}}}}, {t_var("X1")},
                      t_var("X0"), {});
  TypePtr r = rename_type_vars(t, ren);
  CHECK(to_string(r) == "[R0 <| {a: R0}](X1) -> R0 []");
}

TEST_CASE("rendered types re-render stably") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    TypePtr t = normalize_type(random_type(rng, 4));
    CHECK(to_string(t) == to_string(normalize_type(t)));
  }
}
