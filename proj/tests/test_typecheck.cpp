#include "doctest.h"
#include "luc/harness.hpp"
#include "luc/parser.hpp"
#include "luc/pretty.hpp"
#include "luc/typecheck.hpp"

#include <string>
#include <variant>

using namespace luc;

namespace {

ExprPtr parse_ok(const std::string& text) {
  ParseResult r = parse_program(text);
  REQUIRE(std::holds_alternative<ExprPtr>(r));
  return std::get<ExprPtr>(r);
}

TypeResult check_ok(const std::string& text) {
  CheckResult r = typecheck_program(parse_ok(text));
  if (const auto* e = std::get_if<TypeError>(&r)) {
    INFO(e->render());
    REQUIRE(false);
  }
  return std::get<TypeResult>(r);
}

TypeErrorKind check_err(const std::string& text) {
  CheckResult r = typecheck_program(parse_ok(text));
  REQUIRE(std::holds_alternative<TypeError>(r));
  return std::get<TypeError>(r).kind;
}

ConstraintSet cs(std::initializer_list<std::pair<const char*, RecordType>> bs) {
  ConstraintSet out;
  for (const auto& [v, r] : bs) out[v] = r;
  return out;
}

}  // namespace

TEST_CASE("constants synthesize their base type under empty contexts") {
  TypeResult r = check_ok("5");
  CHECK(type_equal(r.type, t_int()));
  CHECK(r.post.empty());
}

TEST_CASE("new introduces a fresh variable constrained to the empty record") {
  CheckResult cr = synthesize(TypeState{}, e_new());
  const auto& r = std::get<TypeResult>(cr);
  CHECK(to_string(r.type) == "X0");
  CHECK(constraints_equal(r.post, cs({{"X0", RecordType{}}})));
}

TEST_CASE("update on a fresh field extends the record") {
  // Oracle: (new), (let), (update-fresh) by hand give int ; X0 <| {a: int}.
  TypeResult r = check_ok("let x = new in x.a := 1");
  CHECK(type_equal(r.type, t_int()));
  CHECK(constraints_equal(r.post, cs({{"X0", RecordType{{"a", t_int()}}}})));
}

TEST_CASE("update on a known field forgets the old type") {
  TypeResult r = check_ok("let x = new in let u = x.a := 1 in x.a := \"s\"");
  CHECK(type_equal(r.type, t_str()));
  CHECK(constraints_equal(r.post, cs({{"X0", RecordType{{"a", t_str()}}}})));
}

TEST_CASE("access requires a definite field type") {
  TypeState st;
  st.pre = cs({{"X", RecordType{{"a", t_or({t_int(), t_bot()})}}}});
  st.env["x"] = t_var("X");
  CheckResult r = synthesize(st, e_fieldget(e_var("x"), "a"));
  REQUIRE(std::holds_alternative<TypeError>(r));
  CHECK(std::get<TypeError>(r).kind == TypeErrorKind::IndefiniteFieldType);
}

TEST_CASE("access on a definite field returns it and keeps constraints") {
  TypeState st;
  st.pre = cs({{"X", RecordType{{"a", t_int()}}}});
  st.env["x"] = t_var("X");
  CheckResult r = synthesize(st, e_fieldget(e_var("x"), "a"));
  const auto& res = std::get<TypeResult>(r);
  CHECK(type_equal(res.type, t_int()));
  CHECK(constraints_equal(res.post, st.pre));
}

TEST_CASE("locations synthesize from the location environment") {
  TypeState st;
  st.locs[3] = t_var("R3");
  CheckResult r = synthesize(st, e_loc(3));
  CHECK(type_equal(std::get<TypeResult>(r).type, t_var("R3")));
  CheckResult bad = synthesize(TypeState{}, e_loc(3));
  CHECK(std::get<TypeError>(bad).kind == TypeErrorKind::UnboundLocation);
}

TEST_CASE("ifhasattr on an unknown attribute leaves both branches unaided") {
  // X0 <| {} has no a, the filter is a no-op, so the access still fails.
  CHECK(check_err("let x = new in ifhasattr(x, a) then x.a else 0") ==
        TypeErrorKind::MissingField);
}

TEST_CASE("ifhasattr strips bottom in the positive branch") {
  TypeResult r = check_ok(
      "let x = new in "
      "let u = if true then x.a := 1 else 0 in "
      "ifhasattr(x, a) then x.a else 7");
  CHECK(type_equal(r.type, t_int()));
  // merged branches: the positive one saw a: int, the negative a: int\/bot
  CHECK(constraints_equal(
      r.post, cs({{"X0", RecordType{{"a", t_or({t_int(), t_bot()})}}}})));
}

TEST_CASE("label and break: postconditions and result types") {
  TypeResult r = check_ok("label n : [ ]( ) -> int [ ] { break n 7 }");
  CHECK(type_equal(r.type, t_int()));
  CHECK(r.post.empty());
}

TEST_CASE("branch join produces disjunction and branch-merged constraints") {
  TypeResult r = check_ok(
      "let x = new in if true then (x.a := 1) else \"s\"");
  CHECK(type_equal(r.type, t_or({t_int(), t_str()})));
  CHECK(constraints_equal(
      r.post, cs({{"X0", RecordType{{"a", t_or({t_int(), t_bot()})}}}})));
}

TEST_CASE("join_branches unit behavior") {
  ConstraintSet psi = cs({{"X", RecordType{{"a", t_int()}}}});
  TypeResult a{t_int(), psi, 0, {}};
  TypeResult b{t_int(), psi, 0, {}};
  auto j1 = std::get<TypeResult>(join_branches(a, b));
  CHECK(type_equal(j1.type, t_int()));
  CHECK(constraints_equal(j1.post, psi));  // t \/ t collapses to t

  TypeResult c{t_str(), cs({{"X", RecordType{}}}), 0, {}};
  auto j2 = std::get<TypeResult>(join_branches(a, c));
  CHECK(type_equal(j2.type, t_or({t_int(), t_str()})));
  CHECK(constraints_equal(
      j2.post, cs({{"X", RecordType{{"a", t_or({t_int(), t_bot()})}}}})));

  TypeResult nv{t_never(), cs({{"Y", RecordType{}}}), 0, {}};
  auto j3 = std::get<TypeResult>(join_branches(nv, a));
  CHECK(type_equal(j3.type, t_int()));
  CHECK(j3.post.count("Y") == 1);
  CHECK(j3.post.count("X") == 1);
}

TEST_CASE("function declaration relies on its annotation") {
  TypeResult r = check_ok(
      "let x = new in "
      "let u = x.a := 1 in "
      "let f = func(p) : [X0 <| {a: int}](int) -> int [X0 <| {a: int}] "
      "{ add(p, x.a) } in f(2)");
  CHECK(type_equal(r.type, t_int()));
  CHECK(constraints_equal(r.post, cs({{"X0", RecordType{{"a", t_int()}}}})));
}

TEST_CASE("call postconditions override the caller's knowledge") {
  TypeResult r = check_ok(
      "let x = new in "
      "let u = x.a := 1 in "
      "let f = func() : [X0 <| {a: int}]() -> str [X0 <| {a: str}] "
      "{ x.a := \"s\" } in f()");
  CHECK(type_equal(r.type, t_str()));
  CHECK(constraints_equal(r.post, cs({{"X0", RecordType{{"a", t_str()}}}})));
}

TEST_CASE("typing errors carry the right kinds") {
  CHECK(check_err("y") == TypeErrorKind::UnboundVariable);
  CHECK(check_err("if 1 then 2 else 3") == TypeErrorKind::ConditionNotBool);
  CHECK(check_err("let x = 1 in x.a") == TypeErrorKind::NotAnObjectVariable);
  CHECK(check_err("let x = new in x.a") == TypeErrorKind::MissingField);
  CHECK(check_err("add(1, true)") == TypeErrorKind::PrimopSignatureMismatch);
  CHECK(check_err("add(1)") == TypeErrorKind::ArityMismatch);
  CHECK(check_err("func(x): [ ](int) -> int [ ] { x }(1, 2)") ==
        TypeErrorKind::ArityMismatch);
  CHECK(check_err("func(x): [ ](int) -> str [ ] { x }") ==
        TypeErrorKind::AnnotationMismatch);
  CHECK(check_err("let x = 5 in x(1)") == TypeErrorKind::AnnotationMismatch);
  CHECK(check_err("break n 5") == TypeErrorKind::UnboundVariable);
  CHECK(check_err("label n : [ ]( ) -> int [ ] { break n \"s\" }") ==
        TypeErrorKind::BreakPostconditionFailure);
  CHECK(check_err("label n : [ ]( ) -> int [X9 <| {a: int}] { 7 }") ==
        TypeErrorKind::LabelPostconditionFailure);
  CHECK(check_err(
            "func(x): [X <| {a: bot}](X) -> int [X <| {a: bot}] "
            "{ ifhasattr(x, a) then 1 else 2 }") ==
        TypeErrorKind::FilterEmptiesField);
  CHECK(check_err(
            "let x = new in "
            "let f = func() : [X0 <| {a: int}]() -> int [X0 <| {a: int}] "
            "{ x.a } in f()") == TypeErrorKind::CallPreconditionFailure);
}

TEST_CASE("value stability: values never change the constraint set") {
  Rng rng(31);
  TypePtr annot = t_arrow({}, {t_int()}, t_int(), {});
  std::vector<ExprPtr> values = {e_int(3), e_bool(true), e_str("v"),
                                 e_func({"p"}, annot, e_var("p")),
                                 e_var("x"), e_loc(0)};
  for (int i = 0; i < 200; ++i) {
    TypeState st;
    st.pre = random_constraints(rng, 2, 4, 4);
    st.env["x"] = t_var("X0");
    st.locs[0] = t_var("L0");
    for (const auto& v : values) {
      CheckResult r = synthesize(st, v);
      REQUIRE(std::holds_alternative<TypeResult>(r));
      const auto& res = std::get<TypeResult>(r);
      CHECK(constraints_equal(res.post, st.pre));
      CHECK(entails(st.pre, res.post));
      // the type does not depend on the constraint set
      TypeState st2 = st;
      st2.pre = random_constraints(rng, 2, 4, 4);
      CheckResult r2 = synthesize(st2, v);
      REQUIRE(std::holds_alternative<TypeResult>(r2));
      CHECK(type_equal(res.type, std::get<TypeResult>(r2).type));
    }
  }
}

TEST_CASE("weakening: fresh env or loc bindings do not change results") {
  ExprPtr e = parse_ok("let x = new in x.a := 1");
  TypeState st;
  CheckResult r1 = synthesize(st, e);
  TypeState bigger;
  bigger.env["unused"] = t_str();
  bigger.locs[9] = t_var("R9");
  CheckResult r2 = synthesize(bigger, e);
  const auto& base = std::get<TypeResult>(r1);
  const auto& ext = std::get<TypeResult>(r2);
  CHECK(type_equal(base.type, ext.type));
  CHECK(constraints_equal(base.post, ext.post));
}

TEST_CASE("checking is deterministic") {
  ExprPtr e = generate_program(99, 5);
  auto r1 = typecheck_program(e);
  auto r2 = typecheck_program(e);
  REQUIRE(std::holds_alternative<TypeResult>(r1));
  const auto& a = std::get<TypeResult>(r1);
  const auto& b = std::get<TypeResult>(r2);
  CHECK(type_equal(a.type, b.type));
  CHECK(constraints_equal(a.post, b.post));
  CHECK(a.next_fresh == b.next_fresh);
  CHECK(a.new_vars == b.new_vars);
}

TEST_CASE("result-type variables are described by the final constraints") {
  TypeResult r = check_ok("let x = new in x");
  CHECK(to_string(r.type) == "X0");
  CHECK(r.post.count("X0") == 1);
  // A function whose postcondition drops its result object is rejected
  // at the program boundary.
  CHECK(check_err("let f = func() : [ ]( ) -> X0 [ ] { new } in f()") ==
        TypeErrorKind::AnnotationMismatch);
}
