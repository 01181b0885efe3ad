#include "doctest.h"
#include "luc/pretty.hpp"
#include "luc/syntax.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

using namespace luc;

namespace {

// ----- de Bruijn oracle for capture-avoiding substitution -----
//
// Terms are converted to a locally-nameless form (bound occurrences by
// index, free occurrences by name), substitution is performed there, and
// results are compared in that form, which is alpha-insensitive.

struct Db;
using DbPtr = std::shared_ptr<const Db>;

struct Db {
  // op encodes the node shape; children in fixed order; names used only
  // for free variables, fields, labels and constants.
  std::string op;
  std::vector<DbPtr> children;
  std::string text;
  int index = -1;  // bound-variable index

  bool operator==(const Db& o) const {
    if (op != o.op || text != o.text || index != o.index ||
        children.size() != o.children.size())
      return false;
    for (size_t i = 0; i < children.size(); ++i)
      if (!(*children[i] == *o.children[i])) return false;
    return true;
  }
};

DbPtr db(std::string op, std::vector<DbPtr> ch = {}, std::string text = "",
         int index = -1) {
  auto d = std::make_shared<Db>();
  d->op = std::move(op);
  d->children = std::move(ch);
  d->text = std::move(text);
  d->index = index;
  return d;
}

DbPtr to_db(const ExprPtr& e, std::vector<std::string>& bound) {
  if (const auto* x = e->as<Var>()) {
    for (int i = static_cast<int>(bound.size()) - 1; i >= 0; --i)
      if (bound[i] == x->name)
        return db("bvar", {}, "", static_cast<int>(bound.size()) - 1 - i);
    return db("fvar", {}, x->name);
  }
  if (const auto* x = e->as<Lit>()) {
    return db("lit", {}, pretty_print(e));
    (void)x;
  }
  if (const auto* x = e->as<FuncVal>()) {
    for (const auto& p : x->params) bound.push_back(p);
    DbPtr body = to_db(x->body, bound);
    for (size_t i = 0; i < x->params.size(); ++i) bound.pop_back();
    return db("func", {body}, to_string(x->annot),
              static_cast<int>(x->params.size()));
  }
  if (const auto* x = e->as<LocRef>())
    return db("loc", {}, std::to_string(x->loc));
  if (const auto* x = e->as<Let>()) {
    DbPtr b = to_db(x->bound, bound);
    bound.push_back(x->binder);
    DbPtr body = to_db(x->body, bound);
    bound.pop_back();
    return db("let", {b, body});
  }
  if (const auto* x = e->as<Apply>()) {
    std::vector<DbPtr> ch{to_db(x->callee, bound)};
    for (const auto& a : x->args) ch.push_back(to_db(a, bound));
    return db("apply", std::move(ch));
  }
  if (const auto* x = e->as<PrimApp>()) {
    std::vector<DbPtr> ch;
    for (const auto& a : x->args) ch.push_back(to_db(a, bound));
    return db("prim", std::move(ch), op_name(x->op));
  }
  if (const auto* x = e->as<If>())
    return db("if", {to_db(x->cond, bound), to_db(x->then_branch, bound),
                     to_db(x->else_branch, bound)});
  if (const auto* x = e->as<IfHasAttr>())
    return db("ifhasattr",
              {to_db(x->subject, bound), to_db(x->then_branch, bound),
               to_db(x->else_branch, bound)},
              x->attr);
  if (const auto* x = e->as<Break>())
    return db("break", {to_db(x->arg, bound)}, x->label);
  if (const auto* x = e->as<Labeled>())
    return db("label", {to_db(x->body, bound)},
              x->label + ":" + to_string(x->annot));
  if (e->is<New>()) return db("new");
  if (const auto* x = e->as<FieldSet>())
    return db("fieldset", {to_db(x->subject, bound), to_db(x->value, bound)},
              x->field);
  if (const auto* x = e->as<FieldGet>())
    return db("fieldget", {to_db(x->subject, bound)}, x->field);
  return db("?");
}

DbPtr to_db(const ExprPtr& e) {
  std::vector<std::string> bound;
  return to_db(e, bound);
}

// Substitution in de Bruijn form: replaces the free variable `name`.
// The replacement is closed in our tests' interesting cases, but bound
// indices in it would need shifting; we only use value replacements whose
// free variables are distinct from all binders, so no shifting arises.
DbPtr db_subst(const DbPtr& t, const std::string& name, const DbPtr& v) {
  if (t->op == "fvar" && t->text == name) return v;
  std::vector<DbPtr> ch;
  ch.reserve(t->children.size());
  for (const auto& c : t->children) ch.push_back(db_subst(c, name, v));
  return db(t->op, std::move(ch), t->text, t->index);
}

}  // namespace

TEST_CASE("substitute: single free occurrence") {
  // let y = x in y  with  x := 5
  ExprPtr e = e_let("y", e_var("x"), e_var("y"));
  ExprPtr r = substitute(e, "x", e_int(5));
  CHECK(expr_equal(r, e_let("y", e_int(5), e_var("y"))));
}

TEST_CASE("substitute: identity redex") {
  ExprPtr r = substitute(e_var("x"), "x", e_loc(1));
  CHECK(expr_equal(r, e_loc(1)));
}

TEST_CASE("substitute: shadowing function parameter") {
  TypePtr annot = t_arrow({}, {t_int()}, t_int(), {});
  ExprPtr f = e_func({"x"}, annot, e_var("x"));
  ExprPtr r = substitute(f, "x", e_int(5));
  CHECK(expr_equal(r, f));
  // de Bruijn oracle agrees
  CHECK(*to_db(r) == *db_subst(to_db(f), "x", to_db(e_int(5))));
}

TEST_CASE("substitute: no-op when the variable is not free") {
  ExprPtr e = e_let("y", e_int(1), e_prim(Op::Add, {e_var("y"), e_int(2)}));
  CHECK(expr_equal(substitute(e, "x", e_int(5)), e));
}

TEST_CASE("substitute: capture avoidance renames the binder") {
  // (func(y) : T { add(x, y) })[x := y]  must not capture the free y.
  TypePtr annot = t_arrow({}, {t_int()}, t_int(), {});
  ExprPtr f = e_func({"y"}, annot, e_prim(Op::Add, {e_var("x"), e_var("y")}));
  ExprPtr r = substitute(f, "x", e_var("y"));
  const auto* fv = r->as<FuncVal>();
  REQUIRE(fv);
  CHECK(fv->params[0] != "y");
  CHECK(*to_db(r) == *db_subst(to_db(f), "x", to_db(e_var("y"))));
}

TEST_CASE("substitute agrees with the de Bruijn oracle on mixed terms") {
  TypePtr annot = t_arrow({}, {t_int()}, t_int(), {});
  std::vector<ExprPtr> terms = {
      e_let("a", e_var("x"), e_prim(Op::Add, {e_var("a"), e_var("x")})),
      e_if(e_var("x"), e_var("x"), e_int(0)),
      e_func({"p"}, annot, e_prim(Op::Mul, {e_var("p"), e_var("x")})),
      e_labeled("n", t_arrow({}, {}, t_int(), {}),
                e_break("n", e_var("x"))),
      e_fieldset(e_var("o"), "f", e_var("x")),
      e_apply(e_func({"x"}, annot, e_var("x")), {e_var("x")}),
  };
  std::vector<ExprPtr> values = {e_int(7), e_loc(3), e_str("v"),
                                 e_func({"q"}, annot, e_var("q"))};
  for (const auto& t : terms) {
    for (const auto& v : values) {
      ExprPtr r = substitute(t, "x", v);
      CHECK(*to_db(r) == *db_subst(to_db(t), "x", to_db(v)));
    }
  }
}

TEST_CASE("substitute_many is simultaneous") {
  // add(x, y)[x := y-free value, y := 1] must not chain substitutions.
  ExprPtr e = e_prim(Op::Add, {e_var("x"), e_var("y")});
  std::map<std::string, ExprPtr> sub{{"x", e_int(5)}, {"y", e_int(1)}};
  ExprPtr r = substitute_many(e, sub);
  CHECK(expr_equal(r, e_prim(Op::Add, {e_int(5), e_int(1)})));
}

TEST_CASE("free_vars and source_form") {
  ExprPtr e = e_let("y", e_var("x"), e_var("y"));
  CHECK(free_vars(*e) == std::set<std::string>{"x"});
  CHECK(source_form(*e));
  CHECK_FALSE(source_form(*e_loc(0)));
}

TEST_CASE("assign_ids numbers nodes in preorder and new nodes uniquely") {
  ExprPtr e = e_let("x", e_new(), e_let("y", e_new(), e_var("x")));
  std::uint32_t next = 0;
  ExprPtr r = assign_ids(e, next);
  CHECK(next == 5);
  const auto* let1 = r->as<Let>();
  REQUIRE(let1);
  CHECK(r->id == 0);
  CHECK(let1->bound->id == 1);  // first new
  const auto* let2 = let1->body->as<Let>();
  REQUIRE(let2);
  CHECK(let2->bound->id == 3);  // second new
}

TEST_CASE("substitution preserves node ids") {
  std::uint32_t next = 0;
  ExprPtr e = assign_ids(e_let("x", e_int(1), e_new()), next);
  const auto* let = e->as<Let>();
  std::uint32_t new_id = let->body->id;
  ExprPtr r = substitute(let->body, "x", e_int(1));
  CHECK(r->id == new_id);
}
