#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "luc/types.hpp"

namespace luc {

struct SourceSpan {
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  std::uint32_t line = 1;
  std::uint32_t col = 1;
};

struct Const {
  std::variant<std::int64_t, bool, std::string> v;

  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_str() const { return std::holds_alternative<std::string>(v); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const std::string& as_str() const { return std::get<std::string>(v); }

  // Base type name from the fixed TConst set {int, bool, str}.
  const char* base_name() const {
    if (is_int()) return "int";
    if (is_bool()) return "bool";
    return "str";
  }
};

bool const_equal(const Const& a, const Const& b);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class Op { Add, Sub, Mul, Eq, Lt, Not };

const char* op_name(Op op);

struct Var {
  std::string name;
};
struct Lit {
  Const value;
};
struct FuncVal {
  std::vector<std::string> params;
  TypePtr annot;  // arrow type
  ExprPtr body;
};
struct LocRef {
  LocId loc;
};
struct Let {
  std::string binder;
  ExprPtr bound;
  ExprPtr body;
};
struct Apply {
  ExprPtr callee;
  std::vector<ExprPtr> args;
};
struct PrimApp {
  Op op;
  std::vector<ExprPtr> args;
};
struct If {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;
};
// Subject is a Var or LocRef expression (source programs: Var only).
struct IfHasAttr {
  ExprPtr subject;
  std::string attr;
  ExprPtr then_branch;
  ExprPtr else_branch;
};
struct Break {
  std::string label;
  ExprPtr arg;
};
struct Labeled {
  std::string label;
  TypePtr annot;  // zero-parameter arrow with empty precondition
  ExprPtr body;
};
struct New {};
struct FieldSet {
  ExprPtr subject;
  std::string field;
  ExprPtr value;
};
struct FieldGet {
  ExprPtr subject;
  std::string field;
};

struct Expr {
  using Node = std::variant<Var, Lit, FuncVal, LocRef, Let, Apply, PrimApp, If,
                            IfHasAttr, Break, Labeled, New, FieldSet, FieldGet>;
  Node node;
  SourceSpan span;
  // Stable node identity; preserved by substitution, used by the harness
  // to align static new-sites with runtime allocations.
  std::uint32_t id = 0;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

ExprPtr mk(Expr::Node node, SourceSpan span = {}, std::uint32_t id = 0);

ExprPtr e_var(std::string name);
ExprPtr e_int(std::int64_t v);
ExprPtr e_bool(bool v);
ExprPtr e_str(std::string v);
ExprPtr e_func(std::vector<std::string> params, TypePtr annot, ExprPtr body);
ExprPtr e_loc(LocId l);
ExprPtr e_let(std::string binder, ExprPtr bound, ExprPtr body);
ExprPtr e_apply(ExprPtr callee, std::vector<ExprPtr> args);
ExprPtr e_prim(Op op, std::vector<ExprPtr> args);
ExprPtr e_if(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr e_ifhasattr(ExprPtr subject, std::string attr, ExprPtr t, ExprPtr e);
ExprPtr e_break(std::string label, ExprPtr arg);
ExprPtr e_labeled(std::string label, TypePtr annot, ExprPtr body);
ExprPtr e_new();
ExprPtr e_fieldset(ExprPtr subject, std::string field, ExprPtr value);
ExprPtr e_fieldget(ExprPtr subject, std::string field);

// Values are variables, constants, function values and locations.
bool is_value(const Expr& e);
inline bool is_value(const ExprPtr& e) { return is_value(*e); }

// Structural equality; spans and node ids are metadata and ignored.
bool expr_equal(const Expr& a, const Expr& b);
inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  return expr_equal(*a, *b);
}

void free_vars(const Expr& e, std::set<std::string>& out);
std::set<std::string> free_vars(const Expr& e);

bool source_form(const Expr& e);  // true iff no location occurs

// Capture-avoiding substitution of values for free variables.
// Binders shadow; clashing function parameters are renamed.
ExprPtr substitute(const ExprPtr& e, const std::string& x, const ExprPtr& v);
ExprPtr substitute_many(const ExprPtr& e,
                        const std::map<std::string, ExprPtr>& sub);

// Rebuilds the tree with fresh sequential node ids (preorder).
ExprPtr assign_ids(const ExprPtr& e, std::uint32_t& next_id);

}  // namespace luc
