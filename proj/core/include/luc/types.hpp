#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace luc {

class Type;
using TypePtr = std::shared_ptr<const Type>;

// Record types are canonical: fields sorted by name, names unique.
using RecordType = std::map<std::string, TypePtr>;

// A constraint set binds each type variable to at most one record.
using ConstraintSet = std::map<std::string, RecordType>;

using TypeEnv = std::map<std::string, TypePtr>;

using LocId = std::int64_t;
using LocEnv = std::map<LocId, TypePtr>;

struct BaseType {
  std::string name;  // one of "int", "bool", "str"
};

struct TypeVarRef {
  std::string name;
};

struct ArrowType {
  ConstraintSet pre;
  std::vector<TypePtr> params;
  TypePtr result;
  ConstraintSet post;
};

// Normalized disjunction: flat (no nested OrType), duplicate-free,
// sorted by type_cmp, and of size >= 2.
struct OrType {
  std::vector<TypePtr> alts;
};

struct BottomType {};

// Internal result type of break; unparsable, absorbed by joins.
struct NeverType {};

class Type {
 public:
  using Node = std::variant<BaseType, TypeVarRef, ArrowType, OrType,
                            BottomType, NeverType>;

  explicit Type(Node n) : node(std::move(n)) {}
  Node node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

// Constructors. t_or normalizes its argument list; the others produce
// already-normal nodes when given normal children.
TypePtr t_base(std::string name);
TypePtr t_int();
TypePtr t_bool();
TypePtr t_str();
TypePtr t_var(std::string name);
TypePtr t_bot();
TypePtr t_never();
TypePtr t_arrow(ConstraintSet pre, std::vector<TypePtr> params, TypePtr result,
                ConstraintSet post);
TypePtr t_or(std::vector<TypePtr> alts);

// Total order on normalized types; drives disjunct sorting and map keys.
int type_cmp(const Type& a, const Type& b);
int record_cmp(const RecordType& a, const RecordType& b);
int constraints_cmp(const ConstraintSet& a, const ConstraintSet& b);

// Deep canonical form: flattens/dedupes/sorts every disjunction,
// recursing into arrows, records and constraint sets. Idempotent.
TypePtr normalize_type(const TypePtr& t);
RecordType normalize_record(const RecordType& r);
ConstraintSet normalize_constraints(const ConstraintSet& c);

// Structural equality of canonical forms.
bool type_equal(const TypePtr& a, const TypePtr& b);
bool record_equal(const RecordType& a, const RecordType& b);
bool constraints_equal(const ConstraintSet& a, const ConstraintSet& b);

// The disjuncts of t: {t} when t is not a disjunction.
std::vector<TypePtr> disjuncts(const TypePtr& t);

bool contains_bottom(const TypePtr& t);

// Join of the non-bottom disjuncts of t; nullopt when all are bottom.
std::optional<TypePtr> non_bottom_part(const TypePtr& t);

// Consistent renaming of type variables, recursing into arrows.
TypePtr rename_type_vars(const TypePtr& t,
                         const std::map<std::string, std::string>& ren);
RecordType rename_record_vars(const RecordType& r,
                              const std::map<std::string, std::string>& ren);
ConstraintSet rename_constraint_vars(
    const ConstraintSet& c, const std::map<std::string, std::string>& ren);

// Rendering in the surface type syntax (re-parseable).
std::string to_string(const TypePtr& t);
std::string to_string(const RecordType& r);
std::string to_string(const ConstraintSet& c);

}  // namespace luc
