#include "luc/types.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace luc {

TypePtr t_base(std::string name) {
  return std::make_shared<Type>(Type::Node(BaseType{std::move(name)}));
}
TypePtr t_int() {
  static const TypePtr t = t_base("int");
  return t;
}
TypePtr t_bool() {
  static const TypePtr t = t_base("bool");
  return t;
}
TypePtr t_str() {
  static const TypePtr t = t_base("str");
  return t;
}
TypePtr t_var(std::string name) {
  return std::make_shared<Type>(Type::Node(TypeVarRef{std::move(name)}));
}
TypePtr t_bot() {
  static const TypePtr t = std::make_shared<Type>(Type::Node(BottomType{}));
  return t;
}
TypePtr t_never() {
  static const TypePtr t = std::make_shared<Type>(Type::Node(NeverType{}));
  return t;
}
TypePtr t_arrow(ConstraintSet pre, std::vector<TypePtr> params, TypePtr result,
                ConstraintSet post) {
  return std::make_shared<Type>(Type::Node(
      ArrowType{std::move(pre), std::move(params), std::move(result),
                std::move(post)}));
}

namespace {

int tag_rank(const Type& t) {
  // Fixed alternative order; bottom sorts last so "int \/ bot" reads
  // naturally.
  if (t.is<BaseType>()) return 0;
  if (t.is<TypeVarRef>()) return 1;
  if (t.is<ArrowType>()) return 2;
  if (t.is<NeverType>()) return 3;
  if (t.is<BottomType>()) return 4;
  return 5;  // OrType
}

int cmp_strings(const std::string& a, const std::string& b) {
  return a.compare(b);
}

template <typename T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

int type_cmp(const Type& a, const Type& b) {
  int ra = tag_rank(a), rb = tag_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (const auto* ba = a.as<BaseType>())
    return cmp_strings(ba->name, b.as<BaseType>()->name);
  if (const auto* va = a.as<TypeVarRef>())
    return cmp_strings(va->name, b.as<TypeVarRef>()->name);
  if (const auto* fa = a.as<ArrowType>()) {
    const auto* fb = b.as<ArrowType>();
    if (int c = constraints_cmp(fa->pre, fb->pre)) return c;
    if (int c = cmp3(fa->params.size(), fb->params.size())) return c;
    for (size_t i = 0; i < fa->params.size(); ++i)
      if (int c = type_cmp(*fa->params[i], *fb->params[i])) return c;
    if (int c = type_cmp(*fa->result, *fb->result)) return c;
    return constraints_cmp(fa->post, fb->post);
  }
  if (const auto* oa = a.as<OrType>()) {
    const auto* ob = b.as<OrType>();
    if (int c = cmp3(oa->alts.size(), ob->alts.size())) return c;
    for (size_t i = 0; i < oa->alts.size(); ++i)
      if (int c = type_cmp(*oa->alts[i], *ob->alts[i])) return c;
    return 0;
  }
  return 0;  // BottomType / NeverType carry no payload
}

int record_cmp(const RecordType& a, const RecordType& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (int c = cmp_strings(ia->first, ib->first)) return c;
    if (int c = type_cmp(*ia->second, *ib->second)) return c;
  }
  if (ia != a.end()) return 1;
  if (ib != b.end()) return -1;
  return 0;
}

int constraints_cmp(const ConstraintSet& a, const ConstraintSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (int c = cmp_strings(ia->first, ib->first)) return c;
    if (int c = record_cmp(ia->second, ib->second)) return c;
  }
  if (ia != a.end()) return 1;
  if (ib != b.end()) return -1;
  return 0;
}

TypePtr t_or(std::vector<TypePtr> alts) {
  // Flatten, normalize children, dedupe, sort.
  std::vector<TypePtr> flat;
  for (auto& t : alts) {
    TypePtr n = normalize_type(t);
    if (const auto* o = n->as<OrType>())
      flat.insert(flat.end(), o->alts.begin(), o->alts.end());
    else
      flat.push_back(n);
  }
  std::sort(flat.begin(), flat.end(), [](const TypePtr& x, const TypePtr& y) {
    return type_cmp(*x, *y) < 0;
  });
  flat.erase(std::unique(flat.begin(), flat.end(),
                         [](const TypePtr& x, const TypePtr& y) {
                           return type_cmp(*x, *y) == 0;
                         }),
             flat.end());
  assert(!flat.empty());
  if (flat.size() == 1) return flat[0];
  return std::make_shared<Type>(Type::Node(OrType{std::move(flat)}));
}

TypePtr normalize_type(const TypePtr& t) {
  if (const auto* o = t->as<OrType>()) {
    return t_or(o->alts);
  }
  if (const auto* f = t->as<ArrowType>()) {
    std::vector<TypePtr> params;
    params.reserve(f->params.size());
    for (const auto& p : f->params) params.push_back(normalize_type(p));
    return t_arrow(normalize_constraints(f->pre), std::move(params),
                   normalize_type(f->result), normalize_constraints(f->post));
  }
  return t;
}

RecordType normalize_record(const RecordType& r) {
  RecordType out;
  for (const auto& [field, t] : r) out.emplace(field, normalize_type(t));
  return out;
}

ConstraintSet normalize_constraints(const ConstraintSet& c) {
  ConstraintSet out;
  for (const auto& [var, rec] : c) out.emplace(var, normalize_record(rec));
  return out;
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  return type_cmp(*normalize_type(a), *normalize_type(b)) == 0;
}
bool record_equal(const RecordType& a, const RecordType& b) {
  return record_cmp(normalize_record(a), normalize_record(b)) == 0;
}
bool constraints_equal(const ConstraintSet& a, const ConstraintSet& b) {
  return constraints_cmp(normalize_constraints(a), normalize_constraints(b)) ==
         0;
}

std::vector<TypePtr> disjuncts(const TypePtr& t) {
  if (const auto* o = t->as<OrType>()) return o->alts;
  return {t};
}

bool contains_bottom(const TypePtr& t) {
  for (const auto& d : disjuncts(t))
    if (d->is<BottomType>()) return true;
  return false;
}

std::optional<TypePtr> non_bottom_part(const TypePtr& t) {
  std::vector<TypePtr> keep;
  for (const auto& d : disjuncts(t))
    if (!d->is<BottomType>()) keep.push_back(d);
  if (keep.empty()) return std::nullopt;
  return t_or(std::move(keep));
}

TypePtr rename_type_vars(const TypePtr& t,
                         const std::map<std::string, std::string>& ren) {
  if (const auto* v = t->as<TypeVarRef>()) {
    auto it = ren.find(v->name);
    if (it == ren.end()) return t;
    return t_var(it->second);
  }
  if (const auto* o = t->as<OrType>()) {
    std::vector<TypePtr> alts;
    alts.reserve(o->alts.size());
    for (const auto& a : o->alts) alts.push_back(rename_type_vars(a, ren));
    return t_or(std::move(alts));
  }
  if (const auto* f = t->as<ArrowType>()) {
    std::vector<TypePtr> params;
    params.reserve(f->params.size());
    for (const auto& p : f->params) params.push_back(rename_type_vars(p, ren));
    return t_arrow(rename_constraint_vars(f->pre, ren), std::move(params),
                   rename_type_vars(f->result, ren),
                   rename_constraint_vars(f->post, ren));
  }
  return t;
}

RecordType rename_record_vars(const RecordType& r,
                              const std::map<std::string, std::string>& ren) {
  RecordType out;
  for (const auto& [field, t] : r) out.emplace(field, rename_type_vars(t, ren));
  return out;
}

ConstraintSet rename_constraint_vars(
    const ConstraintSet& c, const std::map<std::string, std::string>& ren) {
  ConstraintSet out;
  for (const auto& [var, rec] : c) {
    auto it = ren.find(var);
    const std::string& name = it == ren.end() ? var : it->second;
    out[name] = rename_record_vars(rec, ren);
  }
  return out;
}

namespace {

void print_type(std::ostream& os, const TypePtr& t);

void print_record(std::ostream& os, const RecordType& r) {
  os << '{';
  bool first = true;
  for (const auto& [field, t] : r) {
    if (!first) os << ", ";
    first = false;
    os << field << ": ";
    print_type(os, t);
  }
  os << '}';
}

void print_constraints(std::ostream& os, const ConstraintSet& c) {
  bool first = true;
  for (const auto& [var, rec] : c) {
    if (!first) os << ", ";
    first = false;
    os << var << " <| ";
    print_record(os, rec);
  }
}

void print_type(std::ostream& os, const TypePtr& t) {
  if (const auto* b = t->as<BaseType>()) {
    os << b->name;
  } else if (const auto* v = t->as<TypeVarRef>()) {
    os << v->name;
  } else if (t->is<BottomType>()) {
    os << "bot";
  } else if (t->is<NeverType>()) {
    os << "never";
  } else if (const auto* o = t->as<OrType>()) {
    bool first = true;
    for (const auto& a : o->alts) {
      if (!first) os << " \\/ ";
      first = false;
      print_type(os, a);
    }
  } else if (const auto* f = t->as<ArrowType>()) {
    os << '[';
    print_constraints(os, f->pre);
    os << "](";
    bool first = true;
    for (const auto& p : f->params) {
      if (!first) os << ", ";
      first = false;
      print_type(os, p);
    }
    os << ") -> ";
    print_type(os, f->result);
    os << " [";
    print_constraints(os, f->post);
    os << ']';
  }
}

}  // namespace

std::string to_string(const TypePtr& t) {
  std::ostringstream os;
  print_type(os, t);
  return os.str();
}

std::string to_string(const RecordType& r) {
  std::ostringstream os;
  print_record(os, r);
  return os.str();
}

std::string to_string(const ConstraintSet& c) {
  std::ostringstream os;
  print_constraints(os, c);
  return os.str();
}

}  // namespace luc
