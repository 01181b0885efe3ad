#include "luc/pretty.hpp"

#include <sstream>

namespace luc {

namespace {

void print_expr(std::ostream& os, const Expr& e);

void print_string_lit(std::ostream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      default: os << c;
    }
  }
  os << '"';
}

void print_const(std::ostream& os, const Const& c) {
  if (c.is_int())
    os << c.as_int();
  else if (c.is_bool())
    os << (c.as_bool() ? "true" : "false");
  else
    print_string_lit(os, c.as_str());
}

void print_subject(std::ostream& os, const Expr& e) {
  if (const auto* v = e.as<Var>())
    os << v->name;
  else if (const auto* l = e.as<LocRef>())
    os << "@loc" << l->loc;
  else {
    os << '(';
    print_expr(os, e);
    os << ')';
  }
}

void print_callee(std::ostream& os, const Expr& e) {
  if (e.is<Var>() || e.is<FuncVal>() || e.is<LocRef>())
    print_expr(os, e);
  else {
    os << '(';
    print_expr(os, e);
    os << ')';
  }
}

void print_expr(std::ostream& os, const Expr& e) {
  if (const auto* x = e.as<Var>()) {
    os << x->name;
  } else if (const auto* x = e.as<Lit>()) {
    print_const(os, x->value);
  } else if (const auto* x = e.as<FuncVal>()) {
    os << "func(";
    for (size_t i = 0; i < x->params.size(); ++i) {
      if (i) os << ", ";
      os << x->params[i];
    }
    os << ") : " << to_string(x->annot) << " { ";
    print_expr(os, *x->body);
    os << " }";
  } else if (const auto* x = e.as<LocRef>()) {
    os << "@loc" << x->loc;
  } else if (const auto* x = e.as<Let>()) {
    os << "let " << x->binder << " = ";
    print_expr(os, *x->bound);
    os << " in ";
    print_expr(os, *x->body);
  } else if (const auto* x = e.as<Apply>()) {
    print_callee(os, *x->callee);
    os << '(';
    for (size_t i = 0; i < x->args.size(); ++i) {
      if (i) os << ", ";
      print_expr(os, *x->args[i]);
    }
    os << ')';
  } else if (const auto* x = e.as<PrimApp>()) {
    os << op_name(x->op) << '(';
    for (size_t i = 0; i < x->args.size(); ++i) {
      if (i) os << ", ";
      print_expr(os, *x->args[i]);
    }
    os << ')';
  } else if (const auto* x = e.as<If>()) {
    os << "if ";
    print_expr(os, *x->cond);
    os << " then ";
    print_expr(os, *x->then_branch);
    os << " else ";
    print_expr(os, *x->else_branch);
  } else if (const auto* x = e.as<IfHasAttr>()) {
    os << "ifhasattr(";
    print_subject(os, *x->subject);
    os << ", " << x->attr << ") then ";
    print_expr(os, *x->then_branch);
    os << " else ";
    print_expr(os, *x->else_branch);
  } else if (const auto* x = e.as<Break>()) {
    os << "break " << x->label << ' ';
    print_expr(os, *x->arg);
  } else if (const auto* x = e.as<Labeled>()) {
    os << "label " << x->label << " : " << to_string(x->annot) << " { ";
    print_expr(os, *x->body);
    os << " }";
  } else if (e.is<New>()) {
    os << "new";
  } else if (const auto* x = e.as<FieldSet>()) {
    print_subject(os, *x->subject);
    os << '.' << x->field << " := ";
    print_expr(os, *x->value);
  } else if (const auto* x = e.as<FieldGet>()) {
    print_subject(os, *x->subject);
    os << '.' << x->field;
  }
}

}  // namespace

std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string pretty_print(const ExprPtr& e) { return pretty_print(*e); }

}  // namespace luc
