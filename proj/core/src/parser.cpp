#include "luc/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace luc {

std::string ParseError::render(const std::string& filename) const {
  std::ostringstream os;
  os << filename << ':' << span.line << ':' << span.col << ": " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) os << ", ";
      os << expected[i];
    }
    os << ')';
  }
  return os.str();
}

namespace {

enum class Tok {
  Ident,      // lowercase or '_' start
  UpperIdent, // type variable
  Int,
  String,
  KwLet, KwIn, KwIf, KwThen, KwElse, KwIfHasAttr, KwFunc, KwLabel, KwBreak,
  KwNew, KwTrue, KwFalse,
  KwAdd, KwSub, KwMul, KwEq, KwLt, KwNot,
  KwInt, KwBool, KwStr, KwBot,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Colon, Dot, Equals, Assign, Arrow, OrBar, Matches,
  AtLoc,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t int_val = 0;
  SourceSpan span;
};

struct LexFail {
  ParseError err;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t = next_token();
      bool eof = t.kind == Tok::Eof;
      out.push_back(std::move(t));
      if (eof) break;
    }
    return out;
  }

 private:
  const std::string& src_;
  size_t pos_ = 0;
  std::uint32_t line_ = 1, col_ = 1;

  bool done() const { return pos_ >= src_.size(); }
  char peek(size_t k = 0) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  SourceSpan here(size_t len = 1) const {
    SourceSpan s;
    s.start = static_cast<std::uint32_t>(pos_);
    s.end = static_cast<std::uint32_t>(pos_ + len);
    s.line = line_;
    s.col = col_;
    return s;
  }

  [[noreturn]] void fail(std::string msg) {
    ParseError e;
    e.span = here(0);
    e.span.end = e.span.start;
    e.message = std::move(msg);
    throw LexFail{std::move(e)};
  }

  void skip_ws() {
    for (;;) {
      while (!done() && std::isspace(static_cast<unsigned char>(peek())))
        advance();
      if (peek() == '#') {
        while (!done() && peek() != '\n') advance();
        continue;
      }
      break;
    }
  }

  Token next_token() {
    SourceSpan start = here(0);
    if (done()) return Token{Tok::Eof, "", 0, start};

    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return ident_like(start);
    if (std::isdigit(static_cast<unsigned char>(c))) return number(start);
    if (c == '"') return string_lit(start);

    switch (c) {
      case '(': advance(); return fixed(Tok::LParen, "(", start);
      case ')': advance(); return fixed(Tok::RParen, ")", start);
      case '{': advance(); return fixed(Tok::LBrace, "{", start);
      case '}': advance(); return fixed(Tok::RBrace, "}", start);
      case '[': advance(); return fixed(Tok::LBracket, "[", start);
      case ']': advance(); return fixed(Tok::RBracket, "]", start);
      case ',': advance(); return fixed(Tok::Comma, ",", start);
      case '.': advance(); return fixed(Tok::Dot, ".", start);
      case '=': advance(); return fixed(Tok::Equals, "=", start);
      case ':':
        advance();
        if (peek() == '=') {
          advance();
          return fixed(Tok::Assign, ":=", start);
        }
        return fixed(Tok::Colon, ":", start);
      case '-':
        if (std::isdigit(static_cast<unsigned char>(peek(1))))
          return number(start);
        advance();
        if (peek() == '>') {
          advance();
          return fixed(Tok::Arrow, "->", start);
        }
        fail("stray '-'");
      case '\\':
        advance();
        if (peek() == '/') {
          advance();
          return fixed(Tok::OrBar, "\\/", start);
        }
        fail("stray '\\'");
      case '<':
        advance();
        if (peek() == '|') {
          advance();
          return fixed(Tok::Matches, "<|", start);
        }
        fail("stray '<'");
      case '@': {
        // @loc<n> is reserved run-time location syntax.
        advance();
        std::string word;
        while (std::isalnum(static_cast<unsigned char>(peek()))) word += advance();
        Token t = fixed(Tok::AtLoc, "@" + word, start);
        return t;
      }
      default:
        fail(std::string("unsupported character '") + c + "'");
    }
  }

  Token fixed(Tok kind, std::string text, SourceSpan start) {
    start.end = static_cast<std::uint32_t>(pos_);
    return Token{kind, std::move(text), 0, start};
  }

  Token ident_like(SourceSpan start) {
    std::string word;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
      word += advance();
    start.end = static_cast<std::uint32_t>(pos_);
    static const std::unordered_map<std::string, Tok> keywords = {
        {"let", Tok::KwLet},       {"in", Tok::KwIn},
        {"if", Tok::KwIf},         {"then", Tok::KwThen},
        {"else", Tok::KwElse},     {"ifhasattr", Tok::KwIfHasAttr},
        {"func", Tok::KwFunc},     {"label", Tok::KwLabel},
        {"break", Tok::KwBreak},   {"new", Tok::KwNew},
        {"true", Tok::KwTrue},     {"false", Tok::KwFalse},
        {"add", Tok::KwAdd},       {"sub", Tok::KwSub},
        {"mul", Tok::KwMul},       {"eq", Tok::KwEq},
        {"lt", Tok::KwLt},         {"not", Tok::KwNot},
        {"int", Tok::KwInt},       {"bool", Tok::KwBool},
        {"str", Tok::KwStr},       {"bot", Tok::KwBot},
    };
    auto it = keywords.find(word);
    if (it != keywords.end()) return Token{it->second, word, 0, start};
    bool upper = std::isupper(static_cast<unsigned char>(word[0]));
    return Token{upper ? Tok::UpperIdent : Tok::Ident, word, 0, start};
  }

  Token number(SourceSpan start) {
    std::string digits;
    if (peek() == '-') digits += advance();
    while (std::isdigit(static_cast<unsigned char>(peek()))) digits += advance();
    start.end = static_cast<std::uint32_t>(pos_);
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(digits.c_str(), &end, 10);
    if (errno == ERANGE) fail("integer literal out of range");
    return Token{Tok::Int, digits, static_cast<std::int64_t>(v), start};
  }

  Token string_lit(SourceSpan start) {
    advance();  // opening quote
    std::string out;
    for (;;) {
      if (done()) fail("unterminated string literal");
      char c = advance();
      if (c == '"') break;
      if (c == '\n') fail("newline in string literal");
      if (c == '\\') {
        if (done()) fail("unterminated escape");
        char esc = advance();
        switch (esc) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unknown escape '\\") + esc + "'");
        }
      } else {
        out += c;
      }
    }
    start.end = static_cast<std::uint32_t>(pos_);
    return Token{Tok::String, std::move(out), 0, start};
  }
};

struct ParseFail {
  ParseError err;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {
    for (const auto& t : toks_)
      if (t.kind == Tok::Ident || t.kind == Tok::UpperIdent)
        used_names_.insert(t.text);
  }

  ExprPtr parse_program() {
    ExprPtr e = parse_expr();
    expect(Tok::Eof, "end of input");
    return e;
  }

  TypePtr parse_type_entry() {
    TypePtr t = parse_type();
    expect(Tok::Eof, "end of input");
    return t;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::set<std::string> used_names_;
  int tmp_counter_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool accept(Tok k) {
    if (at(k)) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::string msg, std::vector<std::string> expected = {}) {
    if (at(Tok::AtLoc)) {
      ParseError e;
      e.kind = ParseError::Kind::LocationLiteral;
      e.span = cur().span;
      e.message = "location literals are reserved for trace output";
      throw ParseFail{std::move(e)};
    }
    ParseError e;
    e.span = cur().span;
    e.message = std::move(msg);
    e.expected = std::move(expected);
    throw ParseFail{std::move(e)};
  }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("unexpected token '") + describe(cur()) + "'",
                     {what});
    return next();
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::Eof) return "<eof>";
    return t.text;
  }

  std::string fresh_tmp() {
    for (;;) {
      std::string cand = "t" + std::to_string(tmp_counter_++);
      if (!used_names_.count(cand)) {
        used_names_.insert(cand);
        return cand;
      }
    }
  }

  ExprPtr with_span(ExprPtr e, SourceSpan sp) {
    return mk(e->node, sp, e->id);
  }

  // ---- types ----

  TypePtr parse_type() {
    std::vector<TypePtr> alts;
    alts.push_back(parse_unit_type());
    while (accept(Tok::OrBar)) alts.push_back(parse_unit_type());
    return t_or(std::move(alts));
  }

  TypePtr parse_unit_type() {
    switch (cur().kind) {
      case Tok::KwInt: next(); return t_int();
      case Tok::KwBool: next(); return t_bool();
      case Tok::KwStr: next(); return t_str();
      case Tok::KwBot: next(); return t_bot();
      case Tok::UpperIdent: return t_var(next().text);
      case Tok::LBracket: return parse_arrow();
      default:
        fail("expected a type",
             {"int", "bool", "str", "bot", "type variable", "["});
    }
  }

  TypePtr parse_arrow() {
    expect(Tok::LBracket, "[");
    ConstraintSet pre = parse_constraints();
    expect(Tok::RBracket, "]");
    expect(Tok::LParen, "(");
    std::vector<TypePtr> params;
    if (!at(Tok::RParen)) {
      params.push_back(parse_type());
      while (accept(Tok::Comma)) params.push_back(parse_type());
    }
    expect(Tok::RParen, ")");
    expect(Tok::Arrow, "->");
    TypePtr result = parse_type();
    expect(Tok::LBracket, "[");
    ConstraintSet post = parse_constraints();
    expect(Tok::RBracket, "]");
    return t_arrow(std::move(pre), std::move(params), std::move(result),
                   std::move(post));
  }

  ConstraintSet parse_constraints() {
    ConstraintSet out;
    if (at(Tok::RBracket)) return out;
    for (;;) {
      const Token& var = expect(Tok::UpperIdent, "type variable");
      std::string name = var.text;
      expect(Tok::Matches, "<|");
      RecordType rec = parse_record();
      if (out.count(name))
        fail("duplicate constraint for type variable " + name);
      out.emplace(std::move(name), std::move(rec));
      if (!accept(Tok::Comma)) break;
    }
    return out;
  }

  RecordType parse_record() {
    expect(Tok::LBrace, "{");
    RecordType rec;
    if (!at(Tok::RBrace)) {
      for (;;) {
        const Token& field = expect(Tok::Ident, "field name");
        std::string name = field.text;
        expect(Tok::Colon, ":");
        TypePtr t = parse_type();
        if (rec.count(name)) fail("duplicate field " + name);
        rec.emplace(std::move(name), std::move(t));
        if (!accept(Tok::Comma)) break;
      }
    }
    expect(Tok::RBrace, "}");
    return rec;
  }

  // ---- expressions ----

  ExprPtr parse_expr() {
    SourceSpan sp = cur().span;
    switch (cur().kind) {
      case Tok::KwLet: {
        next();
        const Token& name = expect_binder();
        // '=' is not a token of its own; the surface uses '=' only here.
        expect_equals();
        ExprPtr bound = parse_expr();
        expect(Tok::KwIn, "in");
        ExprPtr body = parse_expr();
        return with_span(e_let(name.text, std::move(bound), std::move(body)),
                         sp);
      }
      case Tok::KwIf: {
        next();
        ExprPtr c = parse_expr();
        expect(Tok::KwThen, "then");
        ExprPtr t = parse_expr();
        expect(Tok::KwElse, "else");
        ExprPtr e = parse_expr();
        return with_span(e_if(std::move(c), std::move(t), std::move(e)), sp);
      }
      case Tok::KwIfHasAttr: {
        next();
        expect(Tok::LParen, "(");
        const Token& subj = expect(Tok::Ident, "identifier");
        std::string subj_name = subj.text;
        expect(Tok::Comma, ",");
        const Token& attr = expect(Tok::Ident, "attribute name");
        std::string attr_name = attr.text;
        expect(Tok::RParen, ")");
        expect(Tok::KwThen, "then");
        ExprPtr t = parse_expr();
        expect(Tok::KwElse, "else");
        ExprPtr e = parse_expr();
        return with_span(e_ifhasattr(e_var(subj_name), attr_name,
                                     std::move(t), std::move(e)),
                         sp);
      }
      case Tok::KwFunc: {
        ExprPtr f = parse_func();
        return parse_suffixes(with_span(std::move(f), sp));
      }
      case Tok::KwLabel: {
        next();
        const Token& name = expect(Tok::Ident, "label name");
        std::string label = name.text;
        expect(Tok::Colon, ":");
        TypePtr annot = parse_type();
        expect(Tok::LBrace, "{");
        ExprPtr body = parse_expr();
        expect(Tok::RBrace, "}");
        return with_span(e_labeled(label, std::move(annot), std::move(body)),
                         sp);
      }
      case Tok::KwBreak: {
        next();
        const Token& name = expect(Tok::Ident, "label name");
        std::string label = name.text;
        ExprPtr arg = parse_expr();
        return with_span(e_break(label, std::move(arg)), sp);
      }
      case Tok::KwNew:
        next();
        return with_span(e_new(), sp);
      default:
        return parse_suffixes(parse_atom());
    }
  }

  const Token& expect_binder() { return expect(Tok::Ident, "identifier"); }

  void expect_equals() {
    if (at(Tok::Assign))
      fail("expected '=' (use '=' for let, ':=' for field update)");
    expect(Tok::Equals, "=");
  }

  ExprPtr parse_atom() {
    SourceSpan sp = cur().span;
    switch (cur().kind) {
      case Tok::Ident: {
        std::string name = next().text;
        return with_span(e_var(std::move(name)), sp);
      }
      case Tok::Int: {
        std::int64_t v = next().int_val;
        return with_span(e_int(v), sp);
      }
      case Tok::String: {
        std::string s = next().text;
        return with_span(e_str(std::move(s)), sp);
      }
      case Tok::KwTrue: next(); return with_span(e_bool(true), sp);
      case Tok::KwFalse: next(); return with_span(e_bool(false), sp);
      case Tok::KwAdd: return parse_prim(Op::Add, sp);
      case Tok::KwSub: return parse_prim(Op::Sub, sp);
      case Tok::KwMul: return parse_prim(Op::Mul, sp);
      case Tok::KwEq: return parse_prim(Op::Eq, sp);
      case Tok::KwLt: return parse_prim(Op::Lt, sp);
      case Tok::KwNot: return parse_prim(Op::Not, sp);
      case Tok::LParen: {
        next();
        ExprPtr inner = parse_expr();
        expect(Tok::RParen, ")");
        return inner;
      }
      default:
        fail("expected an expression",
             {"identifier", "literal", "let", "if", "func", "new", "("});
    }
  }

  ExprPtr parse_prim(Op op, SourceSpan sp) {
    next();  // op keyword
    expect(Tok::LParen, "(");
    std::vector<ExprPtr> args;
    if (!at(Tok::RParen)) {
      args.push_back(parse_expr());
      while (accept(Tok::Comma)) args.push_back(parse_expr());
    }
    expect(Tok::RParen, ")");
    return with_span(e_prim(op, std::move(args)), sp);
  }

  ExprPtr parse_func() {
    SourceSpan sp = cur().span;
    expect(Tok::KwFunc, "func");
    expect(Tok::LParen, "(");
    std::vector<std::string> params;
    if (!at(Tok::RParen)) {
      params.push_back(expect(Tok::Ident, "parameter name").text);
      while (accept(Tok::Comma))
        params.push_back(expect(Tok::Ident, "parameter name").text);
    }
    expect(Tok::RParen, ")");
    expect(Tok::Colon, ":");
    TypePtr annot = parse_type();
    if (!annot->is<ArrowType>())
      fail("function annotation must be a function type");
    expect(Tok::LBrace, "{");
    ExprPtr body = parse_expr();
    expect(Tok::RBrace, "}");
    return with_span(e_func(std::move(params), std::move(annot),
                            std::move(body)),
                     sp);
  }

  ExprPtr parse_suffixes(ExprPtr head) {
    for (;;) {
      SourceSpan sp = head->span;
      if (at(Tok::Dot)) {
        next();
        const Token& field = expect(Tok::Ident, "field name");
        std::string fname = field.text;
        if (!head->is<Var>() && !head->is<LocRef>())
          fail("field subject must be an identifier; bind it with let first");
        if (accept(Tok::Assign)) {
          ExprPtr rhs = parse_expr();
          if (is_value(*rhs))
            return with_span(
                e_fieldset(std::move(head), fname, std::move(rhs)), sp);
          // Keep updates value-shaped: x.a := e  ~>  let t = e in x.a := t
          std::string tmp = fresh_tmp();
          ExprPtr subj = head;
          return with_span(
              e_let(tmp, std::move(rhs),
                    with_span(e_fieldset(std::move(subj), fname, e_var(tmp)),
                              sp)),
              sp);
        }
        head = with_span(e_fieldget(std::move(head), fname), sp);
        continue;
      }
      if (at(Tok::LParen)) {
        next();
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
          args.push_back(parse_expr());
          while (accept(Tok::Comma)) args.push_back(parse_expr());
        }
        expect(Tok::RParen, ")");
        if (head->is<Var>() || head->is<FuncVal>()) {
          head = with_span(e_apply(std::move(head), std::move(args)), sp);
        } else {
          // Callees must be variables or function literals at runtime;
          // anything else is sequenced through a let.
          std::string tmp = fresh_tmp();
          ExprPtr callee = head;
          head = with_span(
              e_let(tmp, std::move(callee),
                    with_span(e_apply(e_var(tmp), std::move(args)), sp)),
              sp);
        }
        continue;
      }
      return head;
    }
  }
};

}  // namespace

ParseResult parse_program(const std::string& text) {
  try {
    Lexer lex(text);
    Parser p(lex.run());
    ExprPtr e = p.parse_program();
    std::uint32_t next_id = 0;
    return assign_ids(e, next_id);
  } catch (const LexFail& f) {
    return f.err;
  } catch (const ParseFail& f) {
    return f.err;
  }
}

std::variant<TypePtr, ParseError> parse_type_text(const std::string& text) {
  try {
    Lexer lex(text);
    Parser p(lex.run());
    return p.parse_type_entry();
  } catch (const LexFail& f) {
    return f.err;
  } catch (const ParseFail& f) {
    return f.err;
  }
}

}  // namespace luc
