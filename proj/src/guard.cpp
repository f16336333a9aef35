#include "dpncheck/guard.hpp"

#include <cctype>
#include <sstream>

namespace dpncheck {
namespace guard_ast {

TermPtr make_const(Value v) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Const;
  t->sort = v.sort();
  t->constant = std::move(v);
  return t;
}

TermPtr make_var(AnnVar v, Sort sort) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->sort = sort;
  t->var = std::move(v);
  return t;
}

static TermPtr make_arith(TermKind kind, TermPtr l, TermPtr r) {
  auto t = std::make_shared<Term>();
  t->kind = kind;
  t->sort = (l->sort == Sort::Rat || (r && r->sort == Sort::Rat)) ? Sort::Rat
                                                                  : Sort::Int;
  t->lhs = std::move(l);
  t->rhs = std::move(r);
  return t;
}

TermPtr make_add(TermPtr l, TermPtr r) {
  return make_arith(TermKind::Add, std::move(l), std::move(r));
}
TermPtr make_sub(TermPtr l, TermPtr r) {
  return make_arith(TermKind::Sub, std::move(l), std::move(r));
}
TermPtr make_neg(TermPtr t) {
  return make_arith(TermKind::Neg, std::move(t), nullptr);
}

FormPtr make_lit(bool b) {
  auto f = std::make_shared<Form>();
  f->kind = FormKind::Lit;
  f->lit = b;
  return f;
}

FormPtr make_boolvar(AnnVar v) {
  auto f = std::make_shared<Form>();
  f->kind = FormKind::BoolVar;
  f->var = std::move(v);
  return f;
}

FormPtr make_cmp(CmpOp op, TermPtr l, TermPtr r) {
  auto f = std::make_shared<Form>();
  f->kind = FormKind::Cmp;
  f->op = op;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

FormPtr make_not(FormPtr inner) {
  auto f = std::make_shared<Form>();
  f->kind = FormKind::Not;
  f->a = std::move(inner);
  return f;
}

static FormPtr make_bin(FormKind kind, FormPtr l, FormPtr r) {
  auto f = std::make_shared<Form>();
  f->kind = kind;
  f->a = std::move(l);
  f->b = std::move(r);
  return f;
}

FormPtr make_and(FormPtr l, FormPtr r) {
  return make_bin(FormKind::And, std::move(l), std::move(r));
}
FormPtr make_or(FormPtr l, FormPtr r) {
  return make_bin(FormKind::Or, std::move(l), std::move(r));
}

const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

CmpOp flip_cmp(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

CmpOp negate_cmp(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
  }
  return op;
}

}  // namespace guard_ast

using namespace guard_ast;

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok : uint8_t {
  End, Ident, IntLit, DecLit, RatLit, StrLit,
  AndAnd, OrOr, Bang, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, LParen, RParen
};

struct Token {
  Tok kind;
  std::string text; // ident (primed idents keep the quote), literal spelling
  size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& cur() const { return cur_; }

  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
      ++i_;
    cur_.pos = i_;
    if (i_ >= src_.size()) {
      cur_.kind = Tok::End;
      cur_.text.clear();
      return;
    }
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
              src_[i_] == '_' || src_[i_] == '.' || src_[i_] == ':'))
        ++i_;
      if (i_ < src_.size() && src_[i_] == '\'') ++i_;
      cur_.kind = Tok::Ident;
      cur_.text = src_.substr(start, i_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i_;
      bool decimal = false;
      while (i_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[i_])))
        ++i_;
      if (i_ < src_.size() && src_[i_] == '.' && i_ + 1 < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
        decimal = true;
        ++i_;
        while (i_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[i_])))
          ++i_;
      }
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        size_t j = i_ + 1;
        if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
        if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
          decimal = true;
          i_ = j;
          while (i_ < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[i_])))
            ++i_;
        }
      }
      // Exact fraction spelling, the form rational constants print as.
      if (!decimal && i_ + 1 < src_.size() && src_[i_] == '/' &&
          std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
        ++i_;
        while (i_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[i_])))
          ++i_;
        cur_.kind = Tok::RatLit;
        cur_.text = src_.substr(start, i_ - start);
        return;
      }
      cur_.kind = decimal ? Tok::DecLit : Tok::IntLit;
      cur_.text = src_.substr(start, i_ - start);
      return;
    }
    if (c == '"') {
      size_t start = ++i_;
      while (i_ < src_.size() && src_[i_] != '"') ++i_;
      if (i_ >= src_.size()) fail("unterminated string literal", start - 1);
      cur_.kind = Tok::StrLit;
      cur_.text = src_.substr(start, i_ - start);
      ++i_;
      return;
    }
    auto two = [&](char a, char b) {
      return c == a && i_ + 1 < src_.size() && src_[i_ + 1] == b;
    };
    if (two('&', '&')) { cur_.kind = Tok::AndAnd; i_ += 2; return; }
    if (two('|', '|')) { cur_.kind = Tok::OrOr; i_ += 2; return; }
    if (two('>', '=')) { cur_.kind = Tok::Ge; i_ += 2; return; }
    if (two('<', '=')) { cur_.kind = Tok::Le; i_ += 2; return; }
    if (two('=', '=')) { cur_.kind = Tok::Eq; i_ += 2; return; }
    if (two('!', '=')) { cur_.kind = Tok::Ne; i_ += 2; return; }
    switch (c) {
      case '=': cur_.kind = Tok::Eq; ++i_; return;
      case '>': cur_.kind = Tok::Gt; ++i_; return;
      case '<': cur_.kind = Tok::Lt; ++i_; return;
      case '!': cur_.kind = Tok::Bang; ++i_; return;
      case '+': cur_.kind = Tok::Plus; ++i_; return;
      case '-': cur_.kind = Tok::Minus; ++i_; return;
      case '(': cur_.kind = Tok::LParen; ++i_; return;
      case ')': cur_.kind = Tok::RParen; ++i_; return;
    }
    fail(std::string("unexpected character '") + c + "'", i_);
  }

  [[noreturn]] void fail(const std::string& msg, size_t pos) const {
    throw GuardError("guard parse error at offset " + std::to_string(pos) +
                     ": " + msg + " in \"" + src_ + "\"");
  }

  struct State {
    size_t i;
    Token cur;
  };
  State state() const { return {i_, cur_}; }
  void restore(const State& s) {
    i_ = s.i;
    cur_ = s.cur;
  }

 private:
  const std::string& src_;
  size_t i_ = 0;
  Token cur_;
};

class Parser {
 public:
  Parser(const std::string& text, const std::map<std::string, Sort>& sorts,
         StringPool& pool)
      : lex_(text), sorts_(sorts), pool_(pool) {}

  FormPtr parse() {
    FormPtr f = or_expr();
    if (lex_.cur().kind != Tok::End)
      lex_.fail("trailing input after formula", lex_.cur().pos);
    return f;
  }

 private:
  FormPtr or_expr() {
    FormPtr f = and_expr();
    while (lex_.cur().kind == Tok::OrOr) {
      lex_.advance();
      f = make_or(f, and_expr());
    }
    return f;
  }

  FormPtr and_expr() {
    FormPtr f = unary();
    while (lex_.cur().kind == Tok::AndAnd) {
      lex_.advance();
      f = make_and(f, unary());
    }
    return f;
  }

  FormPtr unary() {
    if (lex_.cur().kind == Tok::Bang) {
      lex_.advance();
      return make_not(unary());
    }
    return atom();
  }

  // An atom is either a parenthesized formula, a literal, a bare boolean
  // variable, or a comparison. "(" is ambiguous between the first and the
  // last; we try the comparison route whenever a relational operator
  // follows the closing paren of an arithmetic expression, which a one-token
  // lookahead cannot decide. Instead of lookahead we reparse: attempt a
  // formula first and fall back to a term.
  FormPtr atom() {
    const Token t = lex_.cur();
    if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) {
      lex_.advance();
      if (is_relop(lex_.cur().kind))
        lex_.fail("true/false cannot be compared", t.pos);
      return make_lit(t.text == "true");
    }
    if (t.kind == Tok::LParen) {
      auto saved = lex_.state();
      size_t pos = t.pos;
      lex_.advance();
      try {
        FormPtr inner = or_expr();
        expect(Tok::RParen, "')'");
        if (is_relop(lex_.cur().kind))
          lex_.fail("boolean expression used in a comparison", lex_.cur().pos);
        return inner;
      } catch (const GuardError&) {
        lex_.restore(saved); // comparison whose left side starts with '('
      }
      TermPtr lhs = term();
      return cmp_tail(lhs, pos);
    }
    // Starts with an ident, number or unary minus: parse a term, then decide
    // between a bare boolean variable and a comparison.
    size_t pos = t.pos;
    TermPtr lhs = term();
    if (!is_relop(lex_.cur().kind)) {
      if (lhs->kind == TermKind::Var && lhs->sort == Sort::Bool)
        return make_boolvar(lhs->var);
      lex_.fail("expected a comparison operator", lex_.cur().pos);
    }
    return cmp_tail(lhs, pos);
  }

  static bool is_relop(Tok k) {
    return k == Tok::Eq || k == Tok::Ne || k == Tok::Lt || k == Tok::Le ||
           k == Tok::Gt || k == Tok::Ge;
  }

  FormPtr cmp_tail(TermPtr lhs, size_t pos) {
    Tok k = lex_.cur().kind;
    if (!is_relop(k)) lex_.fail("expected a comparison operator", lex_.cur().pos);
    lex_.advance();
    TermPtr rhs = term();
    CmpOp op;
    switch (k) {
      case Tok::Eq: op = CmpOp::Eq; break;
      case Tok::Ne: op = CmpOp::Ne; break;
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      default: op = CmpOp::Ge; break;
    }
    bool num_l = lhs->sort == Sort::Int || lhs->sort == Sort::Rat;
    bool num_r = rhs->sort == Sort::Int || rhs->sort == Sort::Rat;
    if (num_l && num_r) return make_cmp(op, lhs, rhs);
    if (lhs->sort == Sort::String && rhs->sort == Sort::String) {
      if (op != CmpOp::Eq && op != CmpOp::Ne)
        lex_.fail("strings support only == and !=", pos);
      return make_cmp(op, lhs, rhs);
    }
    if (lhs->sort == Sort::Bool || rhs->sort == Sort::Bool)
      lex_.fail("boolean variables cannot be compared; use them directly", pos);
    lex_.fail(std::string("comparison between ") + sort_name(lhs->sort) +
                  " and " + sort_name(rhs->sort),
              pos);
  }

  TermPtr term() {
    TermPtr t = factor();
    while (lex_.cur().kind == Tok::Plus || lex_.cur().kind == Tok::Minus) {
      bool plus = lex_.cur().kind == Tok::Plus;
      size_t pos = lex_.cur().pos;
      lex_.advance();
      TermPtr r = factor();
      require_numeric(t, pos);
      require_numeric(r, pos);
      t = plus ? make_add(t, r) : make_sub(t, r);
    }
    return t;
  }

  TermPtr factor() {
    if (lex_.cur().kind == Tok::Minus) {
      size_t pos = lex_.cur().pos;
      lex_.advance();
      TermPtr t = factor();
      require_numeric(t, pos);
      return make_neg(t);
    }
    return primary();
  }

  TermPtr primary() {
    const Token& t = lex_.cur();
    switch (t.kind) {
      case Tok::IntLit: {
        Value v = Value::integer(parse_int(t.text));
        lex_.advance();
        return make_const(std::move(v));
      }
      case Tok::DecLit: {
        Value v = Value::rational(decimal_to_rational(t.text));
        lex_.advance();
        return make_const(std::move(v));
      }
      case Tok::RatLit: {
        size_t slash = t.text.find('/');
        Int den = parse_int(t.text.substr(slash + 1));
        if (den == 0) lex_.fail("fraction with a zero denominator", t.pos);
        Rat r(parse_int(t.text.substr(0, slash)), den);
        lex_.advance();
        return make_const(Value::rational(std::move(r)));
      }
      case Tok::StrLit: {
        Value v = Value::string(pool_.intern(t.text));
        lex_.advance();
        return make_const(std::move(v));
      }
      case Tok::Ident: {
        AnnVar v;
        v.write = !t.text.empty() && t.text.back() == '\'';
        v.name = v.write ? t.text.substr(0, t.text.size() - 1) : t.text;
        auto it = sorts_.find(v.name);
        if (it == sorts_.end())
          lex_.fail("undeclared variable '" + v.name + "'", t.pos);
        lex_.advance();
        return make_var(std::move(v), it->second);
      }
      case Tok::LParen: {
        lex_.advance();
        TermPtr inner = term();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        lex_.fail("expected a value or variable", t.pos);
    }
  }

  void require_numeric(const TermPtr& t, size_t pos) {
    if (t->sort != Sort::Int && t->sort != Sort::Rat)
      lex_.fail(std::string("arithmetic on ") + sort_name(t->sort), pos);
  }

  void expect(Tok k, const char* what) {
    if (lex_.cur().kind != k) lex_.fail(std::string("expected ") + what,
                                        lex_.cur().pos);
    lex_.advance();
  }

  Lexer lex_;
  const std::map<std::string, Sort>& sorts_;
  StringPool& pool_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Guard

Guard::Guard() : root_(make_lit(true)) {}

Guard::Guard(FormPtr root) : root_(std::move(root)) {
  if (!root_) throw GuardError("null guard");
}

Guard Guard::parse(const std::string& text,
                   const std::map<std::string, Sort>& sorts, StringPool& pool) {
  std::string trimmed;
  for (char c : text) trimmed += c;
  // An absent or blank guard means true.
  bool blank = true;
  for (char c : trimmed)
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  if (blank) return Guard();
  Parser p(trimmed, sorts, pool);
  return Guard(p.parse());
}

bool Guard::is_true() const {
  return root_->kind == FormKind::Lit && root_->lit;
}

static void collect_vars(const TermPtr& t, std::set<std::string>& rd,
                         std::set<std::string>& wr) {
  if (!t) return;
  if (t->kind == TermKind::Var) (t->var.write ? wr : rd).insert(t->var.name);
  collect_vars(t->lhs, rd, wr);
  collect_vars(t->rhs, rd, wr);
}

static void collect_vars(const FormPtr& f, std::set<std::string>& rd,
                         std::set<std::string>& wr) {
  if (!f) return;
  if (f->kind == FormKind::BoolVar)
    (f->var.write ? wr : rd).insert(f->var.name);
  collect_vars(f->lhs, rd, wr);
  collect_vars(f->rhs, rd, wr);
  collect_vars(f->a, rd, wr);
  collect_vars(f->b, rd, wr);
}

std::set<std::string> Guard::read_vars() const {
  std::set<std::string> rd, wr;
  collect_vars(root_, rd, wr);
  return rd;
}

std::set<std::string> Guard::write_vars() const {
  std::set<std::string> rd, wr;
  collect_vars(root_, rd, wr);
  return wr;
}

static const Value& lookup(const Assignment& beta, const AnnVar& v) {
  auto it = beta.find(v);
  if (it == beta.end())
    throw GuardError("guard mentions unbound variable '" + v.name +
                     (v.write ? "'" : "") + "'");
  return it->second;
}

static Value eval_term(const TermPtr& t, const Assignment& beta) {
  switch (t->kind) {
    case TermKind::Const: return t->constant;
    case TermKind::Var: return lookup(beta, t->var);
    case TermKind::Neg: {
      Value v = eval_term(t->lhs, beta);
      if (v.sort() == Sort::Int) return Value::integer(-v.as_int());
      return Value::rational(-v.as_rat());
    }
    case TermKind::Add:
    case TermKind::Sub: {
      Value l = eval_term(t->lhs, beta);
      Value r = eval_term(t->rhs, beta);
      bool sub = t->kind == TermKind::Sub;
      if (l.sort() == Sort::Int && r.sort() == Sort::Int)
        return Value::integer(sub ? Int(l.as_int() - r.as_int())
                                  : Int(l.as_int() + r.as_int()));
      Rat lw = l.widen(), rw = r.widen();
      return Value::rational(sub ? Rat(lw - rw) : Rat(lw + rw));
    }
  }
  throw GuardError("bad term");
}

static bool eval_form(const FormPtr& f, const Assignment& beta) {
  switch (f->kind) {
    case FormKind::Lit: return f->lit;
    case FormKind::BoolVar: return lookup(beta, f->var).as_bool();
    case FormKind::Not: return !eval_form(f->a, beta);
    case FormKind::And: return eval_form(f->a, beta) && eval_form(f->b, beta);
    case FormKind::Or: return eval_form(f->a, beta) || eval_form(f->b, beta);
    case FormKind::Cmp: {
      Value l = eval_term(f->lhs, beta);
      Value r = eval_term(f->rhs, beta);
      if (l.sort() == Sort::String) {
        bool eq = l.as_string() == r.as_string();
        return f->op == CmpOp::Eq ? eq : !eq;
      }
      Rat lw = l.widen(), rw = r.widen();
      switch (f->op) {
        case CmpOp::Eq: return lw == rw;
        case CmpOp::Ne: return lw != rw;
        case CmpOp::Lt: return lw < rw;
        case CmpOp::Le: return lw <= rw;
        case CmpOp::Gt: return lw > rw;
        case CmpOp::Ge: return lw >= rw;
      }
      return false;
    }
  }
  throw GuardError("bad formula");
}

bool Guard::eval(const Assignment& beta) const { return eval_form(root_, beta); }

// Precedence: Or(1) < And(2) < Not(3) < atoms. Terms: Add/Sub(1) < Neg(2).
static void print_term(std::ostream& os, const TermPtr& t, int parent_prec,
                       const StringPool* pool) {
  int prec = t->kind == TermKind::Add || t->kind == TermKind::Sub ? 1
             : t->kind == TermKind::Neg                           ? 2
                                                                  : 3;
  if (prec < parent_prec) os << "(";
  switch (t->kind) {
    case TermKind::Const: os << t->constant.display(pool); break;
    case TermKind::Var: os << t->var.name << (t->var.write ? "'" : ""); break;
    case TermKind::Neg:
      os << "-";
      print_term(os, t->lhs, 3, pool);
      break;
    case TermKind::Add:
    case TermKind::Sub:
      print_term(os, t->lhs, 1, pool);
      os << (t->kind == TermKind::Add ? " + " : " - ");
      print_term(os, t->rhs, 2, pool);
      break;
  }
  if (prec < parent_prec) os << ")";
}

static void print_form(std::ostream& os, const FormPtr& f, int parent_prec,
                       const StringPool* pool) {
  int prec = f->kind == FormKind::Or    ? 1
             : f->kind == FormKind::And ? 2
             : f->kind == FormKind::Not ? 3
                                        : 4;
  if (prec < parent_prec) os << "(";
  switch (f->kind) {
    case FormKind::Lit: os << (f->lit ? "true" : "false"); break;
    case FormKind::BoolVar:
      os << f->var.name << (f->var.write ? "'" : "");
      break;
    case FormKind::Not:
      os << "!";
      print_form(os, f->a, 4, pool);
      break;
    case FormKind::And:
      print_form(os, f->a, 2, pool);
      os << " && ";
      print_form(os, f->b, 3, pool);
      break;
    case FormKind::Or:
      print_form(os, f->a, 1, pool);
      os << " || ";
      print_form(os, f->b, 2, pool);
      break;
    case FormKind::Cmp:
      print_term(os, f->lhs, 1, pool);
      os << " " << cmp_op_text(f->op) << " ";
      print_term(os, f->rhs, 1, pool);
      break;
  }
  if (prec < parent_prec) os << ")";
}

std::string Guard::text(const StringPool* pool) const {
  std::ostringstream os;
  print_form(os, root_, 0, pool);
  return os.str();
}

static void visit(const FormPtr& f, bool neg,
                  const std::function<void(const Form&, bool)>& fn) {
  switch (f->kind) {
    case FormKind::Lit:
    case FormKind::BoolVar:
    case FormKind::Cmp: fn(*f, neg); break;
    case FormKind::Not: visit(f->a, !neg, fn); break;
    case FormKind::And:
    case FormKind::Or:
      visit(f->a, neg, fn);
      visit(f->b, neg, fn);
      break;
  }
}

void Guard::visit_atoms(
    const std::function<void(const Form&, bool)>& fn) const {
  visit(root_, false, fn);
}

Guard guard_and(const Guard& a, const Guard& b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  return Guard(make_and(a.root(), b.root()));
}

}  // namespace dpncheck
