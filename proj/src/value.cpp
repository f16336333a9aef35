#include "dpncheck/value.hpp"

#include <cctype>

namespace dpncheck {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Bool: return "bool";
    case Sort::Int: return "int";
    case Sort::Rat: return "rat";
    case Sort::String: return "string";
  }
  return "?";
}

std::optional<Sort> sort_from_name(const std::string& name) {
  if (name == "bool") return Sort::Bool;
  if (name == "int") return Sort::Int;
  if (name == "rat") return Sort::Rat;
  if (name == "string") return Sort::String;
  return std::nullopt;
}

int64_t StringPool::intern(const std::string& s) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = codes_.find(s);
  if (it != codes_.end()) return it->second;
  int64_t code = static_cast<int64_t>(spellings_.size());
  codes_.emplace(s, code);
  spellings_.push_back(s);
  return code;
}

const std::string& StringPool::spell(int64_t code) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (code < 0 || static_cast<size_t>(code) >= spellings_.size())
    throw std::out_of_range("string code " + std::to_string(code) +
                            " not interned");
  return spellings_[static_cast<size_t>(code)];
}

size_t StringPool::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return spellings_.size();
}

Value Value::boolean(bool b) {
  Value v;
  v.sort_ = Sort::Bool;
  v.b_ = b;
  return v;
}

Value Value::integer(Int i) {
  Value v;
  v.sort_ = Sort::Int;
  v.i_ = std::move(i);
  return v;
}

Value Value::rational(Rat r) {
  Value v;
  v.sort_ = Sort::Rat;
  v.r_ = std::move(r);
  return v;
}

Value Value::string(int64_t code) {
  Value v;
  v.sort_ = Sort::String;
  v.s_ = code;
  return v;
}

static void require(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("value sort mismatch: ") + what);
}

bool Value::as_bool() const {
  require(sort_ == Sort::Bool, "expected bool");
  return b_;
}

const Int& Value::as_int() const {
  require(sort_ == Sort::Int, "expected int");
  return i_;
}

const Rat& Value::as_rat() const {
  require(sort_ == Sort::Rat, "expected rat");
  return r_;
}

int64_t Value::as_string() const {
  require(sort_ == Sort::String, "expected string");
  return s_;
}

Rat Value::widen() const {
  if (sort_ == Sort::Int) return Rat(i_);
  require(sort_ == Sort::Rat, "expected numeric");
  return r_;
}

bool Value::operator==(const Value& o) const {
  if (sort_ != o.sort_) {
    // Int and rat values compare numerically so that an integer-valued log
    // attribute can match a rational model variable.
    if ((sort_ == Sort::Int || sort_ == Sort::Rat) &&
        (o.sort_ == Sort::Int || o.sort_ == Sort::Rat))
      return widen() == o.widen();
    return false;
  }
  switch (sort_) {
    case Sort::Bool: return b_ == o.b_;
    case Sort::Int: return i_ == o.i_;
    case Sort::Rat: return r_ == o.r_;
    case Sort::String: return s_ == o.s_;
  }
  return false;
}

std::string Value::key() const {
  switch (sort_) {
    case Sort::Bool: return b_ ? "b:1" : "b:0";
    case Sort::Int: return "i:" + i_.str();
    case Sort::Rat: return "r:" + rat_to_string(r_);
    case Sort::String: return "s:" + std::to_string(s_);
  }
  return "?";
}

std::string Value::display(const StringPool* pool) const {
  switch (sort_) {
    case Sort::Bool: return b_ ? "true" : "false";
    case Sort::Int: return i_.str();
    case Sort::Rat: return rat_to_string(r_);
    case Sort::String:
      if (pool) return "\"" + pool->spell(s_) + "\"";
      return "#" + std::to_string(s_);
  }
  return "?";
}

Value default_value(Sort s, StringPool& pool) {
  switch (s) {
    case Sort::Bool: return Value::boolean(false);
    case Sort::Int: return Value::integer(0);
    case Sort::Rat: return Value::rational(Rat(0));
    case Sort::String: return Value::string(pool.intern(""));
  }
  throw std::logic_error("bad sort");
}

Rat decimal_to_rational(const std::string& text) {
  size_t i = 0, n = text.size();
  auto fail = [&]() -> Rat {
    throw std::invalid_argument("not a decimal literal: '" + text + "'");
  };
  if (n == 0) fail();
  bool neg = false;
  if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool any = false;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits += text[i++];
    any = true;
  }
  if (i < n && text[i] == '.') {
    ++i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits += text[i++];
      ++frac_digits;
      any = true;
    }
  }
  if (!any) fail();
  long exp10 = 0;
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < n && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
    if (i >= n || !std::isdigit(static_cast<unsigned char>(text[i]))) fail();
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      exp10 = exp10 * 10 + (text[i++] - '0');
      if (exp10 > 1000000) fail();
    }
    if (eneg) exp10 = -exp10;
  }
  if (i != n) fail();

  Int num(digits.empty() ? "0" : digits);
  if (neg) num = -num;
  long net = exp10 - frac_digits;
  Rat r(num);
  Int scale = boost::multiprecision::pow(Int(10), static_cast<unsigned>(net < 0 ? -net : net));
  if (net > 0) r *= Rat(scale);
  if (net < 0) r /= Rat(scale);
  return r;
}

Int parse_int(const std::string& text) {
  try {
    size_t start = (!text.empty() && (text[0] == '+' || text[0] == '-')) ? 1 : 0;
    if (start == text.size()) throw std::invalid_argument("");
    for (size_t i = start; i < text.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(text[i])))
        throw std::invalid_argument("");
    return Int(text);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer literal: '" + text + "'");
  }
}

std::string rat_to_string(const Rat& r) {
  Int num = boost::multiprecision::numerator(r);
  Int den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace dpncheck
