#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dpncheck {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

enum class Sort : uint8_t { Bool, Int, Rat, String };

const char* sort_name(Sort s);
std::optional<Sort> sort_from_name(const std::string& name);

// Interns string literals to dense integer codes so that string data can be
// carried through the arithmetic solver encoding as plain integers. Shared
// between a model and the logs replayed against it; intern() is thread-safe
// because log parsing may run while worker threads hold codes.
class StringPool {
 public:
  int64_t intern(const std::string& s);
  const std::string& spell(int64_t code) const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, int64_t> codes_;
  std::vector<std::string> spellings_;
};

using StringPoolPtr = std::shared_ptr<StringPool>;

// A runtime value of one of the four sorts. Numeric payloads are exact:
// arbitrary-precision integers and rationals, never floating point.
class Value {
 public:
  Value() : sort_(Sort::Bool), b_(false) {}

  static Value boolean(bool b);
  static Value integer(Int i);
  static Value rational(Rat r);
  static Value string(int64_t code);

  Sort sort() const { return sort_; }
  bool as_bool() const;
  const Int& as_int() const;
  const Rat& as_rat() const;
  int64_t as_string() const;

  // Numeric view for mixed int/rat comparison and arithmetic.
  Rat widen() const;

  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }

  // Canonical spelling, unambiguous across sorts; used in dedupe keys and
  // cluster signatures.
  std::string key() const;
  // Human-readable form for reports and error messages.
  std::string display(const StringPool* pool = nullptr) const;

 private:
  Sort sort_;
  bool b_ = false;
  Int i_;
  Rat r_;
  int64_t s_ = 0;
};

// Default value a freshly declared variable holds before any write: 0, 0/1,
// false, or the empty string's code.
Value default_value(Sort s, StringPool& pool);

// Exact conversion of a decimal literal like "-12.375" or "3e-2" to a
// rational. Throws std::invalid_argument on malformed input (including
// NaN/inf spellings, which have no exact counterpart).
Rat decimal_to_rational(const std::string& text);

Int parse_int(const std::string& text);

// Renders p/q in canonical lowest terms, "p" when q == 1.
std::string rat_to_string(const Rat& r);

}  // namespace dpncheck
