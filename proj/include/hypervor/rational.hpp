#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "hypervor/errors.hpp"

namespace hypervor {

// Exact rational over int64 with overflow-checked arithmetic. The values
// that appear in the bound formulas are small, so 64 bits suffice; any
// overflow throws rather than wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  // Parses "157.497", "-3", "15/32".
  static Rational parse(std::string_view text) {
    if (text.empty()) throw InputError("empty rational literal");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      return Rational(parse_int(text.substr(0, slash)),
                      parse_int(text.substr(slash + 1)));
    }
    bool neg = false;
    if (text.front() == '-' || text.front() == '+') {
      neg = text.front() == '-';
      text.remove_prefix(1);
    }
    __int128 num = 0, den = 1;
    bool seen_dot = false;
    for (char ch : text) {
      if (ch == '.') {
        if (seen_dot) throw InputError("malformed decimal literal");
        seen_dot = true;
        continue;
      }
      if (ch < '0' || ch > '9') throw InputError("malformed decimal literal");
      num = num * 10 + (ch - '0');
      if (seen_dot) den *= 10;
      if (num > INT64_MAX || den > INT64_MAX)
        throw DomainError("decimal literal exceeds 64-bit rational range");
    }
    return Rational(neg ? -static_cast<std::int64_t>(num)
                        : static_cast<std::int64_t>(num),
                    static_cast<std::int64_t>(den));
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ +
                         static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ -
                         static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_,
                     static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    const __int128 l = static_cast<__int128>(a.num_) * b.den_;
    const __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  // "p/q", or "p" for integers.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  void assign(std::int64_t n, std::int64_t d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num_ = g ? n / g : 0;
    den_ = g ? d / g : 1;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw DomainError("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static std::int64_t parse_int(std::string_view s) {
    if (s.empty()) throw InputError("malformed rational literal");
    std::int64_t v = 0;
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) throw InputError("malformed rational literal");
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9')
        throw InputError("malformed rational literal");
      if (v > (INT64_MAX - 9) / 10) throw DomainError("integer overflow");
      v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace hypervor
