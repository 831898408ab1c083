#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace trsat {

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in 64 bits are stored inline and
/// operated on with 128-bit intermediates; anything larger falls back to a
/// shared, immutable GMP rational. The representation is canonical: a value
/// that fits inline is never stored in the big form, so equality and hashing
/// can compare representations directly.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value) {  // NOLINT(google-explicit-constructor)
    if (value == INT64_MIN) *this = from_i128(value, 1);
  }
  Rational(std::int64_t num, std::int64_t den);
  explicit Rational(const mpq_class& value);
  explicit Rational(const mpz_class& value);

  /// Parses "p/q", "p" or "-p/q". Throws ParseError on malformed input or q = 0.
  static Rational parse(std::string_view text);

  /// Lowest-terms "p/q" form; integers print as "p/1".
  std::string str() const;

  bool is_small() const { return big_ == nullptr; }
  bool is_zero() const { return big_ == nullptr && num_ == 0; }
  bool is_integer() const;
  int sign() const {
    if (big_) return big_sign();
    return (num_ > 0) - (num_ < 0);
  }

  mpq_class to_mpq() const;
  mpz_class numerator() const;
  mpz_class denominator() const;
  double to_double() const;

  /// Inline numerator/denominator; only meaningful when is_small().
  std::int64_t small_num() const { return num_; }
  std::int64_t small_den() const { return den_; }

  mpz_class floor() const;
  mpz_class ceil() const;

  Rational operator-() const;
  Rational abs() const { return sign() < 0 ? -*this : *this; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    std::int64_t s;
    if (!a.big_ && !b.big_ && a.den_ == 1 && b.den_ == 1 && !__builtin_add_overflow(a.num_, b.num_, &s) &&
        s != INT64_MIN) {
      return Rational(s);
    }
    return add_slow(a, b);
  }
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b) {
    std::int64_t p;
    if (!a.big_ && !b.big_ && a.den_ == 1 && b.den_ == 1 && !__builtin_mul_overflow(a.num_, b.num_, &p) &&
        p != INT64_MIN) {
      return Rational(p);
    }
    return mul_slow(a, b);
  }
  /// Throws EvalError on division by zero.
  friend Rational operator/(const Rational& a, const Rational& b);

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    return eq_slow(a, b);
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  std::size_t hash() const;

 private:
  static Rational from_i128(__int128 num, __int128 den);
  static Rational add_slow(const Rational& a, const Rational& b);
  static Rational mul_slow(const Rational& a, const Rational& b);
  static bool eq_slow(const Rational& a, const Rational& b);
  int big_sign() const;
  static Rational from_big(mpq_class value);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }

}  // namespace trsat

template <>
struct std::hash<trsat::Rational> {
  std::size_t operator()(const trsat::Rational& r) const noexcept { return r.hash(); }
};
