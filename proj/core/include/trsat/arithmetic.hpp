#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "trsat/rational.hpp"

namespace trsat {

enum class Overflow { saturate, wrap };
enum class Rounding { down, up };

std::string_view to_string(Overflow o);
std::string_view to_string(Rounding r);
Overflow parse_overflow(std::string_view s);
Rounding parse_rounding(std::string_view s);

/// A b-bit two's-complement fixed-point format with F fractional bits.
///
/// The representable set is V = { k * 2^-F : -2^(b-1) <= k <= 2^(b-1) - 1 },
/// so |V| = 2^b. total_bits is limited to 62 so scaled integers fit in int64.
struct FixedWidthFormat {
  int total_bits = 8;
  int frac_bits = 0;
  Overflow overflow = Overflow::saturate;
  Rounding rounding = Rounding::down;

  static constexpr int kMaxBits = 62;

  /// Throws ConstructionError unless 1 <= total_bits <= 62 and 0 <= frac_bits < total_bits.
  void validate() const;

  std::int64_t min_scaled() const { return -(std::int64_t{1} << (total_bits - 1)); }
  std::int64_t max_scaled() const { return (std::int64_t{1} << (total_bits - 1)) - 1; }
  Rational min_value() const;
  Rational max_value() const;
  Rational ulp() const;

  bool contains(const Rational& x) const;
  /// k such that x = k * 2^-F; requires contains(x).
  std::int64_t scaled(const Rational& x) const;

  friend bool operator==(const FixedWidthFormat&, const FixedWidthFormat&) = default;
};

/// Rounds x to the format's grid and then applies the overflow policy.
///
/// Rounding acts on the scaled value x * 2^F: down is floor (toward -inf),
/// up is ceiling. Saturation clamps the scaled integer into range; wrap
/// reduces it modulo 2^b into [-2^(b-1), 2^(b-1) - 1].
Rational quantize(const Rational& x, const FixedWidthFormat& fmt);

/// Every scalar operation in the workbench is routed through one of these.
///
/// In Exact mode results are exact rationals. In Fixed mode each primitive
/// operation computes the exact result of its (already representable)
/// operands and quantizes it, so evaluation order is observable.
class ArithmeticContext {
 public:
  static ArithmeticContext exact() { return ArithmeticContext(); }
  static ArithmeticContext fixed(const FixedWidthFormat& fmt);

  bool is_exact() const { return !format_.has_value(); }
  bool is_fixed() const { return format_.has_value(); }
  /// Only valid in Fixed mode.
  const FixedWidthFormat& format() const { return *format_; }

  /// Identity in Exact mode, quantize() in Fixed mode.
  Rational round(const Rational& x) const {
    return format_ ? quantize(x, *format_) : x;
  }

  Rational add(const Rational& a, const Rational& b) const { return round(a + b); }
  Rational sub(const Rational& a, const Rational& b) const { return round(a - b); }
  Rational mul(const Rational& a, const Rational& b) const { return round(a * b); }
  /// Throws EvalError when b is zero.
  Rational div(const Rational& a, const Rational& b) const { return round(a / b); }
  Rational neg(const Rational& a) const { return round(-a); }

  /// Left-to-right fold with add(); the empty sum is 0.
  Rational sum(std::span<const Rational> values) const;

  std::string describe() const;

  friend bool operator==(const ArithmeticContext&, const ArithmeticContext&) = default;

 private:
  std::optional<FixedWidthFormat> format_;
};

}  // namespace trsat
