#include "trsat/arithmetic.hpp"

#include "trsat/errors.hpp"

namespace trsat {

std::string_view to_string(Overflow o) { return o == Overflow::saturate ? "saturate" : "wrap"; }
std::string_view to_string(Rounding r) { return r == Rounding::down ? "down" : "up"; }

Overflow parse_overflow(std::string_view s) {
  if (s == "saturate") return Overflow::saturate;
  if (s == "wrap") return Overflow::wrap;
  throw ParseError("unknown overflow mode '" + std::string(s) + "'");
}

Rounding parse_rounding(std::string_view s) {
  if (s == "down") return Rounding::down;
  if (s == "up") return Rounding::up;
  throw ParseError("unknown rounding mode '" + std::string(s) + "'");
}

void FixedWidthFormat::validate() const {
  if (total_bits < 1 || total_bits > kMaxBits) {
    throw ConstructionError("total_bits must lie in [1, 62], got " + std::to_string(total_bits));
  }
  if (frac_bits < 0 || frac_bits >= total_bits) {
    throw ConstructionError("frac_bits must lie in [0, total_bits), got " + std::to_string(frac_bits));
  }
}

Rational FixedWidthFormat::min_value() const {
  return Rational(min_scaled(), std::int64_t{1} << frac_bits);
}

Rational FixedWidthFormat::max_value() const {
  return Rational(max_scaled(), std::int64_t{1} << frac_bits);
}

Rational FixedWidthFormat::ulp() const { return Rational(1, std::int64_t{1} << frac_bits); }

bool FixedWidthFormat::contains(const Rational& x) const {
  if (!x.is_small()) return false;
  const std::int64_t den = x.small_den();
  if ((den & (den - 1)) != 0 || den > (std::int64_t{1} << frac_bits)) return false;
  const __int128 k = static_cast<__int128>(x.small_num()) * ((std::int64_t{1} << frac_bits) / den);
  return k >= min_scaled() && k <= max_scaled();
}

std::int64_t FixedWidthFormat::scaled(const Rational& x) const {
  if (!contains(x)) throw PreconditionError("value " + x.str() + " is not representable");
  return x.small_num() * ((std::int64_t{1} << frac_bits) / x.small_den());
}

namespace {

std::int64_t apply_overflow(__int128 k, const FixedWidthFormat& fmt) {
  const std::int64_t lo = fmt.min_scaled();
  const std::int64_t hi = fmt.max_scaled();
  if (k >= lo && k <= hi) return static_cast<std::int64_t>(k);
  if (fmt.overflow == Overflow::saturate) return k < lo ? lo : hi;
  const __int128 modulus = static_cast<__int128>(1) << fmt.total_bits;
  __int128 r = (k - lo) % modulus;
  if (r < 0) r += modulus;
  return static_cast<std::int64_t>(r + lo);
}

std::int64_t apply_overflow_big(const mpz_class& k, const FixedWidthFormat& fmt) {
  const mpz_class lo(static_cast<long>(fmt.min_scaled()));
  const mpz_class hi(static_cast<long>(fmt.max_scaled()));
  if (k >= lo && k <= hi) return k.get_si();
  if (fmt.overflow == Overflow::saturate) return k < lo ? fmt.min_scaled() : fmt.max_scaled();
  const mpz_class modulus = mpz_class(1) << fmt.total_bits;
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), mpz_class(k - lo).get_mpz_t(), modulus.get_mpz_t());
  return mpz_class(r + lo).get_si();
}

}  // namespace

Rational quantize(const Rational& x, const FixedWidthFormat& fmt) {
  const std::int64_t scale = std::int64_t{1} << fmt.frac_bits;
  if (x.is_small()) {
    const std::int64_t den = x.small_den();
    if ((den & (den - 1)) == 0 && den <= scale) {
      // Already on the grid; only overflow can change it.
      const __int128 k = static_cast<__int128>(x.small_num()) * (scale / den);
      if (k >= fmt.min_scaled() && k <= fmt.max_scaled()) return x;
      return Rational(apply_overflow(k, fmt), scale);
    }
    const __int128 num = static_cast<__int128>(x.small_num()) * scale;
    __int128 q = num / den;
    const __int128 rem = num % den;
    if (rem != 0) {
      if (fmt.rounding == Rounding::down && num < 0) --q;
      if (fmt.rounding == Rounding::up && num > 0) ++q;
    }
    return Rational(apply_overflow(q, fmt), scale);
  }
  const mpq_class scaled_x = x.to_mpq() * mpq_class(mpz_class(1) << fmt.frac_bits);
  mpz_class k;
  if (fmt.rounding == Rounding::down) {
    mpz_fdiv_q(k.get_mpz_t(), scaled_x.get_num_mpz_t(), scaled_x.get_den_mpz_t());
  } else {
    mpz_cdiv_q(k.get_mpz_t(), scaled_x.get_num_mpz_t(), scaled_x.get_den_mpz_t());
  }
  return Rational(apply_overflow_big(k, fmt), scale);
}

ArithmeticContext ArithmeticContext::fixed(const FixedWidthFormat& fmt) {
  fmt.validate();
  ArithmeticContext ctx;
  ctx.format_ = fmt;
  return ctx;
}

Rational ArithmeticContext::sum(std::span<const Rational> values) const {
  Rational acc;
  for (const auto& v : values) acc = add(acc, v);
  return acc;
}

std::string ArithmeticContext::describe() const {
  if (!format_) return "exact";
  return "fixed(b=" + std::to_string(format_->total_bits) + ",F=" + std::to_string(format_->frac_bits) +
         "," + std::string(to_string(format_->overflow)) + "," + std::string(to_string(format_->rounding)) + ")";
}

}  // namespace trsat
