#include <gtest/gtest.h>

#include <random>

#include <trsat/errors.hpp>
#include <trsat/rational.hpp>

using trsat::Rational;

TEST(Rational, LowestTermsPositiveDenominator) {
  const Rational r(6, -4);
  EXPECT_EQ(r.str(), "-3/2");
  EXPECT_EQ(r.small_den(), 2);
  EXPECT_EQ(Rational(0, -7).str(), "0/1");
}

TEST(Rational, ParseForms) {
  EXPECT_EQ(Rational::parse("3/4"), Rational(3, 4));
  EXPECT_EQ(Rational::parse("-5"), Rational(-5));
  EXPECT_EQ(Rational::parse("10/-4"), Rational(-5, 2));
  EXPECT_THROW(Rational::parse("1/0"), trsat::ParseError);
  EXPECT_THROW(Rational::parse("abc"), trsat::ParseError);
  EXPECT_THROW(Rational::parse(""), trsat::ParseError);
  EXPECT_THROW(Rational::parse("1/2/3"), trsat::ParseError);
}

TEST(Rational, ZeroDenominatorConstructorThrows) { EXPECT_THROW(Rational(1, 0), trsat::Error); }

TEST(Rational, DivisionByZeroIsEvalError) { EXPECT_THROW(Rational(1) / Rational(0), trsat::EvalError); }

TEST(Rational, PromotesToBigAndBack) {
  const Rational big = Rational(INT64_MAX) * Rational(INT64_MAX);
  EXPECT_FALSE(big.is_small());
  const Rational back = big / Rational(INT64_MAX);
  EXPECT_TRUE(back.is_small());
  EXPECT_EQ(back, Rational(INT64_MAX));
  const Rational m(INT64_MIN);
  EXPECT_EQ(m.str(), "-9223372036854775808/1");
  EXPECT_EQ(-(-m), m);
}

TEST(Rational, OrderingAndHashAgreeAcrossRepresentations) {
  const Rational a = (Rational(INT64_MAX) + Rational(1)) - Rational(1);
  EXPECT_EQ(a, Rational(INT64_MAX));
  EXPECT_EQ(a.hash(), Rational(INT64_MAX).hash());
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_GT(Rational(INT64_MAX) * 4, Rational(INT64_MAX));
}

TEST(Rational, FloorCeil) {
  EXPECT_EQ(Rational(-7, 2).floor(), -4);
  EXPECT_EQ(Rational(-7, 2).ceil(), -3);
  EXPECT_EQ(Rational(7, 2).floor(), 3);
  EXPECT_EQ(Rational(4).ceil(), 4);
}

// Exact mode forms a field: check ring laws against GMP on random values,
// including ones large enough to leave the inline representation.
TEST(Rational, RingLawsAgainstGmp) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> small(-1000, 1000);
  std::uniform_int_distribution<std::int64_t> wide(INT64_MIN / 2, INT64_MAX / 2);
  auto pick = [&] {
    const bool w = rng() % 4 == 0;
    std::int64_t n = w ? wide(rng) : small(rng);
    std::int64_t d = w ? wide(rng) : small(rng);
    if (d == 0) d = 1;
    return Rational(n, d);
  };
  for (int i = 0; i < 20000; ++i) {
    const Rational a = pick(), b = pick(), c = pick();
    ASSERT_EQ((a + b).to_mpq(), a.to_mpq() + b.to_mpq());
    ASSERT_EQ((a * b).to_mpq(), a.to_mpq() * b.to_mpq());
    ASSERT_EQ((a - b).to_mpq(), a.to_mpq() - b.to_mpq());
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a + b, b + a);
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ(a * (b + c), a * b + a * c);
    if (!b.is_zero()) {
      ASSERT_EQ((a / b) * b, a);
    }
    ASSERT_EQ(a < b, a.to_mpq() < b.to_mpq());
  }
}
