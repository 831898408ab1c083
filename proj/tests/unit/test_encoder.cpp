#include <gtest/gtest.h>

#include <trsat/encoder.hpp>
#include <trsat/errors.hpp>
#include <trsat/reduction.hpp>

#include "oracles.hpp"

using namespace trsat;

namespace {

const ArithmeticContext kExact = ArithmeticContext::exact();

Fnn identity_score() { return affine({{1}}, {0}, Activation::identity); }

// One layer, one head with constant scores; comb passes the pooled value.
TransformerEncoder averaging_te(Norm norm) {
  AttentionHead h;
  h.q = {{0}};
  h.k = {{0}};
  h.score_net = identity_score();
  h.pool_w = {{1}};
  h.norm = norm;
  Layer l{{h}, affine({{0, 1}}, {0}, Activation::relu)};
  AdditivePeriodicEmbedding emb{{{Rational(3, 4)}, {Rational(1, 4)}}, {{0}}};
  return TransformerEncoder(Alphabet({"a", "b"}), emb, {l}, affine({{1}}, {0}, Activation::identity));
}

}  // namespace

TEST(Alphabet, ParseAndFormat) {
  const Alphabet a({"x", "yy", "z"});
  EXPECT_EQ(a.parse_word("yy,x,z"), (Word{2, 1, 3}));
  EXPECT_EQ(a.format_word({3, 2}), "z,yy");
  EXPECT_THROW(a.parse_word("x,w"), ParseError);
  EXPECT_THROW(a.parse_word(""), ParseError);
  EXPECT_THROW(Alphabet({"a", "a"}), ConstructionError);
  EXPECT_THROW(Alphabet({"a,b"}), ConstructionError);
  EXPECT_THROW(Alphabet(std::vector<std::string>{}), ConstructionError);
}

TEST(Embedding, Tudec) {
  const auto [l1, l2] = build_decode_layers();
  const TransformerEncoder te(Alphabet({"a", "b"}), TudecEmbedding{}, {l1, l2},
                              affine({{0, 0, 0, 0, 1}}, {0}, Activation::identity));
  const auto x = embed(te, {1, 2});
  EXPECT_EQ(x[0], (Vec{1, 1, 1, 1, 1}));
  EXPECT_EQ(x[1], (Vec{0, 1, 2, 3, 2}));
  EXPECT_EQ(embed_at(TudecEmbedding{}, 1, 4)[3], Rational(10));
  EXPECT_THROW(embed(te, {}), PreconditionError);
  EXPECT_THROW(embed(te, {3}), PreconditionError);
}

TEST(Embedding, PeriodicRepeatsWithPeriod) {
  const AdditivePeriodicEmbedding emb{{{1, 0}}, {{0, 0}, {0, 1}}};
  EXPECT_EQ(embed_at(emb, 1, 1), embed_at(emb, 1, 3));
  EXPECT_NE(embed_at(emb, 1, 1), embed_at(emb, 1, 2));
  // 1-based i, literal i mod p: position 2 uses positional[0]
  EXPECT_EQ(embed_at(emb, 1, 2), (Vec{1, 0}));
  EXPECT_EQ(embed_at(emb, 1, 1), (Vec{1, 1}));
}

TEST(Encoder, RejectsDimensionMismatch) {
  AttentionHead h;
  h.q = {{1, 0}};
  h.k = {{1}};
  h.score_net = identity_score();
  h.pool_w = {{1}};
  Layer l{{h}, relu_net(2)};
  AdditivePeriodicEmbedding emb{{{1}}, {{0}}};
  EXPECT_THROW(TransformerEncoder(Alphabet({"a"}), emb, {l}, relu_net(2)), ConstructionError);
  EXPECT_THROW(TransformerEncoder(Alphabet({"a"}), emb, {}, relu_net(2)), ConstructionError);
  EXPECT_THROW(TransformerEncoder(Alphabet({"a"}), emb, {}, relu_net(1), 3), ConstructionError);
}

TEST(Heads, PlainScalarProducts) {
  AttentionHead h;
  h.q = {{1}};
  h.k = {{1}};
  h.score_net = identity_score();
  h.pool_w = {{1}};
  const std::vector<Vec> seq = {{2}, {3}};
  EXPECT_EQ(head_scores(h, seq, 1, kExact), (Vec{4, 6}));
  EXPECT_EQ(head_scores(h, {{2}}, 1, kExact).size(), 1u);
  EXPECT_THROW(head_scores(h, seq, 3, kExact), PreconditionError);
}

TEST(Heads, FirstDecodeHeadScoresAndPool) {
  const auto [l1, l2] = build_decode_layers();
  const TransformerEncoder te(Alphabet({"a"}), TudecEmbedding{}, {l1}, affine({{0, 0, 0, 0, 0, 1}}, {0}, Activation::identity));
  const auto x = embed(te, Word(5, 1));
  const AttentionHead& h = l1.heads.at(0);
  EXPECT_EQ(head_scores(h, x, 5, kExact), (Vec{0, 0, -2, -6, -11}));
  AttentionHead flag = h;
  flag.pool_w = {{1, 0, 0, 0, 0}};
  EXPECT_EQ(head_pool(flag, x, 5, kExact), (Vec{Rational(1, 2)}));
}

TEST(Normalize, Hardmax) {
  const Vec s = {3, 3, 1};
  EXPECT_EQ(normalize(Norm::hardmax, 1, s, kExact), Rational(1, 2));
  EXPECT_EQ(normalize(Norm::hardmax, 3, s, kExact), Rational(0));
  EXPECT_EQ(normalize_all(Norm::hardmax, s, kExact), (Vec{Rational(1, 2), Rational(1, 2), 0}));
  EXPECT_THROW(normalize(Norm::hardmax, 4, s, kExact), PreconditionError);
}

TEST(Normalize, Softmax) {
  EXPECT_EQ(normalize(Norm::softmax, 1, {0, 0}, kExact), Rational(1, 2));
  const Vec w = normalize_all(Norm::softmax, {1, 0, -1}, kExact);
  EXPECT_EQ(w[0] + w[1] + w[2], Rational(1));
  EXPECT_GT(w[0], w[1]);
  EXPECT_GT(w[1], w[2]);
  // e^1 truncated after the x^2 term is 5/2.
  EXPECT_EQ(exp_taylor(1, 2), Rational(5, 2));
  EXPECT_NEAR(exp_taylor(1, 16).to_double(), 2.718281828459045, 1e-12);
}

TEST(Heads, HardmaxPoolingOfTies) {
  AttentionHead h;
  h.q = {{0, 0}};
  h.k = {{0, 0}};
  h.score_net = identity_score();
  h.pool_w = identity_matrix(2);
  const std::vector<Vec> seq = {{2, 4}, {4, 0}};
  EXPECT_EQ(head_pool(h, seq, 1, kExact), (Vec{3, 2}));
  EXPECT_EQ(attends_to(h, seq, 2, kExact), (std::set<std::size_t>{1, 2}));
  h.norm = Norm::softmax;
  EXPECT_THROW(attends_to(h, seq, 1, kExact), PreconditionError);
}

TEST(Heads, UniqueMaxPoolsThatVector) {
  AttentionHead h;
  h.q = {{1, 0}};
  h.k = {{1, 0}};
  h.score_net = identity_score();
  h.pool_w = identity_matrix(2);
  const std::vector<Vec> seq = {{1, 5}, {3, 7}, {2, 9}};
  EXPECT_EQ(head_pool(h, seq, 1, kExact), seq[1]);
  EXPECT_EQ(attends_to(h, seq, 1, kExact), (std::set<std::size_t>{2}));
}

TEST(Evaluate, AveragingIdenticalVectors) {
  const auto te = averaging_te(Norm::hardmax);
  EXPECT_EQ(evaluate_output(te, {1, 1, 1}, kExact), Rational(3, 4));
  EXPECT_EQ(evaluate_output(te, {1, 2}, kExact), Rational(1, 2));
  const auto r = evaluate(te, {1, 2, 2}, kExact);
  ASSERT_EQ(r.trace.xs.size(), 2u);
  EXPECT_EQ(r.trace.xs[1][2], (Vec{Rational(5, 12)}));
  ASSERT_EQ(r.trace.heads.size(), 1u);
  EXPECT_EQ(r.trace.heads[0][0].weights[0], (Vec{Rational(1, 3), Rational(1, 3), Rational(1, 3)}));
}

TEST(Evaluate, FixedModeQuantizesWeights) {
  const auto te = averaging_te(Norm::hardmax);
  FixedWidthFormat f;
  f.total_bits = 8;
  f.frac_bits = 2;
  // weights 1/3 -> 1/4; 1/4 * 3/4 -> 0 three times
  EXPECT_EQ(evaluate_output(te, {1, 1, 1}, ArithmeticContext::fixed(f)), Rational(0));
}

TEST(Evaluate, SoftmaxAgreesWithHardmaxOnConstantScores) {
  EXPECT_EQ(evaluate_output(averaging_te(Norm::softmax), {1, 2, 2, 1}, kExact), Rational(1, 2));
}

TEST(Accepts, StrictEqualityAndThreshold) {
  const auto te = averaging_te(Norm::hardmax);
  AdditivePeriodicEmbedding one{{{1}, {0}}, {{0}}};
  const TransformerEncoder t1(te.alphabet(), one, te.layers(), te.out());
  EXPECT_TRUE(accepts(t1, {1}, kExact));
  EXPECT_FALSE(accepts(t1, {2}, kExact));
  EXPECT_FALSE(accepts(t1, {1, 2}, kExact));
  EXPECT_TRUE(accepts(t1, {1, 2}, kExact, Rational(1, 2)));
}

TEST(Encoder, ComplexityCountsEveryPart) {
  const auto te = averaging_te(Norm::hardmax);
  const auto c = te.complexity(kExact);
  EXPECT_EQ(c.sigma, 2u);
  EXPECT_EQ(c.depth, 1u);
  EXPECT_EQ(c.width, 1u);
  EXPECT_EQ(c.period, std::optional<std::size_t>(1));
  EXPECT_FALSE(c.bits);
  FixedWidthFormat f;
  f.total_bits = 6;
  EXPECT_EQ(te.complexity(ArithmeticContext::fixed(f)).bits, std::optional<int>(6));
  EXPECT_EQ(te.complexity(ArithmeticContext::fixed(f)).value(), c.value() + 6);
}
