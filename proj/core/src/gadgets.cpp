#include "trsat/gadgets.hpp"

#include "trsat/errors.hpp"

namespace trsat {

namespace {

constexpr Activation kRelu = Activation::relu;

Fnn two_layer(Matrix w1, Vec b1, Matrix w2, Vec b2) {
  const std::size_t in = w1.front().size();
  return Fnn(in, {FnnLayer{std::move(w1), std::move(b1), kRelu}, FnnLayer{std::move(w2), std::move(b2), kRelu}});
}

Fnn constant_net(std::size_t in, const Rational& value) {
  return affine(Matrix{Vec(in)}, Vec{value}, kRelu);
}

}  // namespace

Fnn gadget_abs() { return two_layer({{-1}, {1}}, {0, 0}, {{1, 1}}, {0}); }

Fnn gadget_lt() { return two_layer({{1, -1}, {1, -1}}, {1, 0}, {{1, -1}}, {0}); }

Fnn gadget_eq() {
  return two_layer({{-1, 1}, {-1, 1}, {1, -1}, {1, -1}}, {0, -1, 0, -1}, {{1, -1, 1, -1}}, {0});
}

Fnn gadget_guard(const Rational& k) {
  if (k.sign() <= 0) throw ConstructionError("gadget_guard needs k > 0, got " + k.str());
  return two_layer({{1, 0}, {0, 1}}, {0, 0}, {{-k, 1}}, {0});
}

Fnn gadget_eq_const(const Rational& t) {
  // Feed (x, t) into gadget_eq; the affine stage folds into its first layer.
  return seq(gadget_eq(), affine({{1}, {0}}, {0, t}, Activation::identity));
}

Fnn gadget_neq_const(const Rational& t) { return seq(affine({{-1}}, {1}, kRelu), gadget_eq_const(t)); }

Fnn gadget_min() { return two_layer({{1, 0}, {1, -1}}, {0, 0}, {{1, -1}}, {0}); }

Fnn gadget_membership(const std::set<std::int64_t>& T, const std::set<std::int64_t>& S) {
  for (auto t : T) {
    if (!S.count(t)) throw ConstructionError("gadget_membership: " + std::to_string(t) + " not in S");
  }
  if (T.empty()) return constant_net(1, 1);
  std::vector<Fnn> leaves;
  for (auto t : T) leaves.push_back(gadget_eq_const(t));
  Fnn net = par(leaves);
  // Fold the leaves pairwise with min until one output remains.
  while (net.output_dim() > 1) {
    const std::size_t w = net.output_dim();
    std::vector<Fnn> stage;
    for (std::size_t i = 0; i + 1 < w; i += 2) stage.push_back(on_dims(gadget_min(), {i, i + 1}, w));
    if (w % 2 == 1) stage.push_back(on_dims(relu_net(1), {w - 1}, w));
    net = seq(par(stage), net);
  }
  return net;
}

Fnn gadget_relation(const std::set<std::pair<std::int64_t, std::int64_t>>& R, const std::set<std::int64_t>& S) {
  for (const auto& [a, b] : R) {
    if (!S.count(a) || !S.count(b)) {
      throw ConstructionError("gadget_relation: pair (" + std::to_string(a) + "," + std::to_string(b) +
                              ") outside S x S");
    }
  }
  if (S.empty()) throw ConstructionError("gadget_relation: S must be non-empty");
  std::vector<Fnn> branches;
  for (auto s : S) {
    std::set<std::int64_t> image;
    for (const auto& [a, b] : R) {
      if (a == s) image.insert(b);
    }
    Fnn inputs = par({on_dims(gadget_eq_const(s), {0}, 2), on_dims(gadget_membership(image, S), {1}, 2)});
    branches.push_back(seq(gadget_guard(1), inputs));
  }
  return seq(gadget_and(branches.size()), par(branches));
}

Fnn gadget_and(std::size_t k) {
  if (k == 0) throw ConstructionError("gadget_and needs k >= 1");
  return affine(Matrix{Vec(k, Rational(1))}, Vec{0}, kRelu);
}

}  // namespace trsat
