#include "trsat/reduction.hpp"

#include "trsat/errors.hpp"
#include "trsat/gadgets.hpp"

namespace trsat {

std::string_view to_string(Variant v) { return v == Variant::unbounded ? "unbounded" : "bounded"; }

namespace {

constexpr Activation kRelu = Activation::relu;
constexpr Activation kId = Activation::identity;

Vec unit(std::size_t dim, std::size_t i, const Rational& v = 1) {
  Vec out(dim);
  out[i] = v;
  return out;
}

// x -> -relu(x)
Fnn neg_relu_score() { return Fnn(1, {FnnLayer{{{1}}, {0}, kRelu}, FnnLayer{{{-1}}, {0}, kId}}); }

// x -> -relu(relu(x - 1) + relu(1 - x))
Fnn neg_dist_to_one_score() {
  return Fnn(1, {FnnLayer{{{1}, {-1}}, {-1, 1}, kRelu}, FnnLayer{{{1, 1}}, {0}, kRelu}, FnnLayer{{{-1}}, {0}, kId}});
}

// x -> -relu(|x|)
Fnn neg_abs_score() { return seq(affine({{-1}}, {0}, kId), seq(relu_net(1), gadget_abs())); }

// x -> -relu(-x)
Fnn neg_relu_neg_score() { return Fnn(1, {FnnLayer{{{-1}}, {0}, kRelu}, FnnLayer{{{-1}}, {0}, kId}}); }

// relu of a sum of selected inputs.
Fnn relu_sum(const std::vector<std::size_t>& dims, std::size_t width) {
  Vec row(width);
  for (auto d : dims) row[d] = 1;
  return affine(Matrix{row}, Vec{0}, kRelu);
}

Fnn pick(std::size_t dim, std::size_t width) { return on_dims(relu_net(1), {dim}, width); }

// N_->(premise, conclusion); both nets share the input width.
Fnn implies(const Fnn& premise, const Fnn& conclusion) { return seq(gadget_guard(1), par({premise, conclusion})); }

// Input index of x_{a,b} in comb_3 (1-based a, b over 5-dim blocks).
std::size_t xi(std::size_t a, std::size_t b) { return (a - 1) * 5 + (b - 1); }

Fnn comb3(const TilingSystem& sys, std::optional<std::size_t> bound) {
  constexpr std::size_t w = 20;
  const auto tiles = sys.tile_set();
  std::set<std::pair<std::int64_t, std::int64_t>> H(sys.horiz.begin(), sys.horiz.end());
  std::set<std::pair<std::int64_t, std::int64_t>> V(sys.vert.begin(), sys.vert.end());
  const Fnn eq = gadget_eq();
  const Fnn lt = gadget_lt();

  std::vector<Fnn> parts;
  parts.push_back(pick(xi(1, 1), w));
  parts.push_back(pick(xi(1, 2), w));
  // Last position must sit on the diagonal.
  parts.push_back(implies(on_dims(eq, {xi(1, 2), xi(3, 2)}, w), on_dims(eq, {xi(1, 3), xi(1, 4)}, w)));
  // First tile is t_I.
  parts.push_back(implies(on_dims(eq, {xi(1, 2), xi(2, 2)}, w), on_dims(gadget_eq_const(sys.t_init), {xi(1, 5)}, w)));
  // Last tile is t_F.
  parts.push_back(
      implies(on_dims(eq, {xi(1, 2), xi(3, 2)}, w), on_dims(gadget_eq_const(sys.t_final), {xi(1, 5)}, w)));
  // Horizontal neighbour.
  parts.push_back(
      implies(on_dims(lt, {xi(1, 4), xi(1, 3)}, w), on_dims(gadget_relation(H, tiles), {xi(1, 5), xi(3, 5)}, w)));
  // Vertical neighbour.
  parts.push_back(
      implies(on_dims(lt, {xi(1, 3), xi(4, 3)}, w), on_dims(gadget_relation(V, tiles), {xi(1, 5), xi(4, 5)}, w)));
  if (bound) {
    const auto n = static_cast<std::int64_t>(*bound);
    parts.push_back(implies(on_dims(eq, {xi(1, 2), xi(3, 2)}, w), on_dims(gadget_eq_const(n), {xi(1, 3)}, w)));
    parts.push_back(on_dims(gadget_neq_const((n + 1) * (n + 2) / 2 + 1), {xi(1, 2)}, w));
  }
  return par(parts);
}

}  // namespace

std::pair<Layer, Layer> build_decode_layers(bool strict) {
  constexpr std::size_t d0 = 5;
  Layer l1;
  {
    AttentionHead h;
    h.q = {{0, 0, -1, 0, 0}, {0, 1, 0, 0, 0}, {0, 1, 0, 0, 0}};
    h.k = {{0, 1, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 0, 1, 0}};
    h.score_net = neg_relu_score();
    h.pool_w = {unit(d0, 0)};
    h.norm = Norm::hardmax;
    l1.heads.push_back(std::move(h));
    // (x2, x3, x4, x5, y) and, unless strict, the first-position flag x1.
    std::vector<Fnn> parts;
    for (std::size_t i : {1, 2, 3, 4, 5}) parts.push_back(pick(i, d0 + 1));
    if (!strict) parts.push_back(pick(0, d0 + 1));
    l1.comb = par(parts);
  }
  const std::size_t d1 = strict ? 5 : 6;
  Layer l2;
  {
    AttentionHead h;
    h.q = {unit(d1, 4)};
    h.k = {unit(d1, 1)};
    h.score_net = neg_dist_to_one_score();
    h.pool_w = {unit(d1, 1), unit(d1, 2)};
    h.norm = Norm::hardmax;
    l2.heads.push_back(std::move(h));
    const std::size_t w = d1 + 2;
    const std::size_t y1 = d1;
    const std::size_t y2 = d1 + 1;
    Vec row_r(w);
    row_r[y1] = 1;
    if (!strict) row_r[5] = -1;
    Vec row_c(w);
    row_c[1] = 1;
    row_c[y2] = -1;
    l2.comb = par({pick(0, w), pick(1, w), affine({row_r}, {0}, kRelu), affine({row_c}, {-1}, kRelu), pick(3, w)});
  }
  return {std::move(l1), std::move(l2)};
}

AttentionHead build_linear_head(const Vec& a, const Rational& b, std::size_t dim) {
  if (a.size() != dim || dim < 2) throw ConstructionError("linear head needs coefficients for every dimension");
  AttentionHead h;
  h.q = {a, unit(dim, 0, b), unit(dim, 0)};
  h.k = {unit(dim, 0), unit(dim, 0), unit(dim, 1, -1)};
  h.score_net = neg_abs_score();
  h.pool_w = identity_matrix(dim);
  h.norm = Norm::hardmax;
  return h;
}

AttentionHead build_leq_head(std::size_t dim) {
  if (dim < 2) throw ConstructionError("leq head needs inputs of dimension >= 2");
  AttentionHead h;
  h.q = {unit(dim, 1), unit(dim, 0)};
  h.k = {unit(dim, 0), unit(dim, 1, -1)};
  h.score_net = neg_relu_neg_score();
  h.pool_w = identity_matrix(dim);
  h.norm = Norm::hardmax;
  return h;
}

namespace {

CompiledReduction compile(const TilingSystem& sys, std::optional<std::size_t> bound, const CompileOptions& opts) {
  sys.validate();
  auto [l1, l2] = build_decode_layers(opts.strict_decode);
  constexpr std::size_t d2 = 5;
  Layer l3;
  l3.heads.push_back(build_linear_head({0, 1, 0, 0, 0}, -1, d2));
  l3.heads.push_back(build_linear_head({0, 1, 0, 0, 0}, 1, d2));
  l3.heads.push_back(build_linear_head({0, 1, 1, 0, 0}, 1, d2));
  l3.comb = comb3(sys, bound);
  const std::size_t d3 = l3.comb.output_dim();
  Layer l4;
  l4.heads.push_back(build_leq_head(d3));
  std::vector<std::size_t> checks;
  for (std::size_t i = 2; i < d3; ++i) checks.push_back(d3 + i);
  l4.comb = relu_sum(checks, 2 * d3);
  Fnn out = affine({{-1}}, {1}, kRelu);

  CompiledReduction r;
  r.te = TransformerEncoder(sys.alphabet(), TudecEmbedding{}, {std::move(l1), std::move(l2), std::move(l3), std::move(l4)},
                            std::move(out));
  r.system = sys;
  r.variant = bound ? Variant::bounded : Variant::unbounded;
  r.n = bound;
  if (bound) r.recommended_format = log_precision_format(sys.size(), *bound, Variant::bounded);
  return r;
}

// floor(log2(x^k)) for x >= 1.
int floor_log2_pow(std::size_t x, int k) {
  mpz_class p = 1;
  for (int i = 0; i < k; ++i) p *= static_cast<unsigned long>(x);
  return static_cast<int>(mpz_sizeinbase(p.get_mpz_t(), 2)) - 1;
}

}  // namespace

CompiledReduction compile_unbounded(const TilingSystem& sys, const CompileOptions& opts) {
  return compile(sys, std::nullopt, opts);
}

CompiledReduction compile_bounded(const TilingSystem& sys, std::size_t n, const CompileOptions& opts) {
  return compile(sys, n, opts);
}

FixedWidthFormat log_precision_format(std::size_t sigma_size, std::size_t n, Variant variant) {
  if (sigma_size == 0) throw PreconditionError("log_precision_format needs sigma_size >= 1");
  if (n == 0) n = 1;
  const std::size_t m = std::max(sigma_size, n);
  FixedWidthFormat f;
  f.overflow = Overflow::saturate;
  f.rounding = Rounding::down;
  if (variant == Variant::unbounded) {
    f.total_bits = floor_log2_pow(m, 4) + 2 + 1;
    f.frac_bits = floor_log2_pow(n, 1) + 1;
  } else {
    f.total_bits = floor_log2_pow(m, 6) + 2 + 1;
    f.frac_bits = floor_log2_pow(n, 2) + 1;
  }
  if (f.total_bits > FixedWidthFormat::kMaxBits) {
    throw PreconditionError("log-precision format exceeds " + std::to_string(FixedWidthFormat::kMaxBits) + " bits");
  }
  f.validate();
  return f;
}

}  // namespace trsat
