#include "trsat/fnn.hpp"

#include <algorithm>
#include <string>

#include "trsat/errors.hpp"

namespace trsat {

Fnn::Fnn(std::size_t input_dim, std::vector<FnnLayer> layers) : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ == 0) throw ConstructionError("fnn input_dim must be positive");
  if (layers_.empty()) throw ConstructionError("fnn needs at least one layer");
  std::size_t cols = input_dim_;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const auto& l = layers_[li];
    const std::string where = "fnn layer " + std::to_string(li + 1);
    if (l.weights.empty()) throw ConstructionError(where + " has no neurons");
    if (l.bias.size() != l.weights.size()) throw ConstructionError(where + ": bias length differs from row count");
    for (const auto& row : l.weights) {
      if (row.size() != cols) {
        throw ConstructionError(where + ": expected " + std::to_string(cols) + " columns, got " +
                                std::to_string(row.size()));
      }
    }
    if (l.activation == Activation::identity && li + 1 != layers_.size()) {
      throw ConstructionError(where + ": identity activation is only allowed on the last layer");
    }
    cols = l.weights.size();
  }
  build_sparse();
}

void Fnn::build_sparse() {
  sparse_.clear();
  sparse_.reserve(layers_.size());
  for (const auto& l : layers_) {
    std::vector<std::vector<Term>> rows;
    rows.reserve(l.rows());
    for (const auto& row : l.weights) {
      std::vector<Term> terms;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!row[c].is_zero()) terms.push_back({c, row[c]});
      }
      rows.push_back(std::move(terms));
    }
    sparse_.push_back(std::move(rows));
  }
}

Vec Fnn::eval(std::span<const Rational> input, const ArithmeticContext& ctx) const {
  if (input.size() != input_dim_) {
    throw PreconditionError("fnn expects " + std::to_string(input_dim_) + " inputs, got " +
                            std::to_string(input.size()));
  }
  Vec cur(input.begin(), input.end());
  Vec next;
  const bool fixed = ctx.is_fixed();
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const auto& l = layers_[li];
    const auto& rows = sparse_[li];
    next.resize(l.rows());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Rational acc;
      if (fixed) {
        for (const auto& t : rows[r]) acc = ctx.add(acc, ctx.mul(ctx.round(t.w), cur[t.col]));
        acc = ctx.add(acc, ctx.round(l.bias[r]));
      } else {
        for (const auto& t : rows[r]) acc += t.w * cur[t.col];
        acc += l.bias[r];
      }
      if (l.activation == Activation::relu && acc.sign() < 0) acc = Rational();
      next[r] = std::move(acc);
    }
    cur.swap(next);
  }
  return cur;
}

Matrix identity_matrix(std::size_t n) {
  Matrix m = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Matrix zero_matrix(std::size_t rows, std::size_t cols) { return Matrix(rows, Vec(cols)); }

Fnn affine(Matrix weights, Vec bias, Activation act) {
  if (weights.empty()) throw ConstructionError("affine layer needs at least one row");
  const std::size_t cols = weights.front().size();
  return Fnn(cols, {FnnLayer{std::move(weights), std::move(bias), act}});
}

Fnn relu_net(std::size_t dim) { return affine(identity_matrix(dim), Vec(dim), Activation::relu); }

namespace {

FnnLayer relu_identity_layer(std::size_t n) { return {identity_matrix(n), Vec(n), Activation::relu}; }

// Pads a net to exactly `target` layers. When `identity_last` is set the
// result's last layer uses identity activation.
std::vector<FnnLayer> padded_layers(const Fnn& net, std::size_t target, bool identity_last) {
  std::vector<FnnLayer> layers = net.layers();
  const std::size_t m = net.output_dim();
  if (layers.size() == target) return layers;
  if (!net.ends_with_identity()) {
    while (layers.size() + (identity_last ? 1 : 0) < target) layers.push_back(relu_identity_layer(m));
    if (identity_last) layers.push_back({identity_matrix(m), Vec(m), Activation::identity});
    return layers;
  }
  // Identity-ended net: split into positive and negative parts so relu
  // layers can carry it, and recombine at the end.
  FnnLayer last = std::move(layers.back());
  layers.pop_back();
  FnnLayer split;
  split.activation = Activation::relu;
  for (std::size_t r = 0; r < m; ++r) {
    split.weights.push_back(last.weights[r]);
    split.bias.push_back(last.bias[r]);
  }
  for (std::size_t r = 0; r < m; ++r) {
    Vec row;
    for (const auto& w : last.weights[r]) row.push_back(-w);
    split.weights.push_back(std::move(row));
    split.bias.push_back(-last.bias[r]);
  }
  layers.push_back(std::move(split));
  while (layers.size() + 1 < target) layers.push_back(relu_identity_layer(2 * m));
  Matrix join = zero_matrix(m, 2 * m);
  for (std::size_t r = 0; r < m; ++r) {
    join[r][r] = 1;
    join[r][m + r] = -1;
  }
  layers.push_back({std::move(join), Vec(m), Activation::identity});
  return layers;
}

}  // namespace

Fnn par(const std::vector<Fnn>& nets) {
  if (nets.empty()) throw ConstructionError("par needs at least one net");
  const std::size_t in = nets.front().input_dim();
  bool any_identity = false;
  std::size_t max_identity_depth = 0;
  std::size_t max_relu_depth = 0;
  for (const auto& n : nets) {
    if (n.input_dim() != in) throw ConstructionError("par: nets disagree on input_dim");
    if (n.ends_with_identity()) {
      any_identity = true;
      max_identity_depth = std::max(max_identity_depth, n.depth());
    } else {
      max_relu_depth = std::max(max_relu_depth, n.depth());
    }
  }
  if (nets.size() == 1) return nets.front();
  std::size_t target = any_identity ? std::max(max_identity_depth, max_relu_depth + 1) : max_relu_depth;
  std::vector<std::vector<FnnLayer>> padded;
  padded.reserve(nets.size());
  for (const auto& n : nets) padded.push_back(padded_layers(n, target, any_identity));

  std::vector<FnnLayer> layers(target);
  for (std::size_t li = 0; li < target; ++li) {
    std::size_t total_cols = 0;
    for (const auto& p : padded) total_cols += li == 0 ? 0 : p[li - 1].rows();
    if (li == 0) total_cols = in;
    FnnLayer& out = layers[li];
    out.activation = padded.front()[li].activation;
    std::size_t col_off = 0;
    for (const auto& p : padded) {
      const FnnLayer& l = p[li];
      for (std::size_t r = 0; r < l.rows(); ++r) {
        Vec row(total_cols);
        for (std::size_t c = 0; c < l.weights[r].size(); ++c) row[(li == 0 ? 0 : col_off) + c] = l.weights[r][c];
        out.weights.push_back(std::move(row));
        out.bias.push_back(l.bias[r]);
      }
      if (li > 0) col_off += p[li - 1].rows();
    }
  }
  return Fnn(in, std::move(layers));
}

Fnn seq(const Fnn& outer, const Fnn& inner) {
  if (inner.output_dim() != outer.input_dim()) {
    throw ConstructionError("seq: inner output dim " + std::to_string(inner.output_dim()) +
                            " does not match outer input dim " + std::to_string(outer.input_dim()));
  }
  std::vector<FnnLayer> layers = inner.layers();
  auto outer_it = outer.layers().begin();
  if (inner.ends_with_identity()) {
    const FnnLayer last = std::move(layers.back());
    layers.pop_back();
    const FnnLayer& first = *outer_it++;
    const std::size_t cols = last.weights.front().size();
    FnnLayer merged;
    merged.activation = first.activation;
    for (std::size_t r = 0; r < first.rows(); ++r) {
      Vec row(cols);
      Rational b = first.bias[r];
      for (std::size_t k = 0; k < last.rows(); ++k) {
        const Rational& w = first.weights[r][k];
        if (w.is_zero()) continue;
        for (std::size_t c = 0; c < cols; ++c) row[c] += w * last.weights[k][c];
        b += w * last.bias[k];
      }
      merged.weights.push_back(std::move(row));
      merged.bias.push_back(std::move(b));
    }
    layers.push_back(std::move(merged));
  }
  for (; outer_it != outer.layers().end(); ++outer_it) layers.push_back(*outer_it);
  return Fnn(inner.input_dim(), std::move(layers));
}

Fnn on_dims(const Fnn& net, const std::vector<std::size_t>& dims, std::size_t width) {
  if (dims.size() != net.input_dim()) throw ConstructionError("on_dims: need one index per net input");
  std::vector<bool> seen(width, false);
  for (auto d : dims) {
    if (d >= width) throw ConstructionError("on_dims: index " + std::to_string(d) + " out of range");
    if (seen[d]) throw ConstructionError("on_dims: duplicate index " + std::to_string(d));
    seen[d] = true;
  }
  std::vector<FnnLayer> layers = net.layers();
  for (auto& row : layers.front().weights) {
    Vec wide(width);
    for (std::size_t c = 0; c < row.size(); ++c) wide[dims[c]] = row[c];
    row = std::move(wide);
  }
  return Fnn(width, std::move(layers));
}

}  // namespace trsat
