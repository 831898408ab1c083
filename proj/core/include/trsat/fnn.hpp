#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trsat/arithmetic.hpp"
#include "trsat/rational.hpp"

namespace trsat {

using Vec = std::vector<Rational>;
using Matrix = std::vector<Vec>;

enum class Activation { relu, identity };

struct FnnLayer {
  Matrix weights;  // rows x cols
  Vec bias;        // rows
  Activation activation = Activation::relu;

  std::size_t rows() const { return weights.size(); }
};

/// Layered affine + activation network. Only the last layer may use the
/// identity activation.
class Fnn {
 public:
  Fnn() = default;
  /// Throws ConstructionError on shape or activation violations.
  Fnn(std::size_t input_dim, std::vector<FnnLayer> layers);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return layers_.empty() ? input_dim_ : layers_.back().rows(); }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<FnnLayer>& layers() const { return layers_; }
  bool ends_with_identity() const {
    return !layers_.empty() && layers_.back().activation == Activation::identity;
  }

  /// Each neuron computes w_1*x_1 + ... + w_m*x_m + b left to right through
  /// ctx (zero weights skipped), then the activation. In Fixed mode weights
  /// and biases are quantized to the format first.
  Vec eval(std::span<const Rational> input, const ArithmeticContext& ctx) const;

 private:
  struct Term {
    std::size_t col;
    Rational w;
  };
  void build_sparse();

  std::size_t input_dim_ = 0;
  std::vector<FnnLayer> layers_;
  std::vector<std::vector<std::vector<Term>>> sparse_;
};

inline Vec eval_fnn(const Fnn& net, std::span<const Rational> input, const ArithmeticContext& ctx) {
  return net.eval(input, ctx);
}

Matrix identity_matrix(std::size_t n);
Matrix zero_matrix(std::size_t rows, std::size_t cols);

/// Single affine layer.
Fnn affine(Matrix weights, Vec bias, Activation act);
/// relu(x) componentwise, one layer.
Fnn relu_net(std::size_t dim);

/// (N_1(x), ..., N_k(x)). Shallower nets are padded with value-preserving
/// layers; if any net ends with identity, the result does too.
Fnn par(const std::vector<Fnn>& nets);
/// outer(inner(x)). An identity last layer of inner is folded into outer's
/// first layer.
Fnn seq(const Fnn& outer, const Fnn& inner);
/// Lifts net to inputs of the given width, feeding it dims[0], dims[1], ...
/// (0-based indices, pairwise distinct).
Fnn on_dims(const Fnn& net, const std::vector<std::size_t>& dims, std::size_t width);

}  // namespace trsat
