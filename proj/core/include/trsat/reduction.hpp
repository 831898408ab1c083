#pragma once

#include <optional>
#include <utility>

#include "trsat/encoder.hpp"
#include "trsat/tiling.hpp"

namespace trsat {

enum class Variant { unbounded, bounded };
std::string_view to_string(Variant v);

struct CompiledReduction {
  TransformerEncoder te;
  TilingSystem system;
  Variant variant = Variant::unbounded;
  std::optional<std::size_t> n;
  std::optional<FixedWidthFormat> recommended_format;
};

/// Decode layers turning the built-in embedding into (1, i, r(i), c(i), k_i).
/// With strict = true the first position decodes to row 1 instead of 0, as in
/// the unpatched construction.
std::pair<Layer, Layer> build_decode_layers(bool strict = false);

/// Hardmax head attending to the position nearest f(x) = <a, x> + b, for
/// inputs of the form (1, i, ...). Pools with the identity.
AttentionHead build_linear_head(const Vec& a, const Rational& b, std::size_t dim);
/// Hardmax head attending to positions 1..i. Pools with the identity.
AttentionHead build_leq_head(std::size_t dim);

struct CompileOptions {
  bool strict_decode = false;
};

CompiledReduction compile_unbounded(const TilingSystem& sys, const CompileOptions& opts = {});
CompiledReduction compile_bounded(const TilingSystem& sys, std::size_t n, const CompileOptions& opts = {});

/// n = 0 is treated as n = 1.
FixedWidthFormat log_precision_format(std::size_t sigma_size, std::size_t n, Variant variant);

}  // namespace trsat
