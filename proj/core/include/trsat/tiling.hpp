#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trsat/encoder.hpp"

namespace trsat {

using TilePair = std::pair<int, int>;

/// Tiles are coded 1..k in the order of `names`.
struct TilingSystem {
  std::vector<std::string> names;
  std::set<TilePair> horiz;
  std::set<TilePair> vert;
  int t_init = 1;
  int t_final = 1;

  std::size_t size() const { return names.size(); }
  std::set<std::int64_t> tile_set() const;
  Alphabet alphabet() const { return Alphabet(names); }
  /// Throws ConstructionError when a relation or t_init/t_final leaves 1..k.
  void validate() const;
};

struct OctantCoord {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const OctantCoord&, const OctantCoord&) = default;
};

/// Row-major position (1-based) to octant cell.
OctantCoord octant_coords(std::size_t position);
/// r(r+1)/2 + c + 1. Throws PreconditionError if col > row.
std::size_t octant_index(OctantCoord c);

bool is_triangular(std::size_t n);
bool is_encoded_tiling(const Word& w);
bool is_valid_encoded_tiling(const TilingSystem& sys, const Word& w);
/// Row of the last cell.
std::size_t final_row(const Word& w);

/// First valid word in length-then-lexicographic order with |w| <= max_len.
std::optional<Word> solve_bounded_tiling(const TilingSystem& sys, std::size_t max_len);

}  // namespace trsat
