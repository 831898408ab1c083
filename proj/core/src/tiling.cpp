#include "trsat/tiling.hpp"

#include <cmath>

#include "trsat/errors.hpp"

namespace trsat {

std::set<std::int64_t> TilingSystem::tile_set() const {
  std::set<std::int64_t> s;
  for (std::size_t i = 1; i <= names.size(); ++i) s.insert(static_cast<std::int64_t>(i));
  return s;
}

void TilingSystem::validate() const {
  if (names.empty()) throw ConstructionError("tiling system needs at least one tile");
  const int k = static_cast<int>(names.size());
  auto in_range = [k](int t) { return t >= 1 && t <= k; };
  for (const auto* rel : {&horiz, &vert}) {
    for (const auto& [a, b] : *rel) {
      if (!in_range(a) || !in_range(b)) throw ConstructionError("relation pair refers to an unknown tile");
    }
  }
  if (!in_range(t_init) || !in_range(t_final)) throw ConstructionError("t_init/t_final must be tiles");
  (void)alphabet();
}

OctantCoord octant_coords(std::size_t position) {
  if (position == 0) throw PreconditionError("positions are 1-based");
  const std::size_t idx = position - 1;
  auto r = static_cast<std::size_t>((std::sqrt(8.0 * static_cast<double>(idx) + 1.0) - 1.0) / 2.0);
  while (r * (r + 1) / 2 > idx) --r;
  while ((r + 1) * (r + 2) / 2 <= idx) ++r;
  return {r, idx - r * (r + 1) / 2};
}

std::size_t octant_index(OctantCoord c) {
  if (c.col > c.row) throw PreconditionError("octant cell needs col <= row");
  return c.row * (c.row + 1) / 2 + c.col + 1;
}

bool is_triangular(std::size_t n) {
  if (n == 0) return false;
  const OctantCoord c = octant_coords(n);
  return c.col == c.row;
}

bool is_encoded_tiling(const Word& w) { return is_triangular(w.size()); }

std::size_t final_row(const Word& w) {
  if (w.empty()) throw PreconditionError("empty word has no final row");
  return octant_coords(w.size()).row;
}

bool is_valid_encoded_tiling(const TilingSystem& sys, const Word& w) {
  for (int t : w) {
    if (t < 1 || static_cast<std::size_t>(t) > sys.size()) throw PreconditionError("word uses a tile outside S");
  }
  if (!is_encoded_tiling(w)) return false;
  if (w.front() != sys.t_init || w.back() != sys.t_final) return false;
  const std::size_t k = final_row(w);
  auto at = [&](std::size_t r, std::size_t c) { return w[octant_index({r, c}) - 1]; };
  for (std::size_t r = 0; r <= k; ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      if (c < r && !sys.horiz.count({at(r, c), at(r, c + 1)})) return false;
      if (r < k && !sys.vert.count({at(r, c), at(r + 1, c)})) return false;
    }
  }
  return true;
}

namespace {

// Fills cells in row-major order with backtracking; each cell only depends on
// its left and upper neighbours.
bool fill(const TilingSystem& sys, Word& w, std::size_t pos, std::size_t len) {
  if (pos == len) return w.back() == sys.t_final;
  const OctantCoord c = octant_coords(pos + 1);
  const int k = static_cast<int>(sys.size());
  for (int t = 1; t <= k; ++t) {
    if (pos == 0 && t != sys.t_init) continue;
    if (pos + 1 == len && t != sys.t_final) continue;
    if (c.col > 0 && !sys.horiz.count({w[pos - 1], t})) continue;
    if (c.col < c.row && !sys.vert.count({w[octant_index({c.row - 1, c.col}) - 1], t})) continue;
    w[pos] = t;
    if (fill(sys, w, pos + 1, len)) return true;
  }
  return false;
}

}  // namespace

std::optional<Word> solve_bounded_tiling(const TilingSystem& sys, std::size_t max_len) {
  sys.validate();
  for (std::size_t rows = 1;; ++rows) {
    const std::size_t len = rows * (rows + 1) / 2;
    if (len > max_len) break;
    Word w(len);
    if (fill(sys, w, 0, len)) return w;
  }
  return std::nullopt;
}

}  // namespace trsat
