#pragma once

#include <vector>

#include <trsat/tiling.hpp>

namespace trsat::testing {

// Fixed grid of H/V relation choices: 4 one-tile, 40 two-tile and 6
// three-tile systems.
std::vector<TilingSystem> tiling_grid();

// Grid members with at most max_tiles tiles.
std::vector<TilingSystem> tiling_grid(std::size_t max_tiles);

TilingSystem make_system(std::vector<std::string> names, std::set<TilePair> horiz, std::set<TilePair> vert,
                         int t_init, int t_final);

}  // namespace trsat::testing
