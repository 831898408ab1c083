#pragma once

#include <cstdint>
#include <set>
#include <utility>

#include "trsat/fnn.hpp"

namespace trsat {

/// |x|.
Fnn gadget_abs();
/// (x1, x2) -> 0 if x1 + 1 - x2 <= 0, that value on (0;1), 1 above.
Fnn gadget_lt();
/// (x1, x2) -> 0 if x1 = x2, |x1 - x2| on (0;1), 1 otherwise.
Fnn gadget_eq();
/// (x1, x2) -> relu(relu(x2) - k relu(x1)); vanishes when x1 = 1 and x2 in [0;k]. Requires k > 0.
Fnn gadget_guard(const Rational& k);
/// x -> gadget_eq(x, t).
Fnn gadget_eq_const(const Rational& t);
/// x -> relu(1 - gadget_eq(x, t)).
Fnn gadget_neq_const(const Rational& t);
/// min(a, b) for a, b >= 0.
Fnn gadget_min();
/// 0 on T, 1 on S \ T. Requires T subset of S.
Fnn gadget_membership(const std::set<std::int64_t>& T, const std::set<std::int64_t>& S);
/// (x1, x2) -> 0 on R, 1 on S^2 \ R. Requires R subset of S x S.
Fnn gadget_relation(const std::set<std::pair<std::int64_t, std::int64_t>>& R, const std::set<std::int64_t>& S);
/// relu(x1 + ... + xk).
Fnn gadget_and(std::size_t k);

}  // namespace trsat
