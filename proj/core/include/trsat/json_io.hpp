#pragma once

#include <string>
#include <string_view>

#include "trsat/encoder.hpp"
#include "trsat/reduction.hpp"
#include "trsat/sat.hpp"
#include "trsat/tiling.hpp"

namespace trsat {

// All readers throw ParseError (with line/column for syntax errors) or
// ConstructionError for well-formed but inconsistent objects.

std::string format_to_json(const FixedWidthFormat& f);
FixedWidthFormat format_from_json(std::string_view text);

std::string fnn_to_json(const Fnn& net);
Fnn fnn_from_json(std::string_view text);

std::string te_to_json(const TransformerEncoder& te, int indent = -1);
TransformerEncoder te_from_json(std::string_view text);

std::string tiling_to_json(const TilingSystem& sys);
TilingSystem tiling_from_json(std::string_view text);

/// {"variant": ..., "n": int|null, "recommended_format": {...}|null}
std::string sidecar_to_json(const CompiledReduction& r);

std::string trace_to_json(const EvalTrace& trace);

std::string sat_result_to_json(const SatResult& r, const Alphabet& alphabet);

}  // namespace trsat
