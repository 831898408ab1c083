#include "trsat/json_io.hpp"

#include <json.hpp>

#include "trsat/errors.hpp"

namespace trsat {

using nlohmann::json;

namespace {

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

// Wraps type/key errors from nlohmann into ParseError.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

json rat(const Rational& r) { return r.str(); }

Rational rat_from(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw ParseError("expected a rational string \"p/q\", got " + j.dump());
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(rat(x));
  return a;
}

Vec vec_from(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array of rationals, got " + j.dump());
  Vec v;
  for (const auto& x : j) v.push_back(rat_from(x));
  return v;
}

json mat_json(const Matrix& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(vec_json(row));
  return a;
}

Matrix mat_from(const json& j) {
  if (!j.is_array()) throw ParseError("expected a matrix, got " + j.dump());
  Matrix m;
  for (const auto& row : j) m.push_back(vec_from(row));
  return m;
}

json format_json(const FixedWidthFormat& f) {
  return {{"total_bits", f.total_bits},
          {"frac_bits", f.frac_bits},
          {"overflow", std::string(to_string(f.overflow))},
          {"rounding", std::string(to_string(f.rounding))}};
}

FixedWidthFormat format_from(const json& j) {
  return guarded("format", [&] {
    FixedWidthFormat f;
    f.total_bits = j.at("total_bits").get<int>();
    f.frac_bits = j.at("frac_bits").get<int>();
    f.overflow = parse_overflow(j.at("overflow").get<std::string>());
    f.rounding = parse_rounding(j.at("rounding").get<std::string>());
    f.validate();
    return f;
  });
}

json fnn_json(const Fnn& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({{"weights", mat_json(l.weights)},
                      {"bias", vec_json(l.bias)},
                      {"activation", l.activation == Activation::relu ? "relu" : "identity"}});
  }
  return {{"input_dim", net.input_dim()}, {"layers", layers}};
}

Fnn fnn_from(const json& j) {
  return guarded("fnn", [&] {
    const auto in = j.at("input_dim").get<std::size_t>();
    std::vector<FnnLayer> layers;
    for (const auto& l : j.at("layers")) {
      FnnLayer fl;
      fl.weights = mat_from(l.at("weights"));
      fl.bias = vec_from(l.at("bias"));
      const auto act = l.at("activation").get<std::string>();
      if (act == "relu") {
        fl.activation = Activation::relu;
      } else if (act == "identity") {
        fl.activation = Activation::identity;
      } else {
        throw ParseError("unknown activation '" + act + "'");
      }
      layers.push_back(std::move(fl));
    }
    return Fnn(in, std::move(layers));
  });
}

json embedding_json(const Embedding& emb, const Alphabet& alpha) {
  if (std::holds_alternative<TudecEmbedding>(emb)) return {{"type", "tudec"}};
  const auto& ap = std::get<AdditivePeriodicEmbedding>(emb);
  json base = json::object();
  for (std::size_t i = 0; i < ap.base.size(); ++i) base[alpha.symbols()[i]] = vec_json(ap.base[i]);
  return {{"type", "additive_periodic"}, {"base", base}, {"positional", mat_json(ap.positional)}};
}

Embedding embedding_from(const json& j, const Alphabet& alpha) {
  const auto type = j.at("type").get<std::string>();
  if (type == "tudec") return TudecEmbedding{};
  if (type != "additive_periodic") throw ParseError("unknown embedding type '" + type + "'");
  AdditivePeriodicEmbedding ap;
  const auto& base = j.at("base");
  if (!base.is_object()) throw ParseError("embedding base must map symbols to vectors");
  ap.base.resize(alpha.size());
  std::vector<bool> seen(alpha.size(), false);
  for (auto it = base.begin(); it != base.end(); ++it) {
    const int code = alpha.code(it.key());
    ap.base[code - 1] = vec_from(it.value());
    seen[code - 1] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ParseError("embedding base missing symbol '" + alpha.symbols()[i] + "'");
  }
  ap.positional = mat_from(j.at("positional"));
  return ap;
}

}  // namespace

std::string format_to_json(const FixedWidthFormat& f) { return format_json(f).dump(); }
FixedWidthFormat format_from_json(std::string_view text) { return format_from(parse_text(text)); }

std::string fnn_to_json(const Fnn& net) { return fnn_json(net).dump(); }
Fnn fnn_from_json(std::string_view text) { return fnn_from(parse_text(text)); }

std::string te_to_json(const TransformerEncoder& te, int indent) {
  json layers = json::array();
  for (const auto& l : te.layers()) {
    json heads = json::array();
    for (const auto& h : l.heads) {
      heads.push_back({{"q", mat_json(h.q)},
                       {"k", mat_json(h.k)},
                       {"score_net", fnn_json(h.score_net)},
                       {"pool_w", mat_json(h.pool_w)},
                       {"norm", std::string(to_string(h.norm))}});
    }
    layers.push_back({{"heads", heads}, {"comb", fnn_json(l.comb)}});
  }
  json j = {{"alphabet", te.alphabet().symbols()},
            {"embedding", embedding_json(te.embedding(), te.alphabet())},
            {"layers", layers},
            {"out", fnn_json(te.out())}};
  if (te.softmax_degree() != 16) j["softmax_degree"] = te.softmax_degree();
  return j.dump(indent);
}

TransformerEncoder te_from_json(std::string_view text) {
  const json j = parse_text(text);
  return guarded("encoder", [&] {
    Alphabet alpha(j.at("alphabet").get<std::vector<std::string>>());
    Embedding emb = embedding_from(j.at("embedding"), alpha);
    std::vector<Layer> layers;
    for (const auto& l : j.at("layers")) {
      Layer layer;
      for (const auto& h : l.at("heads")) {
        AttentionHead head;
        head.q = mat_from(h.at("q"));
        head.k = mat_from(h.at("k"));
        head.score_net = fnn_from(h.at("score_net"));
        head.pool_w = mat_from(h.at("pool_w"));
        head.norm = parse_norm(h.at("norm").get<std::string>());
        layer.heads.push_back(std::move(head));
      }
      layer.comb = fnn_from(l.at("comb"));
      layers.push_back(std::move(layer));
    }
    const int degree = j.value("softmax_degree", 16);
    return TransformerEncoder(std::move(alpha), std::move(emb), std::move(layers), fnn_from(j.at("out")), degree);
  });
}

std::string tiling_to_json(const TilingSystem& sys) {
  auto pairs = [&](const std::set<TilePair>& rel) {
    json a = json::array();
    for (const auto& [x, y] : rel) a.push_back({sys.names[x - 1], sys.names[y - 1]});
    return a;
  };
  json j = {{"tiles", sys.names},
            {"horiz", pairs(sys.horiz)},
            {"vert", pairs(sys.vert)},
            {"t_init", sys.names[sys.t_init - 1]},
            {"t_final", sys.names[sys.t_final - 1]}};
  return j.dump();
}

TilingSystem tiling_from_json(std::string_view text) {
  const json j = parse_text(text);
  return guarded("tiling system", [&] {
    TilingSystem sys;
    sys.names = j.at("tiles").get<std::vector<std::string>>();
    const Alphabet alpha(sys.names);
    auto pairs = [&](const json& a) {
      std::set<TilePair> rel;
      for (const auto& p : a) {
        if (!p.is_array() || p.size() != 2) throw ParseError("relation entries must be pairs, got " + p.dump());
        rel.insert({alpha.code(p[0].get<std::string>()), alpha.code(p[1].get<std::string>())});
      }
      return rel;
    };
    sys.horiz = pairs(j.at("horiz"));
    sys.vert = pairs(j.at("vert"));
    sys.t_init = alpha.code(j.at("t_init").get<std::string>());
    sys.t_final = alpha.code(j.at("t_final").get<std::string>());
    sys.validate();
    return sys;
  });
}

std::string sidecar_to_json(const CompiledReduction& r) {
  json j = {{"variant", std::string(to_string(r.variant))}};
  j["n"] = r.n ? json(*r.n) : json(nullptr);
  j["recommended_format"] = r.recommended_format ? format_json(*r.recommended_format) : json(nullptr);
  return j.dump();
}

std::string trace_to_json(const EvalTrace& trace) {
  json xs = json::array();
  for (const auto& layer : trace.xs) xs.push_back(mat_json(layer));
  json heads = json::array();
  for (const auto& layer : trace.heads) {
    json hs = json::array();
    for (const auto& h : layer) hs.push_back({{"scores", mat_json(h.scores)}, {"weights", mat_json(h.weights)}});
    heads.push_back(hs);
  }
  return json{{"xs", xs}, {"heads", heads}}.dump();
}

std::string sat_result_to_json(const SatResult& r, const Alphabet& alphabet) {
  json j = {{"outcome", std::string(to_string(r.outcome))}, {"words_checked", r.words_checked}};
  j["witness"] = r.witness ? json(alphabet.to_symbols(*r.witness)) : json(nullptr);
  j["theoretical_bound_log2"] = r.theoretical_bound_log2 ? json(*r.theoretical_bound_log2) : json(nullptr);
  j["wall_seconds"] = r.wall_seconds;
  return j.dump();
}

}  // namespace trsat
