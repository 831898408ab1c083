#include "trsat/encoder.hpp"

#include <algorithm>
#include <unordered_map>

#include "trsat/errors.hpp"

namespace trsat {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw ConstructionError("alphabet must be non-empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw ConstructionError("alphabet symbols must be non-empty");
    if (symbols_[i].find(',') != std::string::npos) {
      throw ConstructionError("alphabet symbol '" + symbols_[i] + "' contains a comma");
    }
    if (!codes_.emplace(symbols_[i], static_cast<int>(i + 1)).second) {
      throw ConstructionError("duplicate alphabet symbol '" + symbols_[i] + "'");
    }
  }
}

int Alphabet::code(std::string_view symbol) const {
  auto it = codes_.find(symbol);
  if (it == codes_.end()) throw ParseError("unknown symbol '" + std::string(symbol) + "'");
  return it->second;
}

const std::string& Alphabet::symbol(int code) const {
  if (code < 1 || static_cast<std::size_t>(code) > symbols_.size()) {
    throw PreconditionError("symbol code " + std::to_string(code) + " out of range");
  }
  return symbols_[code - 1];
}

Word Alphabet::parse_word(std::string_view text) const {
  Word w;
  if (text.empty()) throw ParseError("empty word");
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    w.push_back(code(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return w;
}

std::string Alphabet::format_word(const Word& w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ',';
    out += symbol(w[i]);
  }
  return out;
}

std::vector<std::string> Alphabet::to_symbols(const Word& w) const {
  std::vector<std::string> out;
  for (int c : w) out.push_back(symbol(c));
  return out;
}

std::string_view to_string(Norm n) { return n == Norm::hardmax ? "hardmax" : "softmax"; }

Norm parse_norm(std::string_view s) {
  if (s == "hardmax") return Norm::hardmax;
  if (s == "softmax") return Norm::softmax;
  throw ParseError("unknown normalisation '" + std::string(s) + "'");
}

namespace {

std::size_t embedding_dim(const Embedding& emb, std::size_t sigma) {
  if (std::holds_alternative<TudecEmbedding>(emb)) return 5;
  const auto& ap = std::get<AdditivePeriodicEmbedding>(emb);
  if (ap.base.size() != sigma) throw ConstructionError("embedding needs one base vector per symbol");
  if (ap.positional.empty()) throw ConstructionError("embedding period must be at least 1");
  const std::size_t d = ap.base.front().size();
  if (d == 0) throw ConstructionError("embedding dimension must be positive");
  for (const auto& v : ap.base) {
    if (v.size() != d) throw ConstructionError("embedding base vectors differ in dimension");
  }
  for (const auto& v : ap.positional) {
    if (v.size() != d) throw ConstructionError("positional vectors differ in dimension from base vectors");
  }
  return d;
}

void check_matrix(const Matrix& m, std::size_t cols, const std::string& what) {
  if (m.empty()) throw ConstructionError(what + " has no rows");
  for (const auto& row : m) {
    if (row.size() != cols) {
      throw ConstructionError(what + ": expected " + std::to_string(cols) + " columns, got " +
                              std::to_string(row.size()));
    }
  }
}

}  // namespace

TransformerEncoder::TransformerEncoder(Alphabet alphabet, Embedding embedding, std::vector<Layer> layers, Fnn out,
                                       int softmax_degree)
    : alphabet_(std::move(alphabet)),
      embedding_(std::move(embedding)),
      layers_(std::move(layers)),
      out_(std::move(out)),
      softmax_degree_(softmax_degree) {
  if (alphabet_.size() == 0) throw ConstructionError("encoder needs a non-empty alphabet");
  if (softmax_degree_ < 0 || softmax_degree_ % 2 != 0) {
    throw ConstructionError("softmax degree must be a non-negative even number");
  }
  std::size_t d = embedding_dim(embedding_, alphabet_.size());
  dims_.push_back(d);
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const auto& layer = layers_[li];
    const std::string where = "layer " + std::to_string(li + 1);
    std::size_t comb_in = d;
    for (std::size_t hi = 0; hi < layer.heads.size(); ++hi) {
      const auto& h = layer.heads[hi];
      const std::string hw = where + " head " + std::to_string(hi + 1);
      check_matrix(h.q, d, hw + " Q");
      check_matrix(h.k, d, hw + " K");
      if (h.q.size() != h.k.size()) throw ConstructionError(hw + ": Q and K row counts differ");
      if (h.score_net.input_dim() != 1 || h.score_net.output_dim() != 1) {
        throw ConstructionError(hw + ": score net must map 1 -> 1");
      }
      check_matrix(h.pool_w, d, hw + " pooling matrix");
      comb_in += h.pool_w.size();
    }
    if (layer.comb.input_dim() != comb_in) {
      throw ConstructionError(where + ": comb expects " + std::to_string(layer.comb.input_dim()) + " inputs, heads give " +
                              std::to_string(comb_in));
    }
    d = layer.comb.output_dim();
    dims_.push_back(d);
  }
  if (out_.input_dim() != d || out_.output_dim() != 1) {
    throw ConstructionError("output net must map " + std::to_string(d) + " -> 1");
  }
}

bool TransformerEncoder::hardmax_only() const {
  for (const auto& l : layers_) {
    for (const auto& h : l.heads) {
      if (h.norm != Norm::hardmax) return false;
    }
  }
  return true;
}

TeComplexity TransformerEncoder::complexity(const ArithmeticContext& ctx) const {
  TeComplexity c;
  c.sigma = alphabet_.size();
  c.depth = layers_.size();
  for (const auto& l : layers_) {
    c.width = std::max(c.width, l.heads.size());
    for (const auto& h : l.heads) c.dim = std::max(c.dim, h.pool_w.size());
  }
  for (auto d : dims_) c.dim = std::max(c.dim, d);
  if (is_periodic()) c.period = std::get<AdditivePeriodicEmbedding>(embedding_).period();
  if (ctx.is_fixed()) c.bits = ctx.format().total_bits;
  return c;
}

Vec embed_at(const Embedding& emb, int code, std::size_t position) {
  if (std::holds_alternative<TudecEmbedding>(emb)) {
    if (position == 1) return {1, 1, 1, 1, code};
    const auto i = static_cast<std::int64_t>(position);
    return {0, 1, i, i * (i + 1) / 2, code};
  }
  const auto& ap = std::get<AdditivePeriodicEmbedding>(emb);
  const Vec& b = ap.base.at(code - 1);
  const Vec& p = ap.positional[position % ap.period()];
  Vec out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] + p[i];
  return out;
}

std::vector<Vec> embed(const TransformerEncoder& te, const Word& word) {
  if (word.empty()) throw PreconditionError("cannot embed the empty word");
  std::vector<Vec> out;
  out.reserve(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] < 1 || static_cast<std::size_t>(word[i]) > te.alphabet().size()) {
      throw PreconditionError("symbol code " + std::to_string(word[i]) + " not in alphabet");
    }
    out.push_back(embed_at(te.embedding(), word[i], i + 1));
  }
  return out;
}

Rational dot(const Vec& a, const Vec& b, const ArithmeticContext& ctx) {
  Rational acc;
  if (ctx.is_exact()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_zero() && !b[i].is_zero()) acc += a[i] * b[i];
    }
    return acc;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero() || b[i].is_zero()) continue;
    acc = ctx.add(acc, ctx.mul(a[i], b[i]));
  }
  return acc;
}

Vec mat_vec(const Matrix& m, const Vec& x, const ArithmeticContext& ctx) {
  Vec out;
  out.reserve(m.size());
  if (ctx.is_exact()) {
    for (const auto& row : m) out.push_back(dot(row, x, ctx));
    return out;
  }
  for (const auto& row : m) {
    Rational acc;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].is_zero() || x[i].is_zero()) continue;
      acc = ctx.add(acc, ctx.mul(ctx.round(row[i]), x[i]));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

Rational head_score(const AttentionHead& head, const Vec& x, const Vec& y, const ArithmeticContext& ctx) {
  const Rational s = dot(mat_vec(head.q, x, ctx), mat_vec(head.k, y, ctx), ctx);
  return head.score_net.eval(std::span<const Rational>(&s, 1), ctx).front();
}

Vec head_scores(const AttentionHead& head, const std::vector<Vec>& seq, std::size_t m, const ArithmeticContext& ctx) {
  if (m < 1 || m > seq.size()) throw PreconditionError("query position out of range");
  Vec out;
  out.reserve(seq.size());
  for (const auto& y : seq) out.push_back(head_score(head, seq[m - 1], y, ctx));
  return out;
}

Rational exp_taylor(const Rational& s, int degree) {
  Rational sum = 1;
  Rational term = 1;
  for (int k = 1; k <= degree; ++k) {
    term = term * s / Rational(k);
    sum += term;
  }
  return sum;
}

Vec normalize_all(Norm norm, const Vec& scores, const ArithmeticContext& ctx, int softmax_degree) {
  if (scores.empty()) throw PreconditionError("normalisation needs at least one score");
  Vec out(scores.size());
  if (norm == Norm::hardmax) {
    const Rational& best = *std::max_element(scores.begin(), scores.end());
    const auto count = std::count(scores.begin(), scores.end(), best);
    const Rational w = ctx.div(1, Rational(static_cast<std::int64_t>(count)));
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (scores[j] == best) out[j] = w;
    }
    return out;
  }
  std::unordered_map<Rational, Rational> memo;
  Vec e(scores.size());
  Rational total;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    auto it = memo.find(scores[j]);
    if (it == memo.end()) it = memo.emplace(scores[j], exp_taylor(scores[j], softmax_degree)).first;
    e[j] = it->second;
    total += e[j];
  }
  for (std::size_t j = 0; j < scores.size(); ++j) out[j] = ctx.div(e[j], total);
  return out;
}

Rational normalize(Norm norm, std::size_t i, const Vec& scores, const ArithmeticContext& ctx, int softmax_degree) {
  if (i < 1 || i > scores.size()) throw PreconditionError("normalisation position out of range");
  return normalize_all(norm, scores, ctx, softmax_degree)[i - 1];
}

Vec pool_weighted(const Matrix& w, const std::vector<Vec>& seq, const Vec& weights, const ArithmeticContext& ctx) {
  Vec acc(w.size());
  for (std::size_t j = 0; j < seq.size(); ++j) {
    if (weights[j].is_zero()) continue;
    const Vec v = mat_vec(w, seq[j], ctx);
    for (std::size_t r = 0; r < acc.size(); ++r) acc[r] = ctx.add(acc[r], ctx.mul(weights[j], v[r]));
  }
  return acc;
}

Vec head_pool(const AttentionHead& head, const std::vector<Vec>& seq, std::size_t m, const ArithmeticContext& ctx,
              int softmax_degree) {
  const Vec weights = normalize_all(head.norm, head_scores(head, seq, m, ctx), ctx, softmax_degree);
  return pool_weighted(head.pool_w, seq, weights, ctx);
}

std::set<std::size_t> attends_to(const AttentionHead& head, const std::vector<Vec>& seq, std::size_t m,
                                 const ArithmeticContext& ctx) {
  if (head.norm != Norm::hardmax) throw PreconditionError("attends_to is only defined for hardmax heads");
  const Vec scores = head_scores(head, seq, m, ctx);
  const Rational& best = *std::max_element(scores.begin(), scores.end());
  std::set<std::size_t> out;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] == best) out.insert(j + 1);
  }
  return out;
}

namespace {

std::vector<Vec> embed_ctx(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx) {
  std::vector<Vec> xs = embed(te, word);
  if (ctx.is_fixed()) {
    // Additive embeddings are a single addition; the built-in scheme is a
    // table lookup, rounded once.
    if (te.is_periodic()) {
      const auto& ap = std::get<AdditivePeriodicEmbedding>(te.embedding());
      for (std::size_t i = 0; i < word.size(); ++i) {
        const Vec& b = ap.base[word[i] - 1];
        const Vec& p = ap.positional[(i + 1) % ap.period()];
        for (std::size_t c = 0; c < b.size(); ++c) xs[i][c] = ctx.add(ctx.round(b[c]), ctx.round(p[c]));
      }
    } else {
      for (auto& v : xs) {
        for (auto& c : v) c = ctx.round(c);
      }
    }
  }
  return xs;
}

Rational run(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx, EvalTrace* trace) {
  std::vector<Vec> xs = embed_ctx(te, word, ctx);
  const std::size_t n = xs.size();
  if (trace) {
    trace->xs.clear();
    trace->heads.clear();
    trace->xs.push_back(xs);
  }
  std::unordered_map<Rational, Rational> score_memo;
  for (const auto& layer : te.layers()) {
    std::vector<Vec> comb_in = xs;
    std::vector<HeadTrace> head_traces;
    for (const auto& head : layer.heads) {
      std::vector<Vec> qx(n), kx(n), wx(n);
      for (std::size_t j = 0; j < n; ++j) {
        qx[j] = mat_vec(head.q, xs[j], ctx);
        kx[j] = mat_vec(head.k, xs[j], ctx);
        wx[j] = mat_vec(head.pool_w, xs[j], ctx);
      }
      score_memo.clear();
      HeadTrace ht;
      Vec scores(n);
      for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t j = 0; j < n; ++j) {
          const Rational s = dot(qx[m], kx[j], ctx);
          auto it = score_memo.find(s);
          if (it == score_memo.end()) {
            it = score_memo.emplace(s, head.score_net.eval(std::span<const Rational>(&s, 1), ctx).front()).first;
          }
          scores[j] = it->second;
        }
        const Vec weights = normalize_all(head.norm, scores, ctx, te.softmax_degree());
        Vec y(head.pool_w.size());
        for (std::size_t j = 0; j < n; ++j) {
          if (weights[j].is_zero()) continue;
          for (std::size_t r = 0; r < y.size(); ++r) y[r] = ctx.add(y[r], ctx.mul(weights[j], wx[j][r]));
        }
        comb_in[m].insert(comb_in[m].end(), y.begin(), y.end());
        if (trace) {
          ht.scores.push_back(scores);
          ht.weights.push_back(weights);
        }
      }
      if (trace) head_traces.push_back(std::move(ht));
    }
    for (std::size_t m = 0; m < n; ++m) xs[m] = layer.comb.eval(comb_in[m], ctx);
    if (trace) {
      trace->xs.push_back(xs);
      trace->heads.push_back(std::move(head_traces));
    }
  }
  return te.out().eval(xs.back(), ctx).front();
}

}  // namespace

EvalResult evaluate(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx) {
  EvalResult r;
  r.output = run(te, word, ctx, &r.trace);
  return r;
}

Rational evaluate_output(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx) {
  return run(te, word, ctx, nullptr);
}

bool accepts(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx,
             const std::optional<Rational>& threshold) {
  const Rational out = evaluate_output(te, word, ctx);
  return threshold ? out >= *threshold : out == Rational(1);
}

}  // namespace trsat
