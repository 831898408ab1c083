#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trsat/arithmetic.hpp"
#include "trsat/fnn.hpp"

namespace trsat {

/// Symbol codes 1..|Sigma|.
using Word = std::vector<int>;

class Alphabet {
 public:
  Alphabet() = default;
  /// Throws ConstructionError on empty or duplicate symbols.
  explicit Alphabet(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  /// 1-based code; throws ParseError for unknown symbols.
  int code(std::string_view symbol) const;
  const std::string& symbol(int code) const;

  /// Parses a comma-separated symbol list.
  Word parse_word(std::string_view text) const;
  std::string format_word(const Word& w) const;
  std::vector<std::string> to_symbols(const Word& w) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int, std::less<>> codes_;
};

/// x_1 = (1,1,1,1,k_1), x_i = (0,1,i,i(i+1)/2,k_i) for i > 1.
struct TudecEmbedding {
  friend bool operator==(const TudecEmbedding&, const TudecEmbedding&) = default;
};

/// emb(a, i) = base[a] + positional[i mod p].
struct AdditivePeriodicEmbedding {
  std::vector<Vec> base;        // indexed by code - 1
  std::vector<Vec> positional;  // p rows
  std::size_t period() const { return positional.size(); }
  friend bool operator==(const AdditivePeriodicEmbedding&, const AdditivePeriodicEmbedding&) = default;
};

using Embedding = std::variant<TudecEmbedding, AdditivePeriodicEmbedding>;

enum class Norm { hardmax, softmax };
std::string_view to_string(Norm n);
Norm parse_norm(std::string_view s);

struct AttentionHead {
  Matrix q;
  Matrix k;
  Fnn score_net;  // 1 -> 1
  Matrix pool_w;
  Norm norm = Norm::hardmax;
};

struct Layer {
  std::vector<AttentionHead> heads;
  Fnn comb;
};

struct TeComplexity {
  std::size_t sigma = 0;
  std::size_t depth = 0;
  std::size_t width = 0;
  std::size_t dim = 0;
  std::optional<std::size_t> period;
  std::optional<int> bits;

  std::size_t value() const { return sigma + depth + width + dim + period.value_or(0) + bits.value_or(0); }
};

class TransformerEncoder {
 public:
  TransformerEncoder() = default;
  /// Validates the dimension chain; throws ConstructionError.
  TransformerEncoder(Alphabet alphabet, Embedding embedding, std::vector<Layer> layers, Fnn out,
                     int softmax_degree = 16);

  const Alphabet& alphabet() const { return alphabet_; }
  const Embedding& embedding() const { return embedding_; }
  const std::vector<Layer>& layers() const { return layers_; }
  const Fnn& out() const { return out_; }
  int softmax_degree() const { return softmax_degree_; }
  /// dims()[i] is the vector dimension after layer i (dims()[0] for the embedding).
  const std::vector<std::size_t>& dims() const { return dims_; }

  bool is_periodic() const { return std::holds_alternative<AdditivePeriodicEmbedding>(embedding_); }
  bool hardmax_only() const;
  TeComplexity complexity(const ArithmeticContext& ctx) const;

 private:
  Alphabet alphabet_;
  Embedding embedding_;
  std::vector<Layer> layers_;
  Fnn out_;
  int softmax_degree_ = 16;
  std::vector<std::size_t> dims_;
};

struct HeadTrace {
  std::vector<Vec> scores;   // [m][j]
  std::vector<Vec> weights;  // [m][j]
};

struct EvalTrace {
  std::vector<std::vector<Vec>> xs;             // xs[i][m]: vector after layer i at position m+1
  std::vector<std::vector<HeadTrace>> heads;    // heads[i][h] for layer i+1
};

struct EvalResult {
  Rational output;
  EvalTrace trace;
};

/// Embedding vectors, exact.
std::vector<Vec> embed(const TransformerEncoder& te, const Word& word);
Vec embed_at(const Embedding& emb, int code, std::size_t position);

/// score_net(<Qx, Ky>).
Rational head_score(const AttentionHead& head, const Vec& x, const Vec& y, const ArithmeticContext& ctx);
/// Scores of position m (1-based) against every position.
Vec head_scores(const AttentionHead& head, const std::vector<Vec>& seq, std::size_t m, const ArithmeticContext& ctx);
/// Weight of position i (1-based) under the normalisation.
Rational normalize(Norm norm, std::size_t i, const Vec& scores, const ArithmeticContext& ctx, int softmax_degree = 16);
/// All weights at once; same values as normalize() per position.
Vec normalize_all(Norm norm, const Vec& scores, const ArithmeticContext& ctx, int softmax_degree = 16);
Vec head_pool(const AttentionHead& head, const std::vector<Vec>& seq, std::size_t m, const ArithmeticContext& ctx,
              int softmax_degree = 16);
/// Pools the given weights over W*seq[j], ascending j.
Vec pool_weighted(const Matrix& w, const std::vector<Vec>& seq, const Vec& weights, const ArithmeticContext& ctx);
/// Argmax set (1-based). Throws PreconditionError on softmax heads.
std::set<std::size_t> attends_to(const AttentionHead& head, const std::vector<Vec>& seq, std::size_t m,
                                 const ArithmeticContext& ctx);

/// Exact truncated Taylor series of exp.
Rational exp_taylor(const Rational& s, int degree);

Vec mat_vec(const Matrix& m, const Vec& x, const ArithmeticContext& ctx);
Rational dot(const Vec& a, const Vec& b, const ArithmeticContext& ctx);

EvalResult evaluate(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx);
/// Output scalar only.
Rational evaluate_output(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx);
/// Output equals exactly 1, or reaches the threshold when one is given.
bool accepts(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx,
             const std::optional<Rational>& threshold = std::nullopt);

}  // namespace trsat
