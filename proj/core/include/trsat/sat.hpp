#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trsat/encoder.hpp"

namespace trsat {

enum class Outcome { witness, exhausted_bound, exhausted_budget };
std::string_view to_string(Outcome o);

struct SatResult {
  Outcome outcome = Outcome::exhausted_bound;
  std::optional<Word> witness;
  /// Words up to and including the witness in enumeration order, or all
  /// enumerated words when none was found.
  std::uint64_t words_checked = 0;
  double wall_seconds = 0;
  std::optional<double> theoretical_bound_log2;
};

struct SearchOptions {
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 1;
  std::optional<Rational> threshold;
};

/// Exhaustive search over words of length 1..max_len in length-then-
/// lexicographic order (by symbol code). The result is the order-minimal
/// accepted word regardless of the thread count.
SatResult sat_bounded(const TransformerEncoder& te, std::size_t max_len, const ArithmeticContext& ctx,
                      const SearchOptions& opts = {});

/// Same enumeration, restricted to additive-periodic TEs under fixed-width
/// arithmetic; reports 2^(|T|^6) as the theoretical bound.
SatResult sat_unbounded_search(const TransformerEncoder& te, const ArithmeticContext& ctx, std::size_t budget_len,
                               const SearchOptions& opts = {});

/// Normalisation and pooling fingerprint of a prefix against the vectors of a
/// reference trace. For every layer, head and query vector x among the trace
/// vectors of the layer's input dimension, a hardmax head contributes the set
/// of vectors x' scoring at least the prefix maximum, the number of maximal
/// positions (capped at 2^F + 1) and the prefix's pooled sum under each weight
/// 1/m that positions after the prefix could induce. A softmax head
/// contributes the prefix length, so prefixes of different lengths never
/// match through it. Equal signatures at block-aligned lengths h1 < h2 of an
/// accepted word mean the block between them can be cut without changing the
/// output.
struct Signature {
  std::vector<Rational> values;
  std::vector<std::uint64_t> masks;

  friend bool operator==(const Signature&, const Signature&) = default;
  std::size_t hash() const;
};

/// Precomputed score tables for one reference word; signatures of many
/// prefixes share it.
class SignatureTable {
 public:
  SignatureTable(const TransformerEncoder& te, const EvalTrace& ref, const ArithmeticContext& ctx);
  /// Signature of the prefix of the given length (0 allowed).
  Signature prefix(std::size_t length) const;

 private:
  struct HeadTable {
    std::size_t layer = 0;  // index into trace xs feeding the head
    const AttentionHead* head = nullptr;
    std::vector<std::size_t> cands;     // candidate vector ids
    std::vector<Vec> scores;            // [cand x][cand x']
    std::vector<std::size_t> pos_cand;  // position -> index in cands
    std::vector<Vec> pooled_rows;       // W * (trace vector at position)
  };

  const TransformerEncoder& te_;
  const EvalTrace& ref_;
  ArithmeticContext ctx_;
  std::int64_t cap_ = 0;
  std::vector<HeadTable> tables_;
};

/// Checks the preconditions shared by compute_signature, reduce_witness and
/// unbounded search; throws PreconditionError.
void require_periodic_fixed(const TransformerEncoder& te, const ArithmeticContext& ctx);

Signature compute_signature(const TransformerEncoder& te, const Word& prefix, const EvalTrace& ref,
                            const ArithmeticContext& ctx);

struct CutCandidate {
  std::size_t from = 0;  // kept prefix length
  std::size_t to = 0;    // suffix resumes here
};

/// Block-aligned cuts (from < to, both multiples of the period, to < |w|)
/// whose prefixes share a signature, longest first.
std::vector<CutCandidate> signature_cuts(const TransformerEncoder& te, const Word& word, const EvalTrace& ref,
                                         const ArithmeticContext& ctx);

Word apply_cut(const Word& w, const CutCandidate& c);

struct ReduceStats {
  std::size_t iterations = 0;
  std::size_t cuts_tried = 0;
  std::size_t cuts_kept = 0;
};

/// Shortens an accepted word by signature-guided block cuts, keeping a cut
/// only if re-evaluation yields the same output. Throws PreconditionError when
/// the TE is not additive-periodic, ctx is exact, or the word is rejected.
Word reduce_witness(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx,
                    std::size_t budget, ReduceStats* stats = nullptr);

}  // namespace trsat
