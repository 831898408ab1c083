#include "trsat/sat.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "trsat/errors.hpp"

namespace trsat {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::witness:
      return "witness";
    case Outcome::exhausted_bound:
      return "exhausted_bound";
    case Outcome::exhausted_budget:
      return "exhausted_budget";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

unsigned resolve_threads(unsigned t) {
  if (t == 0) t = std::thread::hardware_concurrency();
  return std::max(1u, t);
}

void word_at(std::uint64_t index, std::size_t len, std::size_t sigma, Word& w) {
  w.assign(len, 1);
  for (std::size_t i = len; i-- > 0;) {
    w[i] = static_cast<int>(index % sigma) + 1;
    index /= sigma;
  }
}

void next_word(Word& w, std::size_t sigma) {
  for (std::size_t i = w.size(); i-- > 0;) {
    if (static_cast<std::size_t>(w[i]) < sigma) {
      ++w[i];
      return;
    }
    w[i] = 1;
  }
}

// Returns the smallest accepted index in [0, total) or total.
std::uint64_t search_length(const TransformerEncoder& te, std::size_t len, std::uint64_t total,
                            const ArithmeticContext& ctx, const SearchOptions& opts, unsigned threads) {
  const std::size_t sigma = te.alphabet().size();
  constexpr std::uint64_t kChunk = 256;
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> best{total};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    try {
      Word w;
      while (true) {
        const std::uint64_t start = next_chunk.fetch_add(kChunk);
        if (start >= total || start >= best.load()) return;
        const std::uint64_t end = std::min(total, start + kChunk);
        word_at(start, len, sigma, w);
        for (std::uint64_t i = start; i < end; ++i) {
          if (i >= best.load()) return;
          if (accepts(te, w, ctx, opts.threshold)) {
            std::uint64_t cur = best.load();
            while (i < cur && !best.compare_exchange_weak(cur, i)) {
            }
            return;
          }
          next_word(w, sigma);
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
      best.store(0);
    }
  };

  if (threads <= 1 || total <= kChunk) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return best.load();
}

SatResult enumerate(const TransformerEncoder& te, std::size_t max_len, const ArithmeticContext& ctx,
                    const SearchOptions& opts, Outcome none) {
  if (max_len == 0) throw PreconditionError("search bound must be at least 1");
  const auto t0 = Clock::now();
  const unsigned threads = resolve_threads(opts.threads);
  const std::size_t sigma = te.alphabet().size();
  SatResult r;
  r.outcome = none;
  std::uint64_t total = 1;
  for (std::size_t len = 1; len <= max_len; ++len) {
    if (total > std::numeric_limits<std::uint64_t>::max() / sigma) {
      throw PreconditionError("search space too large to enumerate");
    }
    total *= sigma;
    const std::uint64_t found = search_length(te, len, total, ctx, opts, threads);
    if (found < total) {
      Word w;
      word_at(found, len, sigma, w);
      if (!accepts(te, w, ctx, opts.threshold)) throw EvalError("witness failed re-verification");
      r.outcome = Outcome::witness;
      r.witness = std::move(w);
      r.words_checked += found + 1;
      break;
    }
    r.words_checked += total;
  }
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

}  // namespace

SatResult sat_bounded(const TransformerEncoder& te, std::size_t max_len, const ArithmeticContext& ctx,
                      const SearchOptions& opts) {
  return enumerate(te, max_len, ctx, opts, Outcome::exhausted_bound);
}

void require_periodic_fixed(const TransformerEncoder& te, const ArithmeticContext& ctx) {
  if (!te.is_periodic()) throw PreconditionError("encoder must use an additive periodic embedding");
  if (!ctx.is_fixed()) throw PreconditionError("a fixed-width arithmetic context is required");
}

SatResult sat_unbounded_search(const TransformerEncoder& te, const ArithmeticContext& ctx, std::size_t budget_len,
                               const SearchOptions& opts) {
  require_periodic_fixed(te, ctx);
  SatResult r = enumerate(te, budget_len, ctx, opts, Outcome::exhausted_budget);
  r.theoretical_bound_log2 = std::pow(static_cast<double>(te.complexity(ctx).value()), 6.0);
  return r;
}

std::size_t Signature::hash() const {
  std::size_t h = values.size() * 0x9E3779B97F4A7C15ULL;
  for (const auto& v : values) h = (h ^ v.hash()) * 0x100000001B3ULL;
  for (auto m : masks) h = (h ^ m) * 0x100000001B3ULL;
  return h;
}

SignatureTable::SignatureTable(const TransformerEncoder& te, const EvalTrace& ref, const ArithmeticContext& ctx)
    : te_(te), ref_(ref), ctx_(ctx) {
  require_periodic_fixed(te, ctx);
  // Beyond 2^F + 1 maxima, 1/m quantizes to the same value for every m.
  cap_ = (std::int64_t{1} << ctx.format().frac_bits) + 1;
  if (ref.xs.size() != te.layers().size() + 1) throw PreconditionError("reference trace does not match the encoder");
  for (std::size_t li = 0; li < te.layers().size(); ++li) {
    const std::size_t d = te.dims()[li];
    // Candidate vectors: every distinct trace vector of the head's input dimension.
    std::map<Vec, std::size_t> ids;
    std::vector<const Vec*> cand_vecs;
    for (const auto& layer_xs : ref.xs) {
      for (const auto& v : layer_xs) {
        if (v.size() != d) continue;
        if (ids.emplace(v, cand_vecs.size()).second) cand_vecs.push_back(&ids.find(v)->first);
      }
    }
    for (const auto& head : te.layers()[li].heads) {
      HeadTable t;
      t.layer = li;
      t.head = &head;
      const std::size_t c = cand_vecs.size();
      std::vector<Vec> qx(c), kx(c);
      for (std::size_t a = 0; a < c; ++a) {
        qx[a] = mat_vec(head.q, *cand_vecs[a], ctx);
        kx[a] = mat_vec(head.k, *cand_vecs[a], ctx);
      }
      std::unordered_map<Rational, Rational> memo;
      t.scores.assign(c, Vec(c));
      for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = 0; b < c; ++b) {
          const Rational s = dot(qx[a], kx[b], ctx);
          auto it = memo.find(s);
          if (it == memo.end()) {
            it = memo.emplace(s, head.score_net.eval(std::span<const Rational>(&s, 1), ctx).front()).first;
          }
          t.scores[a][b] = it->second;
        }
      }
      t.cands.resize(c);
      for (std::size_t a = 0; a < c; ++a) t.cands[a] = a;
      for (const auto& v : ref.xs[li]) {
        t.pos_cand.push_back(ids.at(v));
        t.pooled_rows.push_back(mat_vec(head.pool_w, v, ctx));
      }
      tables_.push_back(std::move(t));
    }
  }
}

Signature SignatureTable::prefix(std::size_t length) const {
  Signature sig;
  for (const auto& t : tables_) {
    if (length > t.pos_cand.size()) throw PreconditionError("prefix longer than the reference word");
    const std::size_t c = t.cands.size();
    const std::size_t dw = t.head->pool_w.size();
    const std::size_t mask_words = (c + 63) / 64;
    for (std::size_t a = 0; a < c; ++a) {
      const Vec& row = t.scores[a];
      Vec pooled(dw);
      if (length == 0) {
        sig.values.emplace_back();
        sig.masks.insert(sig.masks.end(), mask_words, 0);
        sig.values.insert(sig.values.end(), pooled.begin(), pooled.end());
        continue;
      }
      if (t.head->norm == Norm::hardmax) {
        Rational best = row[t.pos_cand[0]];
        std::int64_t count = 0;
        for (std::size_t m = 0; m < length; ++m) {
          const Rational& s = row[t.pos_cand[m]];
          if (s > best) {
            best = s;
            count = 1;
          } else if (s == best) {
            ++count;
          }
        }
        // The mask fixes the maximal score level.
        std::vector<std::uint64_t> mask(mask_words, 0);
        for (std::size_t b = 0; b < c; ++b) {
          if (row[b] >= best) mask[b / 64] |= std::uint64_t{1} << (b % 64);
        }
        sig.masks.insert(sig.masks.end(), mask.begin(), mask.end());
        // Suffix maxima at the same level raise the count to m >= count, so
        // record the prefix's pooled sum under every weight 1/m can take.
        const std::int64_t first = std::min(count, cap_);
        sig.masks.push_back(static_cast<std::uint64_t>(first));
        for (std::int64_t m0 = first; m0 <= cap_;) {
          const Rational w = ctx_.div(1, Rational(m0));
          std::int64_t lo = m0, hi = cap_;
          if (m0 > 1) {
            while (lo < hi) {
              const std::int64_t mid = lo + (hi - lo + 1) / 2;
              if (ctx_.div(1, Rational(mid)) == w) lo = mid; else hi = mid - 1;
            }
          }
          std::fill(pooled.begin(), pooled.end(), Rational());
          if (!w.is_zero()) {
            for (std::size_t m = 0; m < length; ++m) {
              if (row[t.pos_cand[m]] != best) continue;
              for (std::size_t r = 0; r < dw; ++r) pooled[r] = ctx_.add(pooled[r], ctx_.mul(w, t.pooled_rows[m][r]));
            }
          }
          sig.values.push_back(w);
          sig.values.insert(sig.values.end(), pooled.begin(), pooled.end());
          m0 = lo + 1;
        }
      } else {
        // Softmax weights divide by the suffix's exp-sum as well, which a
        // prefix cannot summarise: the length makes such prefixes distinct.
        sig.masks.push_back(length);
        const int deg = te_.softmax_degree();
        Rational total;
        for (std::size_t m = 0; m < length; ++m) total += exp_taylor(row[t.pos_cand[m]], deg);
        sig.values.push_back(total);
      }
    }
  }
  return sig;
}

Signature compute_signature(const TransformerEncoder& te, const Word& prefix, const EvalTrace& ref,
                            const ArithmeticContext& ctx) {
  require_periodic_fixed(te, ctx);
  if (ref.xs.empty() || prefix.size() > ref.xs.front().size()) {
    throw PreconditionError("prefix longer than the reference word");
  }
  return SignatureTable(te, ref, ctx).prefix(prefix.size());
}

std::vector<CutCandidate> signature_cuts(const TransformerEncoder& te, const Word& word, const EvalTrace& ref,
                                         const ArithmeticContext& ctx) {
  require_periodic_fixed(te, ctx);
  const std::size_t p = std::get<AdditivePeriodicEmbedding>(te.embedding()).period();
  SignatureTable table(te, ref, ctx);
  std::vector<std::pair<Signature, std::size_t>> sigs;
  for (std::size_t len = p; len < word.size(); len += p) sigs.emplace_back(table.prefix(len), len);
  std::vector<CutCandidate> cuts;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    for (std::size_t j = i + 1; j < sigs.size(); ++j) {
      if (sigs[i].first == sigs[j].first) cuts.push_back({sigs[i].second, sigs[j].second});
    }
  }
  std::stable_sort(cuts.begin(), cuts.end(), [](const CutCandidate& a, const CutCandidate& b) {
    return (a.to - a.from) > (b.to - b.from);
  });
  return cuts;
}

Word apply_cut(const Word& w, const CutCandidate& c) {
  if (c.from > c.to || c.to > w.size()) throw PreconditionError("cut out of range");
  Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(c.from));
  out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(c.to), w.end());
  return out;
}

Word reduce_witness(const TransformerEncoder& te, const Word& word, const ArithmeticContext& ctx, std::size_t budget,
                    ReduceStats* stats) {
  require_periodic_fixed(te, ctx);
  EvalResult ref = evaluate(te, word, ctx);
  if (ref.output != Rational(1)) throw PreconditionError("word is not accepted");
  ReduceStats local;
  Word cur = word;
  while (local.iterations < budget) {
    ++local.iterations;
    bool cut = false;
    for (const auto& c : signature_cuts(te, cur, ref.trace, ctx)) {
      ++local.cuts_tried;
      Word candidate = apply_cut(cur, c);
      EvalResult r = evaluate(te, candidate, ctx);
      if (r.output == ref.output) {
        cur = std::move(candidate);
        ref = std::move(r);
        ++local.cuts_kept;
        cut = true;
        break;
      }
    }
    if (!cut) break;
  }
  if (stats) *stats = local;
  return cur;
}

}  // namespace trsat
