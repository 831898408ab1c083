#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <trsat/gadgets.hpp>
#include <trsat/reduction.hpp>
#include <trsat/sat.hpp>

#include "grid.hpp"
#include "oracles.hpp"
#include "random_te.hpp"

using namespace trsat;
using namespace trsat::testing;

namespace {

const ArithmeticContext kExact = ArithmeticContext::exact();

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  bool hard_limit;
  std::function<Verdict()> run;
};

Rational eval1(const Fnn& n, std::vector<Rational> in) { return n.eval(in, kExact).front(); }

// ---------------------------------------------------------------- 1
Verdict gadget_conformance() {
  std::size_t checks = 0, bad = 0;
  auto check = [&](const Rational& got, const Rational& want) {
    ++checks;
    if (got != want) ++bad;
  };
  const Fnn abs = gadget_abs(), lt = gadget_lt(), eq = gadget_eq(), mn = gadget_min();
  for (int a = -8; a <= 8; ++a) {
    check(eval1(abs, {a}), spec_abs(a));
    for (int b = -8; b <= 8; ++b) {
      check(eval1(lt, {a, b}), spec_lt(a, b));
      check(eval1(eq, {a, b}), spec_eq(a, b));
      if (a >= 0 && b >= 0) check(eval1(mn, {a, b}), Rational(std::min(a, b)));
    }
  }
  for (int k = 1; k <= 8; ++k) {
    const Fnn g = gadget_guard(k);
    for (int x1 = 0; x1 <= 1; ++x1) {
      for (int x2 = 0; x2 <= k; ++x2) check(eval1(g, {x1, x2}), spec_guard(x1, x2));
    }
  }
  for (int t = -8; t <= 8; ++t) {
    const Fnn e = gadget_eq_const(t), ne = gadget_neq_const(t);
    for (int x = -8; x <= 8; ++x) {
      check(eval1(e, {x}), Rational(x == t ? 0 : 1));
      check(eval1(ne, {x}), Rational(x == t ? 1 : 0));
    }
  }
  for (std::size_t k = 1; k <= 3; ++k) {
    const Fnn g = gadget_and(k);
    std::vector<int> x(k, -8);
    while (true) {
      int sum = 0;
      std::vector<Rational> in;
      for (int v : x) {
        sum += v;
        in.push_back(v);
      }
      check(g.eval(in, kExact).front(), Rational(std::max(sum, 0)));
      std::size_t i = 0;
      while (i < k && x[i] == 8) x[i++] = -8;
      if (i == k) break;
      ++x[i];
    }
  }
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 5; ++n) {
    std::set<std::int64_t> S;
    for (int i = 1; i <= n; ++i) S.insert(i);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::set<std::int64_t> T;
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1) T.insert(i + 1);
      }
      const Fnn m = gadget_membership(T, S);
      for (auto x : S) check(eval1(m, {x}), Rational(T.count(x) ? 0 : 1));
    }
    // every relation for |S| <= 3, 64 random ones above
    const std::size_t pairs = static_cast<std::size_t>(n * n);
    const bool all = n <= 3;
    const std::uint64_t count = all ? (std::uint64_t{1} << pairs) : 64;
    for (std::uint64_t r = 0; r < count; ++r) {
      const std::uint64_t bits = all ? r : rng();
      std::set<std::pair<std::int64_t, std::int64_t>> R;
      for (std::size_t p = 0; p < pairs; ++p) {
        if (bits >> p & 1) R.insert({static_cast<std::int64_t>(p / n) + 1, static_cast<std::int64_t>(p % n) + 1});
      }
      const Fnn g = gadget_relation(R, S);
      for (auto x : S) {
        for (auto y : S) check(eval1(g, {x, y}), Rational(R.count({x, y}) ? 0 : 1));
      }
    }
  }
  return {bad == 0, std::to_string(checks) + " points, " + std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------- 2
Verdict decode_conformance() {
  const auto [l1, l2] = build_decode_layers();
  const TransformerEncoder te(Alphabet({"a", "b", "c"}), TudecEmbedding{}, {l1, l2},
                              affine({{0, 0, 0, 0, 1}}, {0}, Activation::identity));
  std::size_t checks = 0, bad = 0;
  std::mt19937_64 rng(2);
  for (std::size_t len = 1; len <= 45; ++len) {
    Word w(len);
    for (auto& c : w) c = static_cast<int>(rng() % 3) + 1;
    const auto xs = evaluate(te, w, kExact).trace.xs.back();
    for (std::size_t i = 1; i <= len; ++i) {
      const auto c = octant_coords(i);
      const Vec want = {1, static_cast<std::int64_t>(i), static_cast<std::int64_t>(c.row),
                        static_cast<std::int64_t>(c.col), w[i - 1]};
      ++checks;
      if (xs[i - 1] != want) ++bad;
    }
  }
  return {bad == 0, std::to_string(checks) + " positions over lengths 1..45, " + std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------- 3
Verdict reduction_correctness() {
  const auto grid = tiling_grid();
  std::size_t words = 0, bad = 0, accepted = 0;
  for (const auto& sys : grid) {
    const auto te = compile_unbounded(sys).te;
    for (const auto& w : all_words(static_cast<int>(sys.size()), 10)) {
      const bool got = accepts(te, w, kExact);
      ++words;
      accepted += got;
      if (got != tiling_oracle(sys, w)) ++bad;
    }
  }
  return {bad == 0, std::to_string(grid.size()) + " systems, " + std::to_string(words) + " words (" +
                        std::to_string(accepted) + " accepted), " + std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------- 4
Verdict bounded_reduction() {
  const auto grid = tiling_grid(2);
  std::size_t words = 0, exact_bad = 0, fixed_bad = 0, overlong = 0, overlong_bad = 0;
  std::ostringstream per_n;
  for (std::size_t n = 0; n <= 2; ++n) {
    std::size_t n_bad = 0;
    FixedWidthFormat fmt;
    for (const auto& sys : grid) {
      const auto cr = compile_bounded(sys, n);
      fmt = *cr.recommended_format;
      const auto ctx = ArithmeticContext::fixed(fmt);
      const std::size_t full = (n + 1) * (n + 2) / 2;
      for (const auto& w : all_words(static_cast<int>(sys.size()), 8)) {
        const bool want = tiling_oracle(sys, w, n);
        ++words;
        if (accepts(cr.te, w, kExact) != want) ++exact_bad;
        const bool got = accepts(cr.te, w, ctx);
        if (got != want) {
          ++fixed_bad;
          ++n_bad;
        }
        if (w.size() > full) {
          ++overlong;
          if (got) ++overlong_bad;
        }
      }
    }
    per_n << " n=" << n << "[b=" << fmt.total_bits << ",F=" << fmt.frac_bits << "]:" << n_bad;
  }
  std::ostringstream d;
  d << grid.size() << " systems x n in {0,1,2}, " << words << " words; exact mismatches " << exact_bad
    << "; recommended-format mismatches " << fixed_bad << " (" << per_n.str() << " ); overlong accepted "
    << overlong_bad << "/" << overlong;
  return {exact_bad == 0 && fixed_bad == 0, d.str()};
}

// ---------------------------------------------------------------- 5
Verdict log_precision() {
  const auto grid = tiling_grid();
  std::size_t words = 0, bad = 0;
  for (const auto& sys : grid) {
    const auto te = compile_unbounded(sys).te;
    std::map<std::size_t, ArithmeticContext> ctxs;
    for (const auto& w : all_words(static_cast<int>(sys.size()), 10)) {
      auto it = ctxs.find(w.size());
      if (it == ctxs.end()) {
        it = ctxs.emplace(w.size(), ArithmeticContext::fixed(log_precision_format(sys.size(), w.size(),
                                                                                  Variant::unbounded)))
                 .first;
      }
      ++words;
      if (accepts(te, w, it->second) != accepts(te, w, kExact)) ++bad;
    }
  }
  return {bad == 0, std::to_string(grid.size()) + " systems, " + std::to_string(words) +
                        " words with n = |w|, " + std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------- 6
Verdict btrsat_agreement() {
  const auto grid = tiling_grid(2);
  std::size_t runs = 0, bad = 0, witnesses = 0;
  for (const auto& sys : grid) {
    const auto te = compile_unbounded(sys).te;
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto r = sat_bounded(te, n, kExact);
      const auto s = solve_bounded_tiling(sys, n);
      ++runs;
      if (r.witness.has_value() != s.has_value()) {
        ++bad;
        continue;
      }
      if (r.witness) {
        ++witnesses;
        if (!tiling_oracle(sys, *r.witness) || r.witness->size() > n || *r.witness != *s) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(runs) + " (system, n) pairs, " + std::to_string(witnesses) + " witnesses, " +
                        std::to_string(bad) + " disagreements"};
}

// ---------------------------------------------------------------- 7
Verdict cut_out() {
  std::mt19937_64 rng(7);
  const std::size_t instances = 1000;
  std::size_t sig_cuts = 0, cut_bad = 0, list_bad = 0, reducible = 0, reduce_bad = 0, total_removed = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto inst = random_instance(rng);
    const auto ref = evaluate(inst.te, inst.word, inst.ctx);
    const std::size_t p = std::get<AdditivePeriodicEmbedding>(inst.te.embedding()).period();
    const Word& w = inst.word;

    // pairwise signature comparison over block-aligned prefixes
    std::vector<std::pair<std::size_t, Signature>> sigs;
    for (std::size_t h = p; h < w.size(); h += p) {
      sigs.emplace_back(h, compute_signature(inst.te, Word(w.begin(), w.begin() + h), ref.trace, inst.ctx));
    }
    std::set<std::pair<std::size_t, std::size_t>> equal_pairs;
    for (std::size_t a = 0; a < sigs.size(); ++a) {
      for (std::size_t b = a + 1; b < sigs.size(); ++b) {
        if (sigs[a].second != sigs[b].second) continue;
        equal_pairs.insert({sigs[a].first, sigs[b].first});
        ++sig_cuts;
        const Word cut = apply_cut(w, {sigs[a].first, sigs[b].first});
        if (evaluate_output(inst.te, cut, inst.ctx) != ref.output) ++cut_bad;
      }
    }
    std::set<std::pair<std::size_t, std::size_t>> listed;
    for (const auto& c : signature_cuts(inst.te, w, ref.trace, inst.ctx)) listed.insert({c.from, c.to});
    if (listed != equal_pairs) ++list_bad;

    const Word r = reduce_witness(inst.te, w, inst.ctx, 1000);
    if (!accepts(inst.te, r, inst.ctx) || r.size() > w.size()) ++reduce_bad;
    if (!equal_pairs.empty()) {
      ++reducible;
      if (r.size() >= w.size()) ++reduce_bad;
    }
    total_removed += w.size() - r.size();
  }
  std::ostringstream d;
  d << instances << " instances, " << sig_cuts << " signature-equal cuts (" << cut_bad << " changed the output), "
    << list_bad << " cut-list mismatches, " << reducible << " reducible words (" << reduce_bad
    << " reduce failures), " << total_removed << " symbols removed";
  return {cut_bad == 0 && list_bad == 0 && reduce_bad == 0, d.str()};
}

// ---------------------------------------------------------------- 8
Verdict arithmetic_conformance() {
  std::size_t wrap_checks = 0, bad = 0;
  for (int f = 0; f < 6; ++f) {
    FixedWidthFormat fm;
    fm.total_bits = 6;
    fm.frac_bits = f;
    fm.overflow = Overflow::wrap;
    const auto ctx = ArithmeticContext::fixed(fm);
    const std::int64_t den = std::int64_t{1} << f;
    for (std::int64_t a = fm.min_scaled(); a <= fm.max_scaled(); ++a) {
      for (std::int64_t b = fm.min_scaled(); b <= fm.max_scaled(); ++b) {
        ++wrap_checks;
        if (fm.scaled(ctx.add(Rational(a, den), Rational(b, den))) != modular_add(a, b, 6)) ++bad;
      }
    }
  }
  std::mt19937_64 rng(8);
  const int cases = 100000;
  std::size_t mono_bad = 0, idem_bad = 0;
  for (int i = 0; i < cases; ++i) {
    FixedWidthFormat fm;
    fm.total_bits = 2 + static_cast<int>(rng() % 15);
    fm.frac_bits = static_cast<int>(rng() % fm.total_bits);
    fm.rounding = rng() % 2 ? Rounding::up : Rounding::down;
    const auto ctx = ArithmeticContext::fixed(fm);
    const std::uint64_t span = std::uint64_t{1} << fm.total_bits;
    const std::int64_t den = std::int64_t{1} << fm.frac_bits;
    auto pick = [&] { return Rational(fm.min_scaled() + static_cast<std::int64_t>(rng() % span), den); };
    Rational x = pick(), y = pick();
    const Rational z = pick();
    if (y < x) std::swap(x, y);
    if (!(ctx.add(x, z) <= ctx.add(y, z)) || !(ctx.add(z, x) <= ctx.add(z, y))) ++mono_bad;

    FixedWidthFormat any = fm;
    any.overflow = rng() % 2 ? Overflow::wrap : Overflow::saturate;
    const Rational v(static_cast<std::int64_t>(rng() % 2000001) - 1000000, 1 + static_cast<std::int64_t>(rng() % 9999));
    const Rational q = quantize(v, any);
    if (quantize(q, any) != q || !any.contains(q)) ++idem_bad;
  }
  std::ostringstream d;
  d << wrap_checks << " wrap additions (" << bad << " off the modular oracle), " << cases
    << " monotonicity cases (" << mono_bad << " violations), " << cases << " idempotence cases (" << idem_bad
    << " violations)";
  return {bad == 0 && mono_bad == 0 && idem_bad == 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "gadget conformance", 1, true, gadget_conformance},
      {2, "decode conformance", 10, true, decode_conformance},
      {3, "reduction correctness", 300, false, reduction_correctness},
      {4, "bounded reduction", 0, false, bounded_reduction},
      {5, "log-precision faithfulness", 0, false, log_precision},
      {6, "btrSAT agreement", 0, false, btrsat_agreement},
      {7, "cut-out property", 600, false, cut_out},
      {8, "arithmetic conformance", 0, false, arithmetic_conformance},
  };

  CLI::App app{"Acceptance suite: one line per criterion"};
  std::vector<int> pick;
  app.add_option("-c,--criterion", pick, "Run only these criteria (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  for (const auto& c : all) {
    if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = std::to_string(secs);
    timing = timing.substr(0, timing.find('.') + 3) + "s";
    if (c.budget_seconds > 0) {
      const std::string b = std::to_string(c.budget_seconds);
      const bool over = secs > c.budget_seconds;
      timing += over ? " over " : " within ";
      timing += b.substr(0, b.find('.')) + (c.hard_limit ? "s limit" : "s target");
      if (over && c.hard_limit) o.pass = false;
    }
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail
              << " [" << timing << "]" << std::endl;
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
