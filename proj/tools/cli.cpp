#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <trsat/errors.hpp>
#include <trsat/json_io.hpp>
#include <trsat/reduction.hpp>
#include <trsat/sat.hpp>
#include <trsat/tiling.hpp>

namespace trsat::cli {

using nlohmann::json;

namespace {

struct ArithFlags {
  bool exact = false;
  std::optional<int> bits;
  std::optional<int> frac;
  std::string overflow = "saturate";
  std::string rounding = "down";
};

class UsageError : public Error {
 public:
  using Error::Error;
};

void add_arith(CLI::App* sub, ArithFlags& f) {
  auto* ex = sub->add_flag("--exact", f.exact, "Exact rational arithmetic (default)");
  auto* b = sub->add_option("--bits", f.bits, "Fixed-width total bits b");
  ex->excludes(b);
  sub->add_option("--frac", f.frac, "Fractional bits F (default 0)")->needs(b);
  sub->add_option("--overflow", f.overflow, "saturate | wrap")->check(CLI::IsMember({"saturate", "wrap"}))->needs(b);
  sub->add_option("--rounding", f.rounding, "down | up")->check(CLI::IsMember({"down", "up"}))->needs(b);
}

ArithmeticContext resolve(const ArithFlags& f) {
  if (!f.bits) return ArithmeticContext::exact();
  FixedWidthFormat fmt;
  fmt.total_bits = *f.bits;
  fmt.frac_bits = f.frac.value_or(0);
  fmt.overflow = parse_overflow(f.overflow);
  fmt.rounding = parse_rounding(f.rounding);
  return ArithmeticContext::fixed(fmt);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw UsageError("cannot write '" + path + "'");
  o << text << '\n';
  if (!o) throw UsageError("failed writing '" + path + "'");
}

// Prefixes library errors with the file they came from.
template <class F>
auto load(const std::string& path, F&& parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TRSAT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw UsageError("TRSAT_THREADS must be a positive integer");
    n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

std::optional<Rational> parse_threshold(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return Rational::parse(s);
}

json complexity_json(const TeComplexity& c) {
  json j = {{"sigma", c.sigma}, {"depth", c.depth}, {"width", c.width}, {"dim", c.dim}, {"value", c.value()}};
  if (c.period) j["period"] = *c.period;
  if (c.bits) j["bits"] = *c.bits;
  return j;
}

}  // namespace

std::string sidecar_path(const std::string& te_path) {
  const std::string ext = ".json";
  if (te_path.size() > ext.size() && te_path.compare(te_path.size() - ext.size(), ext.size(), ext) == 0) {
    return te_path.substr(0, te_path.size() - ext.size()) + ".sidecar.json";
  }
  return te_path + ".sidecar.json";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transformer-encoder satisfiability workbench"};
  app.name("trsat");
  app.require_subcommand(1);

  // compile
  std::string c_tiling, c_out;
  std::optional<std::size_t> c_bounded;
  bool c_strict = false;
  auto* compile = app.add_subcommand("compile", "Compile a tiling system into a transformer encoder");
  compile->add_option("tiling", c_tiling, "Tiling system JSON")->required();
  compile->add_option("-o,--out", c_out, "Output TE JSON path")->required();
  compile->add_option("--bounded", c_bounded, "Bounded variant with final row n");
  compile->add_flag("--strict-decode", c_strict, "Keep the uncorrected first-position decode");

  // eval
  std::string e_te, e_word, e_threshold;
  bool e_trace = false;
  ArithFlags e_arith;
  auto* eval = app.add_subcommand("eval", "Evaluate a TE on a word");
  eval->add_option("te", e_te, "TE JSON")->required();
  eval->add_option("word", e_word, "Comma-separated symbols")->required();
  eval->add_flag("--trace", e_trace, "Include the evaluation trace");
  eval->add_option("--threshold", e_threshold, "Accept when output >= threshold instead of = 1");
  add_arith(eval, e_arith);

  // sat
  std::string s_te, s_threshold;
  std::optional<std::size_t> s_max_len, s_budget;
  bool s_unbounded = false;
  ArithFlags s_arith;
  auto* sat = app.add_subcommand("sat", "Search for an accepted word");
  sat->add_option("te", s_te, "TE JSON")->required();
  auto* ml = sat->add_option("--max-len", s_max_len, "Bounded search up to this length");
  auto* ub = sat->add_flag("--unbounded", s_unbounded, "Budgeted search for periodic fixed-width TEs");
  auto* bu = sat->add_option("--budget", s_budget, "Length budget for --unbounded");
  ml->excludes(ub);
  bu->needs(ub);
  sat->add_option("--threshold", s_threshold, "Accept when output >= threshold instead of = 1");
  add_arith(sat, s_arith);

  // oracle
  std::string o_tiling, o_word;
  bool o_solve = false;
  std::optional<std::size_t> o_max_len;
  auto* oracle = app.add_subcommand("oracle", "Brute-force tiling oracle");
  oracle->add_option("tiling", o_tiling, "Tiling system JSON")->required();
  auto* ow = oracle->add_option("word", o_word, "Comma-separated tiles");
  auto* os = oracle->add_flag("--solve", o_solve, "Search for a valid word");
  oracle->add_option("--max-len", o_max_len, "Length bound for --solve")->needs(os);
  ow->excludes(os);

  // reduce
  std::string r_te, r_word;
  std::size_t r_budget = 1000;
  ArithFlags r_arith;
  auto* reduce = app.add_subcommand("reduce", "Shorten an accepted word by signature-guided cuts");
  reduce->add_option("te", r_te, "TE JSON")->required();
  reduce->add_option("word", r_word, "Comma-separated symbols")->required();
  reduce->add_option("--budget", r_budget, "Maximum number of cut rounds");
  add_arith(reduce, r_arith);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kPositive : kUsage;
  }

  try {
    if (*compile) {
      const TilingSystem sys = load(c_tiling, tiling_from_json);
      const CompiledReduction cr =
          c_bounded ? compile_bounded(sys, *c_bounded, {c_strict}) : compile_unbounded(sys, {c_strict});
      const std::string side = sidecar_path(c_out);
      write_file(c_out, te_to_json(cr.te));
      write_file(side, sidecar_to_json(cr));
      const TeComplexity cx = cr.te.complexity(ArithmeticContext::exact());
      out << json{{"te", c_out}, {"sidecar", side}, {"layers", cr.te.layers().size()},
                  {"complexity", complexity_json(cx)}}
                 .dump()
          << '\n';
      err << "compiled " << sys.size() << "-tile system (" << to_string(cr.variant) << "): " << cx.depth
          << " layers, |T| = " << cx.value() << '\n';
      return kPositive;
    }
    if (*eval) {
      const TransformerEncoder te = load(e_te, te_from_json);
      const ArithmeticContext ctx = resolve(e_arith);
      const Word w = te.alphabet().parse_word(e_word);
      const auto threshold = parse_threshold(e_threshold);
      const EvalResult r = evaluate(te, w, ctx);
      const bool ok = threshold ? r.output >= *threshold : r.output == Rational(1);
      json j = {{"output", r.output.str()}, {"accepted", ok}, {"arithmetic", ctx.describe()}};
      if (e_trace) j["trace"] = json::parse(trace_to_json(r.trace));
      out << j.dump() << '\n';
      err << r.output.str() << (ok ? " ACCEPT" : " REJECT") << '\n';
      return ok ? kPositive : kNegative;
    }
    if (*sat) {
      const TransformerEncoder te = load(s_te, te_from_json);
      const ArithmeticContext ctx = resolve(s_arith);
      SearchOptions opts;
      opts.threads = worker_threads();
      opts.threshold = parse_threshold(s_threshold);
      SatResult r;
      if (s_unbounded) {
        if (ctx.is_exact()) throw UsageError("--unbounded requires fixed-width arithmetic (--bits)");
        if (!s_budget) throw UsageError("--unbounded requires --budget");
        if (!te.is_periodic()) throw UsageError("--unbounded requires an additive periodic embedding");
        r = sat_unbounded_search(te, ctx, *s_budget, opts);
      } else {
        if (!s_max_len) throw UsageError("sat needs --max-len or --unbounded");
        r = sat_bounded(te, *s_max_len, ctx, opts);
      }
      out << sat_result_to_json(r, te.alphabet()) << '\n';
      if (r.witness) {
        err << "witness " << te.alphabet().format_word(*r.witness) << " after " << r.words_checked << " words\n";
      } else {
        err << to_string(r.outcome) << " after " << r.words_checked << " words\n";
      }
      return r.witness ? kPositive : kNegative;
    }
    if (*oracle) {
      const TilingSystem sys = load(o_tiling, tiling_from_json);
      const Alphabet alpha = sys.alphabet();
      if (o_solve) {
        if (!o_max_len) throw UsageError("--solve needs --max-len");
        const auto w = solve_bounded_tiling(sys, *o_max_len);
        out << json{{"witness", w ? json(alpha.to_symbols(*w)) : json(nullptr)}}.dump() << '\n';
        err << (w ? "FOUND " + alpha.format_word(*w) : std::string("NONE")) << '\n';
        return w ? kPositive : kNegative;
      }
      if (o_word.empty()) throw UsageError("oracle needs a word or --solve");
      const Word w = alpha.parse_word(o_word);
      const bool valid = is_valid_encoded_tiling(sys, w);
      out << json{{"valid", valid}, {"encoded_tiling", is_encoded_tiling(w)}}.dump() << '\n';
      err << (valid ? "VALID" : "INVALID") << '\n';
      return valid ? kPositive : kNegative;
    }
    if (*reduce) {
      const TransformerEncoder te = load(r_te, te_from_json);
      const ArithmeticContext ctx = resolve(r_arith);
      if (ctx.is_exact()) throw UsageError("reduce requires fixed-width arithmetic (--bits)");
      if (!te.is_periodic()) throw UsageError("reduce requires an additive periodic embedding");
      const Word w = te.alphabet().parse_word(r_word);
      if (!accepts(te, w, ctx)) throw UsageError("input word is not accepted");
      ReduceStats stats;
      const Word shorter = reduce_witness(te, w, ctx, r_budget, &stats);
      out << json{{"witness", te.alphabet().to_symbols(shorter)},
                  {"length", shorter.size()},
                  {"original_length", w.size()},
                  {"cuts_kept", stats.cuts_kept}}
                 .dump()
          << '\n';
      err << "reduced " << w.size() << " -> " << shorter.size() << ": " << te.alphabet().format_word(shorter) << '\n';
      return kPositive;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("trsat");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace trsat::cli
