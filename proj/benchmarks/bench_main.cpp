#include <benchmark/benchmark.h>

#include <trsat/reduction.hpp>
#include <trsat/sat.hpp>

using namespace trsat;

namespace {

TilingSystem two_tile() {
  TilingSystem s;
  s.names = {"a", "b"};
  s.horiz = {{1, 2}, {2, 1}, {2, 2}};
  s.vert = {{1, 2}, {2, 2}, {2, 1}};
  s.t_init = 1;
  s.t_final = 2;
  return s;
}

void rational_small_add_mul(benchmark::State& state) {
  const Rational a(3, 7), b(5, 11), c(-2, 9);
  for (auto _ : state) benchmark::DoNotOptimize(a * b + c);
}
BENCHMARK(rational_small_add_mul);

void rational_big_add_mul(benchmark::State& state) {
  const Rational a = Rational(INT64_MAX) * Rational(INT64_MAX);
  const Rational b(INT64_MAX - 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(a * b + a);
}
BENCHMARK(rational_big_add_mul);

void quantize_fixed(benchmark::State& state) {
  FixedWidthFormat f;
  f.total_bits = 20;
  f.frac_bits = 7;
  const Rational x(123457, 333);
  for (auto _ : state) benchmark::DoNotOptimize(quantize(x, f));
}
BENCHMARK(quantize_fixed);

void evaluate_compiled(benchmark::State& state) {
  const auto te = compile_unbounded(two_tile()).te;
  const Word w(static_cast<std::size_t>(state.range(0)), 2);
  const auto ctx = state.range(1) ? ArithmeticContext::fixed(log_precision_format(2, w.size(), Variant::unbounded))
                                  : ArithmeticContext::exact();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_output(te, w, ctx));
}
BENCHMARK(evaluate_compiled)->ArgsProduct({{6, 10, 21, 45}, {0, 1}});

void sat_bounded_compiled(benchmark::State& state) {
  const auto te = compile_unbounded(two_tile()).te;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sat_bounded(te, static_cast<std::size_t>(state.range(0)), ArithmeticContext::exact()));
  }
}
BENCHMARK(sat_bounded_compiled)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
