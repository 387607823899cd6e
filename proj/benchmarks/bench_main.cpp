#include <benchmark/benchmark.h>

#include "choquard/constants.hpp"
#include "choquard/riesz.hpp"
#include "choquard/shooting.hpp"
#include "choquard/solver.hpp"
#include "choquard/testfn.hpp"

#include <cmath>

using namespace choquard;

// Kernel table build plus one product, n intervals.
static void BM_RieszConvolveCold(benchmark::State& s) {
  const auto g = make_grid(3, 30.0, static_cast<int>(s.range(0)), 2.0);
  const auto f = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  for (auto _ : s) {
    riesz::clear_kernel_cache();
    benchmark::DoNotOptimize(riesz::convolve(*g, f, 1.0));
  }
}
BENCHMARK(BM_RieszConvolveCold)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

// Cached table: the dense product only.
static void BM_RieszConvolveWarm(benchmark::State& s) {
  const auto g = make_grid(3, 30.0, static_cast<int>(s.range(0)), 2.0);
  const auto f = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  riesz::convolve(*g, f, 1.0);
  for (auto _ : s) benchmark::DoNotOptimize(riesz::convolve(*g, f, 1.0));
}
BENCHMARK(BM_RieszConvolveWarm)->Arg(250)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_Shooting(benchmark::State& s) {
  const double q = s.range(0) / 2.0;
  for (auto _ : s) benchmark::DoNotOptimize(shoot_local_ground_state(3, q));
}
BENCHMARK(BM_Shooting)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_GroundState(benchmark::State& s) {
  const auto g = make_grid(3, 40.0, static_cast<int>(s.range(0)), 2.0);
  const auto prm = ProblemParams::lambda_problem(3, 2.0, 2.0, 4.0, 10.0);
  for (auto _ : s) benchmark::DoNotOptimize(ground_state(prm, g));
}
BENCHMARK(BM_GroundState)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_BubbleMassRadius(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(mass_radius(3, 10.0, 0.01));
}
BENCHMARK(BM_BubbleMassRadius)->Unit(benchmark::kMicrosecond);

static void BM_SobolevQuotient(benchmark::State& s) {
  const auto g = make_grid(3, 4000.0, 3000, 3.0);
  const auto w = talenti_field(g);
  for (auto _ : s) benchmark::DoNotOptimize(sobolev_quotient(w));
}
BENCHMARK(BM_SobolevQuotient)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
