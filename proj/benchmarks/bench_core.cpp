#include <benchmark/benchmark.h>

#include <random>

#include "ssdm/ball_programs.hpp"
#include "ssdm/inventory.hpp"
#include "ssdm/lp.hpp"
#include "ssdm/oracle.hpp"

using namespace ssdm;

namespace {

// Random LP over a box with rows tangent to the unit ball, so it is feasible and bounded.
LinearProgram random_lp(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  LinearProgram lp{Vec(n), Mat(m, n), Vec(m, 1.0), Vec(n, -10.0), Vec(n, 10.0)};
  for (auto& v : lp.c) v = nd(gen);
  for (std::size_t i = 0; i < m; ++i) {
    Vec a(n);
    for (auto& v : a) v = nd(gen);
    const double len = norm2(a);
    for (std::size_t j = 0; j < n; ++j) lp.G(i, j) = a[j] / len;
  }
  return lp;
}

Bundle random_bundle(std::size_t n, std::size_t cuts, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Bundle b;
  for (std::size_t r = 0; r < cuts; ++r) {
    Vec a(n);
    for (auto& v : a) v = nd(gen);
    b.add(normalize_separator(a, 0.3 + 0.1 * nd(gen)));
  }
  return b;
}

void BM_SolveLp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LinearProgram lp = random_lp(n, 2 * n, 42);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(lp));
}
BENCHMARK(BM_SolveLp)->Arg(5)->Arg(20)->Arg(60);

void BM_MinMaxOverBall(benchmark::State& state) {
  const std::size_t n = 10;
  const Bundle b = random_bundle(n, static_cast<std::size_t>(state.range(0)), 7);
  const Ball ball{Vec(n, 0.0), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(min_max_over_ball(b, ball));
}
BENCHMARK(BM_MinMaxOverBall)->Arg(5)->Arg(20)->Arg(80);

void BM_ProjectToLevel(benchmark::State& state) {
  const std::size_t n = 10;
  const Bundle b = random_bundle(n, static_cast<std::size_t>(state.range(0)), 9);
  const Ball ball{Vec(n, 0.0), 1.0};
  const double level = 0.5 * min_max_over_ball(b, ball).delta;
  const Vec start(n, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(project_to_level(start, b, level, ball));
}
BENCHMARK(BM_ProjectToLevel)->Arg(5)->Arg(20)->Arg(80);

// One oracle call on the default inventory instance, bands pinned at the initial levels.
void BM_InventoryQuery(benchmark::State& state) {
  const InventoryInstance inst = default_instance();
  const SemiStochasticModel model = build_model(inst);
  const auto L = layout_of(inst);
  Vec y(L.dim(), 0.0);
  for (std::size_t t = 1; t <= L.K; ++t) {
    for (std::size_t i = 0; i < L.d; ++i) {
      y[L.lower(t) + i] = inst.z0[i];
      y[L.upper(t) + i] = inst.z0[i];
    }
    y[L.budget(t)] = inst.budget_hi[t - 1];
  }
  y[L.total()] = inst.total_hi;
  if (!std::holds_alternative<InY>(membership_or_separator(model, y))) {
    state.SkipWithError("decision outside Y");
    return;
  }
  OracleConfig config;
  config.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    OracleState st(3);
    benchmark::DoNotOptimize(query(st, config, model, y));
  }
}
BENCHMARK(BM_InventoryQuery)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
