#include <benchmark/benchmark.h>

#include <mehybrid/estimator.hpp>
#include <mehybrid/polybasis.hpp>
#include <mehybrid/problems.hpp>
#include <mehybrid/refine.hpp>

using namespace mehybrid;

namespace {

void BM_GaussLegendre(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre(q));
}
BENCHMARK(BM_GaussLegendre)->Arg(5)->Arg(21)->Arg(64);

void BM_TripleProducts(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(TripleProductTensor(2, N));
}
BENCHMARK(BM_TripleProducts)->Arg(3)->Arg(5)->Arg(7);

void BM_ExpansionEval(benchmark::State& state) {
  const auto exp = step_global_gpc(static_cast<int>(state.range(0)));
  const auto s = sample_uniform(4096, 1, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_expansion(exp, s.point(i)));
    i = (i + 1) % s.size();
  }
}
BENCHMARK(BM_ExpansionEval)->Arg(0)->Arg(7)->Arg(20);

void BM_MultiElementEval(benchmark::State& state) {
  auto model = make_problem("burgers").make_model();
  RefinementConfig rc;
  rc.theta1 = 2.75e-3;
  rc.alpha = 0.8;
  const auto sur = adapt_static(*model, rc, 3, 21).surrogate;
  const auto s = sample_uniform(4096, 1, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sur.evaluate(s.point(i)));
    i = (i + 1) % s.size();
  }
  state.counters["elements"] = static_cast<double>(sur.size());
}
BENCHMARK(BM_MultiElementEval);

void BM_KoExact(benchmark::State& state) {
  double xi = -0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ko_limit_state(xi));
    xi = xi > 0.9 ? -0.9 : xi + 0.01;
  }
}
BENCHMARK(BM_KoExact)->Unit(benchmark::kMicrosecond);

void BM_BurgersExact(benchmark::State& state) {
  double delta = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(burgers_transition(delta, 0.05));
    delta = delta > 0.099 ? 0.0 : delta + 1e-3;
  }
}
BENCHMARK(BM_BurgersExact);

void BM_IterativeHybrid(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto samples = sample_uniform(m, 1, 3);
  const auto sur = MultiElementSurrogate::single(step_global_gpc(7));
  HybridConfig hc;
  hc.delta_m = 1000;
  for (auto _ : state) {
    auto model = make_problem("step").make_model();
    benchmark::DoNotOptimize(me_gha(*model, sur, samples, hc));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m));
}
BENCHMARK(BM_IterativeHybrid)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
