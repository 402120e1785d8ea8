#include <benchmark/benchmark.h>

#include "falsify/analysis.hpp"
#include "falsify/rulebook.hpp"
#include "falsify/samplers.hpp"
#include "falsify/scenario.hpp"
#include "falsify/monitor.hpp"

namespace {

using namespace falsify;

Rulebook fig2_right() { return Rulebook::build(5, {{0, 2}, {2, 4}, {1, 3}, {3, 4}}); }

void BM_Dominates(benchmark::State& state) {
  const auto rb = fig2_right();
  const std::vector<double> a{1.0, -2.0, 0.5, 3.0, -1.0};
  const std::vector<double> b{0.5, 1.0, -0.5, 2.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(rb.compare(a, b));
}
BENCHMARK(BM_Dominates);

void BM_MabStep(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  std::vector<Dimension> d;
  for (std::size_t i = 0; i < dims; ++i) d.push_back({"x" + std::to_string(i), 0.0, 1.0});
  const FeatureSpace space(d, 10);
  const auto rb = fig2_right();
  auto sampler = make_sampler({SamplerKind::kMab, 0.1, 7}, space, rb);
  std::uint64_t k = 0;
  for (auto _ : state) {
    auto s = sampler->next_sample();
    FalsificationVector b{{k % 3 == 0, k % 5 == 0, false, k % 7 == 0, false}};
    ObjectiveVector rho{{b.bits[0] ? -1.0 : 1.0, b.bits[1] ? -1.0 : 1.0, 1.0, b.bits[3] ? -1.0 : 1.0, 1.0}};
    sampler->update({std::move(s), rho, b, b.any()});
    ++k;
  }
}
BENCHMARK(BM_MabStep)->Arg(4)->Arg(21);

void BM_HaltonStep(benchmark::State& state) {
  const FeatureSpace space({{"x", 0, 1}, {"y", 0, 1}, {"z", 0, 1}, {"w", 0, 1}}, 10);
  auto sampler = make_sampler({SamplerKind::kHalton, 0.1, 7}, space, Rulebook::disconnected(1));
  for (auto _ : state) {
    auto s = sampler->next_sample();
    sampler->update({std::move(s), ObjectiveVector{{1.0}}, FalsificationVector{{false}}, false});
  }
}
BENCHMARK(BM_HaltonStep);

void BM_Simulate(benchmark::State& state) {
  const std::string id = state.range(0) == 0 ? "1" : "intersection";
  const auto info = scenario_info(id);
  ScenarioConfig c;
  c.id = id;
  const auto space = default_feature_space(info);
  const ScenarioSimulator sim(c, space);
  const auto spec = default_specification(info);
  std::vector<double> mid;
  for (const auto& dim : space.dimensions()) mid.push_back(0.5 * (dim.lo + dim.hi));
  const auto sample = space.make_sample(mid);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(spec, sim.simulate(sample)));
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1);

void BM_ClopperPearson(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(clopper_pearson(37, 400));
}
BENCHMARK(BM_ClopperPearson);

}  // namespace

BENCHMARK_MAIN();
