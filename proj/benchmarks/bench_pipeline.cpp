#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "sentinel/authenticator.hpp"
#include "sentinel/evaluation.hpp"
#include "sentinel/resample.hpp"
#include "sentinel/svm.hpp"
#include "sentinel/syngen.hpp"

using namespace sentinel;

namespace {

Trace bench_trace(double duration_s, std::uint64_t seed) {
  return generate_trace(UserParams{}, "bench", duration_s, 5.0, seed);
}

std::vector<FeatureVector> bench_training_set(std::size_t n_per_class, std::uint64_t seed) {
  const ScenarioSpec spec =
      make_separated_scenario(2, 3.0, static_cast<double>(n_per_class) * 5.0, 5.0, seed);
  const auto population = generate_population(spec);
  std::vector<FeatureVector> pool;
  std::vector<std::string> sources;
  for (FeatureVector& f :
       extract_features(population.at("u1"), ResampleSpec{5.0}, SensorSet::all())) {
    pool.push_back(std::move(f));
    sources.push_back("u1");
  }
  const auto owner = extract_features(population.at("u0"), ResampleSpec{5.0}, SensorSet::all());
  auto set = build_training_set(owner, pool, sources, seed, nullptr, nullptr);
  const Scaler scaler = fit_scaler(set);
  return apply_scaler(scaler, std::move(set));
}

void BM_GenerateTrace(benchmark::State& state) {
  const double duration = static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(bench_trace(duration, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(duration * 5.0));
}
BENCHMARK(BM_GenerateTrace)->Arg(600)->Arg(3600)->Arg(14400);

void BM_Resample(benchmark::State& state) {
  const Trace trace = bench_trace(static_cast<double>(state.range(0)), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(resample(trace, ResampleSpec{5.0}));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(trace.samples.size()));
}
BENCHMARK(BM_Resample)->Arg(3600)->Arg(14400)->Arg(86400);

void BM_Train(benchmark::State& state) {
  const auto set = bench_training_set(static_cast<std::size_t>(state.range(0)), 3);
  SolverConfig config;
  config.epochs = 40;
  config.tolerance = 0.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(train(set, 1e-2, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size()) * 40);
}
BENCHMARK(BM_Train)->Arg(200)->Arg(1000)->Arg(4320)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto set = bench_training_set(500, 4);
  SolverConfig config;
  config.epochs = 40;
  const LinearModel model = train(set, 1e-2, config);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict(model, set[i].values));
    i = (i + 1) % set.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Predict);

void BM_StreamMonitor(benchmark::State& state) {
  const ScenarioSpec spec = make_separated_scenario(3, 6.0, 600.0, 5.0, 5);
  const auto population = generate_population(spec);
  std::map<std::string, Trace> others;
  for (const auto& [id, trace] : population)
    if (id != "u0") others.emplace(id, trace);
  BuildOptions options;
  options.solver.epochs = 40;
  const Profile profile = build_profile(population.at("u0"), others, SensorSet::all(),
                                        ResampleSpec{5.0}, 1e-2, 5, options);
  const Trace& stream = population.at("u0");
  for (auto _ : state) {
    StreamMonitor monitor(profile);
    std::size_t verdicts = 0;
    for (const SensorSample& s : stream.samples)
      if (monitor.push(s)) ++verdicts;
    if (monitor.finish()) ++verdicts;
    benchmark::DoNotOptimize(verdicts);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(stream.samples.size()));
}
BENCHMARK(BM_StreamMonitor);

}  // namespace

BENCHMARK_MAIN();
