#include <benchmark/benchmark.h>

#include <complex>

#include "mimocap/cf.hpp"
#include "mimocap/cumulants.hpp"
#include "mimocap/distribution.hpp"
#include "mimocap/montecarlo.hpp"

using namespace mimocap;

namespace {

CorrelationPair exponential_pair(const ChannelConfig& c, double rho_t, double rho_r) {
    const ComplexMatrix pt =
        make_exponential_correlation(c.n_t, rho_t).cast<std::complex<double>>();
    const ComplexMatrix pr =
        make_exponential_correlation(c.n_r, rho_r).cast<std::complex<double>>();
    return CorrelationPair::validate_and_decompose(pt, pr, c);
}

void bm_cf_evaluate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ChannelConfig c = ChannelConfig::make(n, n, 15.0);
    const CapacityCF cf = build_correlated_cf(c, exponential_pair(c, 0.5, 0.7));
    double w = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cf.evaluate(w));
        w += 0.37;
        if (w > 50.0) w = 0.1;
    }
}
BENCHMARK(bm_cf_evaluate)->Arg(2)->Arg(4)->Arg(5);

void bm_cf_evaluate_large_omega(benchmark::State& state) {
    const ChannelConfig c = ChannelConfig::make(3, 3, 15.0);
    const CapacityCF cf = build_correlated_cf(c, exponential_pair(c, 0.5, 0.7));
    double w = 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cf.evaluate(w));
        w += 13.7;
        if (w > 2000.0) w = 100.0;
    }
}
BENCHMARK(bm_cf_evaluate_large_omega);

void bm_cumulants(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ChannelConfig c = ChannelConfig::make(n, n, 15.0);
    const auto pair = exponential_pair(c, 0.5, 0.7);
    for (auto _ : state) benchmark::DoNotOptimize(cumulants_correlated(c, pair));
}
BENCHMARK(bm_cumulants)->Arg(2)->Arg(4)->Arg(6);

void bm_invert_cf(benchmark::State& state) {
    const ChannelConfig c = ChannelConfig::make(3, 3, 15.0);
    const CapacityCF cf = build_correlated_cf(c, exponential_pair(c, 0.5, 0.7));
    const auto f = cf.as_function();
    const CumulantSet cs = cumulants_correlated(c, exponential_pair(c, 0.5, 0.7), 2);
    const CfHints hints{cs.mean, std::sqrt(cs.variance)};
    for (auto _ : state) benchmark::DoNotOptimize(invert_cf(f, InversionSpec{}, hints));
}
BENCHMARK(bm_invert_cf)->Unit(benchmark::kMillisecond);

void bm_monte_carlo(benchmark::State& state) {
    SimulationSpec spec;
    spec.config = ChannelConfig::make(4, 4, 15.0);
    spec.pair = exponential_pair(spec.config, 0.5, 0.7);
    spec.n_trials = 100000;
    spec.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_capacities(spec));
    state.SetItemsProcessed(state.iterations() * spec.n_trials);
}
BENCHMARK(bm_monte_carlo)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
