#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "mimocap/channel.hpp"

namespace mimocap {

struct SimulationSpec {
    ChannelConfig config;
    std::optional<CorrelationPair> pair;  ///< nullopt = uncorrelated fading
    std::int64_t n_trials = 100000;
    std::uint64_t seed = 1;
    int n_threads = 0;  ///< 0 = hardware concurrency
};

/// Capacity draws in nats. Deterministic for a given spec: work is split
/// into fixed-size shards with per-shard seeds, so the result does not
/// depend on n_threads.
std::vector<double> simulate_capacities(const SimulationSpec& spec);

struct EmpiricalStats {
    std::int64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
    double se_skewness = 0.0;  ///< sqrt(6/n)
    double se_kurtosis = 0.0;  ///< sqrt(24/n)
};

EmpiricalStats summarize(const std::vector<double>& samples);

struct Histogram {
    std::vector<double> edges;        ///< n_bins + 1 ascending edges
    std::vector<std::int64_t> counts; ///< out-of-range samples land in the end bins
};

Histogram make_histogram(const std::vector<double>& samples, int n_bins);

/// (sample - analytic) / standard error, per statistic.
struct MomentComparison {
    double z_mean = 0.0;
    double z_variance = 0.0;
    double z_skewness = 0.0;
    double z_kurtosis = 0.0;
};

MomentComparison compare_moments(const EmpiricalStats& stats, double mean, double variance,
                                 double skewness, double kurtosis_excess);

/// (1/n) sum_k e^{j omega c_k}
std::complex<double> empirical_cf(const std::vector<double>& samples, double omega);

/// Principal square root of a Hermitian positive semidefinite matrix.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& m);

/// log det(I + eta_bar * W) with W = HH^H or H^H H per the smaller side.
double capacity_from_channel(const ChannelConfig& config, const ComplexMatrix& h);
/// Same value via an LU determinant instead of the eigenvalue route.
double capacity_from_channel_det(const ChannelConfig& config, const ComplexMatrix& h);

/// CSV with header `trial,capacity_nats`.
void write_samples_csv(std::ostream& out, const std::vector<double>& samples);

}  // namespace mimocap
