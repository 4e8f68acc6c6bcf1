#include "mimocap/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

namespace mimocap {
namespace {

constexpr std::int64_t kShardSize = 1 << 14;
constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Box-Muller on explicit mt19937_64 draws; kept self-contained so results
// are identical across standard library implementations.
class NormalSource {
  public:
    explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

  private:
    double uniform_open() {
        // (0, 1], never 0 so log is safe
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
    }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

ComplexMatrix hermitian_sqrt(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    if (es.info() != Eigen::Success) throw error("hermitian_sqrt: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-10)
            throw domain_error("hermitian_sqrt: matrix has a negative eigenvalue " +
                               std::to_string(ev(i)));
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double capacity_from_channel(const ChannelConfig& config, const ComplexMatrix& h) {
    const ComplexMatrix w = config.receive_side_small() ? ComplexMatrix(h * h.adjoint())
                                                        : ComplexMatrix(h.adjoint() * h);
    const Eigen::VectorXd mu = hermitian_eigenvalues(w);
    double c = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        c += std::log1p(config.eta_bar * std::max(mu(i), 0.0));
    return c;
}

double capacity_from_channel_det(const ChannelConfig& config, const ComplexMatrix& h) {
    const ComplexMatrix w = config.receive_side_small() ? ComplexMatrix(h * h.adjoint())
                                                        : ComplexMatrix(h.adjoint() * h);
    const ComplexMatrix m =
        ComplexMatrix::Identity(w.rows(), w.cols()) + config.eta_bar * w;
    const std::complex<double> d = Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
    return std::log(std::abs(d));
}

std::vector<double> simulate_capacities(const SimulationSpec& spec) {
    if (spec.n_trials < 1) throw domain_error("simulate_capacities: n_trials must be >= 1");
    const ChannelConfig& cfg = spec.config;

    ComplexMatrix sqrt_r, sqrt_t;
    const bool correlated = spec.pair.has_value();
    if (correlated) {
        sqrt_r = hermitian_sqrt(spec.pair->psi_r());
        sqrt_t = hermitian_sqrt(spec.pair->psi_t());
    }

    std::vector<double> out(static_cast<std::size_t>(spec.n_trials));
    const std::int64_t n_shards = (spec.n_trials + kShardSize - 1) / kShardSize;

    const auto run_shard = [&](std::int64_t shard) {
        std::uint64_t state = spec.seed ^ (0x51d2c4b98ad5a7f3ULL * (shard + 1));
        NormalSource normals(splitmix64(state));
        const std::int64_t begin = shard * kShardSize;
        const std::int64_t end = std::min(begin + kShardSize, spec.n_trials);
        ComplexMatrix h(cfg.n_r, cfg.n_t);
        for (std::int64_t t = begin; t < end; ++t) {
            for (int i = 0; i < cfg.n_r; ++i)
                for (int j = 0; j < cfg.n_t; ++j)
                    h(i, j) = std::complex<double>(normals.next(), normals.next()) * M_SQRT1_2;
            if (correlated) h = sqrt_r * h * sqrt_t;
            out[static_cast<std::size_t>(t)] = capacity_from_channel(cfg, h);
        }
    };

    int n_threads = spec.n_threads > 0 ? spec.n_threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = static_cast<int>(std::min<std::int64_t>(n_threads, n_shards));

    if (n_threads == 1) {
        for (std::int64_t s = 0; s < n_shards; ++s) run_shard(s);
    } else {
        std::atomic<std::int64_t> next_shard{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i)
            pool.emplace_back([&] {
                for (std::int64_t s; (s = next_shard.fetch_add(1)) < n_shards;) run_shard(s);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

EmpiricalStats summarize(const std::vector<double>& samples) {
    if (samples.empty()) throw domain_error("summarize: no samples");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    EmpiricalStats s;
    s.n = static_cast<std::int64_t>(samples.size());
    s.mean = mean;
    s.variance = m2 * n / (n - 1.0);
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis_excess = m4 / (m2 * m2) - 3.0;
    s.se_mean = std::sqrt(m2 / n);
    s.se_variance = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
    s.se_skewness = std::sqrt(6.0 / n);
    s.se_kurtosis = std::sqrt(24.0 / n);
    return s;
}

Histogram make_histogram(const std::vector<double>& samples, int n_bins) {
    if (samples.empty() || n_bins < 1) throw domain_error("make_histogram: bad inputs");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) hi = lo + 1.0;
    Histogram h;
    h.edges.resize(n_bins + 1);
    h.counts.assign(n_bins, 0);
    for (int i = 0; i <= n_bins; ++i) h.edges[i] = lo + (hi - lo) * i / n_bins;
    for (double x : samples) {
        int bin = static_cast<int>((x - lo) / (hi - lo) * n_bins);
        bin = std::clamp(bin, 0, n_bins - 1);
        ++h.counts[bin];
    }
    return h;
}

MomentComparison compare_moments(const EmpiricalStats& stats, double mean, double variance,
                                 double skewness, double kurtosis_excess) {
    MomentComparison c;
    c.z_mean = (stats.mean - mean) / stats.se_mean;
    c.z_variance = (stats.variance - variance) / stats.se_variance;
    c.z_skewness = (stats.skewness - skewness) / stats.se_skewness;
    c.z_kurtosis = (stats.kurtosis_excess - kurtosis_excess) / stats.se_kurtosis;
    return c;
}

std::complex<double> empirical_cf(const std::vector<double>& samples, double omega) {
    std::complex<double> s = 0.0;
    for (double x : samples) s += std::exp(std::complex<double>(0.0, omega * x));
    return s / static_cast<double>(samples.size());
}

void write_samples_csv(std::ostream& out, const std::vector<double>& samples) {
    out << "trial,capacity_nats\n";
    char buf[64];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i, samples[i]);
        out << buf;
    }
}

}  // namespace mimocap
