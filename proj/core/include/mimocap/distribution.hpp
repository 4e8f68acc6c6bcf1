#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mimocap/errors.hpp"

namespace mimocap {

using CfFunction = std::function<std::complex<double>(double)>;  ///< omega -> phi(j omega)

enum class InversionMethod { fft_grid, gil_pelaez };

/// Mean/stddev hints used for automatic capacity-axis bounds. Derived from
/// the CF by finite differences at zero when not supplied.
struct CfHints {
    double mean = 0.0;
    double stddev = 1.0;
};

struct InversionSpec {
    InversionMethod method = InversionMethod::fft_grid;
    int n_points = 4096;     ///< power of two, >= 256
    double c_min = 0.0;      ///< capacity axis lower bound; auto when c_min == c_max
    double c_max = 0.0;
    double omega_max = 0.0;  ///< CF truncation; 0 = grow until |phi| < 1e-8
    double cf_floor = 1e-8;  ///< |phi| target for automatic omega_max
};

struct DistributionGrid {
    std::vector<double> capacity;  ///< nats
    std::vector<double> pdf;
    std::vector<double> cdf;
    double omega_max = 0.0;
    double tail_mass = 0.0;        ///< probability outside [c_min, c_max]
    double negative_ripple = 0.0;  ///< most negative raw pdf value before clipping
};

/// Fourier inversion of a capacity CF. Throws truncation_error when the CF
/// modulus at the requested omega_max still exceeds 1e-6, bracketing_error
/// when the capacity bounds exclude more than 0.5% of the mass.
DistributionGrid invert_cf(const CfFunction& cf, InversionSpec spec = {},
                           std::optional<CfHints> hints = std::nullopt);

/// Gil-Pelaez CDF, F(x) = 1/2 - (1/pi) \int_0^omega_max Im[phi(w) e^{-jwx}]/w dw.
double cdf_gil_pelaez(const CfFunction& cf, double x, double omega_max,
                      std::optional<CfHints> hints = std::nullopt);

/// Smallest x with F(x) >= q, refined to 1e-4 nats. q must lie strictly
/// inside the CDF range covered by the grid.
double outage_capacity(const CfFunction& cf, const DistributionGrid& grid, double q);

/// Trapezoid mean and variance of the gridded density.
std::pair<double, double> moments_from_grid(const DistributionGrid& grid);

/// CSV with header `capacity_nats,pdf,cdf`.
void write_grid_csv(std::ostream& out, const DistributionGrid& grid);

/// In-place radix-2 decimation-in-time FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

}  // namespace mimocap
