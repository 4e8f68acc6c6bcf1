#include "mimocap/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mimocap/quadrature.hpp"

namespace mimocap {
namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

CfHints derive_hints(const CfFunction& cf) {
    const double h = 1e-3;
    const std::complex<double> lp = std::log(cf(h));
    const std::complex<double> lm = std::log(cf(-h));
    CfHints hints;
    hints.mean = (lp - lm).imag() / (2.0 * h);
    const double var = -(lp + lm).real() / (h * h);
    hints.stddev = std::sqrt(std::max(var, 1e-12));
    return hints;
}

constexpr double kOmegaCap = 1e5;     // capacity CFs with an endpoint density decay
constexpr double kCfTrunc = 1e-6;     // slowly; cap the search and check this level
constexpr double kGpFloor = 3e-6;     // |phi| level that bounds the Gil-Pelaez tail
constexpr int kMaxPoints = 1 << 20;

struct OmegaProfile {
    double gp = 0.0;     ///< Gil-Pelaez truncation
    double floor = 0.0;  ///< |phi| < cf_floor (or the cap)
};

OmegaProfile resolve_omega(const CfFunction& cf, const InversionSpec& spec,
                           const CfHints& hints) {
    OmegaProfile prof;
    if (spec.omega_max > 0.0) {
        const double tail = std::abs(cf(spec.omega_max));
        if (tail > kCfTrunc)
            throw truncation_error("CF modulus " + std::to_string(tail) +
                                   " at omega_max still exceeds 1e-6");
        prof.gp = prof.floor = spec.omega_max;
        return prof;
    }
    double w = 8.0 / hints.stddev;
    while (w < kOmegaCap) {
        const double mag = std::abs(cf(w));
        if (prof.gp == 0.0 && mag < kGpFloor) prof.gp = w;
        if (mag < spec.cf_floor) {
            prof.floor = w;
            return prof;
        }
        w *= 1.4;
    }
    if (prof.gp == 0.0) {
        if (std::abs(cf(kOmegaCap)) > kGpFloor)
            throw truncation_error("CF does not decay enough for inversion by omega = 1e5");
        prof.gp = kOmegaCap;
    }
    prof.floor = kOmegaCap;
    return prof;
}

// \int_0^{omega_max} f(w) dw over panels sized against the oscillation rate
double panel_integral(const std::function<double(double)>& f, double omega_max, double osc_rate) {
    const QuadRule& gl = gauss_legendre(24);
    const double width = std::min(omega_max, kPi / (1.0 + osc_rate));
    const int panels = static_cast<int>(std::ceil(omega_max / width));
    const double w = omega_max / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = p * w;
        double s = 0.0;
        for (std::size_t k = 0; k < gl.x.size(); ++k) {
            const double t = lo + 0.5 * w * (gl.x[k] + 1.0);
            s += gl.w[k] * f(t);
        }
        total += 0.5 * w * s;
    }
    return total;
}

}  // namespace

void fft_radix2(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (!is_power_of_two(static_cast<int>(n)))
        throw domain_error("fft_radix2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

double cdf_gil_pelaez(const CfFunction& cf, double x, double omega_max,
                      std::optional<CfHints> hints) {
    const CfHints h = hints ? *hints : derive_hints(cf);
    const auto integrand = [&](double w) {
        return (cf(w) * std::exp(std::complex<double>(0.0, -w * x))).imag() / w;
    };
    const double osc = std::abs(x - h.mean) + h.stddev;
    return 0.5 - panel_integral(integrand, omega_max, osc) / kPi;
}

DistributionGrid invert_cf(const CfFunction& cf, InversionSpec spec, std::optional<CfHints> hints) {
    if (!is_power_of_two(spec.n_points) || spec.n_points < 256)
        throw domain_error("invert_cf: n_points must be a power of two >= 256");

    const CfHints h = hints ? *hints : derive_hints(cf);
    double c_min = spec.c_min, c_max = spec.c_max;
    if (!(c_max > c_min)) {
        c_min = h.mean - 8.0 * h.stddev;
        c_max = h.mean + 8.0 * h.stddev;
    }
    const OmegaProfile prof = resolve_omega(cf, spec, h);

    // the omega grid reaches pi/dx; widen the grid until the CF has decayed
    // there (slowly decaying CFs need a denser capacity axis)
    int n = spec.n_points;
    const double span = c_max - c_min;
    while (spec.method == InversionMethod::fft_grid && kPi * n / span < prof.floor &&
           std::abs(cf(kPi * n / span)) > kCfTrunc && 2 * n <= kMaxPoints)
        n *= 2;

    const double dx = span / n;
    const double dw = 2.0 * kPi / (n * dx);
    const double omega_fft = std::min(prof.floor, 0.5 * n * dw);
    if (spec.method == InversionMethod::fft_grid && std::abs(cf(omega_fft)) > kCfTrunc)
        throw truncation_error(
            "CF modulus at the reachable omega truncation still exceeds 1e-6; tighten the "
            "capacity bounds or raise n_points");

    DistributionGrid grid;
    grid.omega_max = prof.gp;
    grid.capacity.resize(n);
    grid.pdf.assign(n, 0.0);
    grid.cdf.assign(n, 0.0);
    for (int k = 0; k < n; ++k) grid.capacity[k] = c_min + k * dx;

    std::vector<double> signed_pdf;  // pre-clamp density, used for the CDF sums
    if (spec.method == InversionMethod::fft_grid) {
        std::vector<std::complex<double>> samples(n, 0.0);
        for (int m = 0; m < n; ++m) {
            const int msig = (m < n / 2) ? m : m - n;
            const double w = msig * dw;
            if (std::abs(w) > omega_fft) continue;
            std::complex<double> phi = (msig >= 0) ? cf(w) : std::conj(cf(-w));
            samples[m] = phi * std::exp(std::complex<double>(0.0, -w * c_min));
        }
        fft_radix2(samples);
        double ripple = 0.0;
        signed_pdf.resize(n);
        for (int k = 0; k < n; ++k) {
            const double v = samples[k].real() * dw / (2.0 * kPi);
            ripple = std::min(ripple, v);
            signed_pdf[k] = v;
            grid.pdf[k] = std::max(v, 0.0);
        }
        grid.negative_ripple = ripple;
    } else {
        for (int k = 0; k < n; ++k) {
            const double x = grid.capacity[k];
            const double osc = std::abs(x - h.mean) + h.stddev;
            const auto integrand = [&](double w) {
                return (cf(w) * std::exp(std::complex<double>(0.0, -w * x))).real();
            };
            grid.pdf[k] = std::max(panel_integral(integrand, prof.gp, osc) / kPi, 0.0);
        }
    }

    const double f_lo = cdf_gil_pelaez(cf, c_min, prof.gp, h);
    const double f_hi = cdf_gil_pelaez(cf, c_max, prof.gp, h);
    grid.tail_mass = std::max(f_lo, 0.0) + std::max(1.0 - f_hi, 0.0);
    if (grid.tail_mass > 0.005)
        throw bracketing_error("capacity bounds exclude " + std::to_string(grid.tail_mass) +
                               " of the probability mass");

    if (spec.method == InversionMethod::fft_grid) {
        // accumulate the signed density: clamping first would turn the
        // truncation ripple, which integrates to nearly zero, into a
        // systematic upward bias
        std::vector<double> run(n);
        run[0] = f_lo;
        for (int k = 1; k < n; ++k)
            run[k] = run[k - 1] + 0.5 * (signed_pdf[k - 1] + signed_pdf[k]) * dx;
        // pin the top to the Gil-Pelaez value as well; the residual drift
        // scales with the mass accumulated so far
        const double drift = f_hi - run[n - 1];
        const double total = std::max(run[n - 1] - run[0], 1e-300);
        grid.cdf[0] = std::clamp(f_lo, 0.0, 1.0);
        for (int k = 1; k < n; ++k) {
            const double v = run[k] + drift * (run[k] - run[0]) / total;
            grid.cdf[k] = std::clamp(v, grid.cdf[k - 1], 1.0);
        }
    } else {
        for (int k = 0; k < n; ++k)
            grid.cdf[k] = std::clamp(cdf_gil_pelaez(cf, grid.capacity[k], prof.gp, h), 0.0, 1.0);
    }
    return grid;
}

double outage_capacity(const CfFunction& cf, const DistributionGrid& grid, double q) {
    if (!(q > 0.0) || !(q < 1.0)) throw domain_error("outage_capacity: q must lie in (0, 1)");
    if (grid.cdf.empty() || q <= grid.cdf.front() || q >= grid.cdf.back())
        throw domain_error("outage_capacity: q lies outside the gridded CDF range");
    const auto it = std::lower_bound(grid.cdf.begin(), grid.cdf.end(), q);
    const std::size_t hi = static_cast<std::size_t>(it - grid.cdf.begin());
    double x_lo = grid.capacity[hi - 1];
    double x_hi = grid.capacity[hi];

    // x moves by at most one grid cell during refinement, so the CF values at
    // the panel nodes can be evaluated once and reused across bisections
    const double osc = 4.0 * 0.0625 * (grid.capacity.back() - grid.capacity.front());
    const QuadRule& gl = gauss_legendre(24);
    const double width = std::min(grid.omega_max, kPi / (1.0 + osc));
    const int panels = static_cast<int>(std::ceil(grid.omega_max / width));
    const double w = grid.omega_max / panels;
    std::vector<double> node;
    std::vector<std::complex<double>> weighted_phi;
    node.reserve(panels * gl.size());
    weighted_phi.reserve(panels * gl.size());
    for (int p = 0; p < panels; ++p) {
        for (std::size_t k = 0; k < gl.size(); ++k) {
            const double t = p * w + 0.5 * w * (gl.x[k] + 1.0);
            node.push_back(t);
            weighted_phi.push_back(0.5 * w * gl.w[k] * cf(t) / t);
        }
    }
    const auto cached_cdf = [&](double x) {
        double s = 0.0;
        for (std::size_t k = 0; k < node.size(); ++k)
            s += (weighted_phi[k] * std::exp(std::complex<double>(0.0, -node[k] * x))).imag();
        return 0.5 - s / kPi;
    };

    while (x_hi - x_lo > 1e-4) {
        const double mid = 0.5 * (x_lo + x_hi);
        if (cached_cdf(mid) < q)
            x_lo = mid;
        else
            x_hi = mid;
    }
    return 0.5 * (x_lo + x_hi);
}

std::pair<double, double> moments_from_grid(const DistributionGrid& grid) {
    // integrate the CDF by parts rather than the pdf directly; when the CF
    // decays slowly the gridded pdf carries truncation ripple that biases
    // pdf-weighted sums, while the CDF integrates it away
    const std::size_t n = grid.capacity.size();
    const double a = grid.capacity.front(), b = grid.capacity.back();
    const double fa = grid.cdf.front(), fb = grid.cdf.back();
    double i0 = 0.0, i1 = 0.0;  // int F dx and int x F dx, composite Simpson
    std::size_t k = 0;
    for (; k + 2 < n; k += 2) {
        const double h = grid.capacity[k + 1] - grid.capacity[k];
        i0 += h / 3.0 * (grid.cdf[k] + 4.0 * grid.cdf[k + 1] + grid.cdf[k + 2]);
        i1 += h / 3.0 *
              (grid.capacity[k] * grid.cdf[k] + 4.0 * grid.capacity[k + 1] * grid.cdf[k + 1] +
               grid.capacity[k + 2] * grid.cdf[k + 2]);
    }
    for (; k + 1 < n; ++k) {
        const double h = grid.capacity[k + 1] - grid.capacity[k];
        i0 += 0.5 * h * (grid.cdf[k] + grid.cdf[k + 1]);
        i1 += 0.5 * h *
              (grid.capacity[k] * grid.cdf[k] + grid.capacity[k + 1] * grid.cdf[k + 1]);
    }
    const double m1 = b * fb - a * fa - i0;

    // centered second moment, switching from F to the survival function at
    // the mean so neither boundary term multiplies a near-unit CDF value
    double iv = 0.0;
    const auto centered = [&](std::size_t j) {
        const double x = grid.capacity[j];
        return (x - m1) * (grid.cdf[j] - (x > m1 ? 1.0 : 0.0));
    };
    k = 0;
    for (; k + 2 < n; k += 2) {
        const double h = grid.capacity[k + 1] - grid.capacity[k];
        iv += h / 3.0 * (centered(k) + 4.0 * centered(k + 1) + centered(k + 2));
    }
    for (; k + 1 < n; ++k) {
        const double h = grid.capacity[k + 1] - grid.capacity[k];
        iv += 0.5 * h * (centered(k) + centered(k + 1));
    }
    const double var = -(a - m1) * (a - m1) * fa - (b - m1) * (b - m1) * (1.0 - fb) - 2.0 * iv;
    return {m1, var};
}

void write_grid_csv(std::ostream& out, const DistributionGrid& grid) {
    out << "capacity_nats,pdf,cdf\n";
    char buf[128];
    for (std::size_t k = 0; k < grid.capacity.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", grid.capacity[k], grid.pdf[k],
                      grid.cdf[k]);
        out << buf;
    }
}

}  // namespace mimocap
