#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mimocap/cf.hpp"
#include "mimocap/channel.hpp"
#include "mimocap/cumulants.hpp"
#include "mimocap/distribution.hpp"
#include "mimocap/montecarlo.hpp"

namespace {

using nlohmann::json;

constexpr double kLn2 = 0.6931471805599453;

struct ScenarioOptions {
    int nt = 1;
    int nr = 1;
    double snr_db = 15.0;
    bool iid = false;
    std::vector<double> exp_rho;
    std::string corr_file;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool json_out = false;
    bool csv_out = false;
    bool bits = false;
    bool permissive_diagonal = false;
};

struct Scenario {
    mimocap::ChannelConfig config;
    std::optional<mimocap::CorrelationPair> pair;  ///< nullopt = exact iid engine
    double rho_t = 0.0;
    double rho_r = 0.0;

    bool effective_iid() const { return !pair.has_value(); }
};

void add_common_flags(CLI::App* cmd, ScenarioOptions& o, bool dims_required = true) {
    auto* nt = cmd->add_option("--nt", o.nt, "transmit antennas");
    auto* nr = cmd->add_option("--nr", o.nr, "receive antennas");
    if (dims_required) {
        nt->required();
        nr->required();
    }
    cmd->add_option("--snr-db", o.snr_db, "average SNR in dB");
    cmd->add_flag("--iid", o.iid, "uncorrelated fading");
    cmd->add_option("--exp", o.exp_rho, "exponential correlation coefficients rhoT rhoR")
        ->expected(2);
    cmd->add_option("--corr-file", o.corr_file, "correlation matrix file (CORRMAT v1)");
    cmd->add_option("--seed", o.seed, "RNG seed")->each([&o](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_flag("--json", o.json_out, "JSON output");
    cmd->add_flag("--csv", o.csv_out, "CSV output");
    cmd->add_flag("--bits", o.bits, "report capacities in bits/s/Hz instead of nats/s/Hz");
    cmd->add_flag("--permissive-diagonal", o.permissive_diagonal,
                  "accept correlation matrices whose diagonal deviates from unity");
}

mimocap::CorrelationPair decompose_with_guard(const mimocap::ComplexMatrix& psi_t,
                                              const mimocap::ComplexMatrix& psi_r,
                                              const mimocap::ChannelConfig& config,
                                              bool permissive) {
    mimocap::ValidationOptions vopts;
    vopts.permissive_diagonal = permissive;
    auto pair = mimocap::CorrelationPair::validate_and_decompose(psi_t, psi_r, config, vopts);
    const double gap = std::min(pair.min_rel_gap_small(), pair.min_rel_gap_large());
    if (gap < 1e-9) {
        std::cerr << "warning: near-degenerate correlation spectrum (min relative gap " << gap
                  << "), regularizing with epsilon 1e-6\n";
        pair = mimocap::regularize_spectrum(pair, 1e-6);
    }
    return pair;
}

Scenario resolve_scenario(const ScenarioOptions& o) {
    const int sources = (o.iid ? 1 : 0) + (o.exp_rho.empty() ? 0 : 1) + (o.corr_file.empty() ? 0 : 1);
    if (sources != 1)
        throw CLI::ValidationError("correlation",
                                   "exactly one of --iid, --exp, --corr-file is required");
    Scenario s;
    s.config = mimocap::ChannelConfig::make(o.nt, o.nr, o.snr_db);
    if (o.iid) return s;
    if (!o.exp_rho.empty()) {
        s.rho_t = o.exp_rho[0];
        s.rho_r = o.exp_rho[1];
        if (s.rho_t == 0.0 && s.rho_r == 0.0) return s;  // identity: exact iid engine
        const mimocap::ComplexMatrix psi_t =
            mimocap::make_exponential_correlation(o.nt, s.rho_t).cast<std::complex<double>>();
        const mimocap::ComplexMatrix psi_r =
            mimocap::make_exponential_correlation(o.nr, s.rho_r).cast<std::complex<double>>();
        s.pair = decompose_with_guard(psi_t, psi_r, s.config, o.permissive_diagonal);
        return s;
    }
    auto [psi_t, psi_r] = mimocap::ingest_correlation_file(o.corr_file);
    s.pair = decompose_with_guard(psi_t, psi_r, s.config, o.permissive_diagonal);
    return s;
}

mimocap::CumulantSet exact_cumulants(const Scenario& s, int max_order = 4) {
    return s.effective_iid() ? mimocap::cumulants_iid(s.config, max_order)
                             : mimocap::cumulants_correlated(s.config, *s.pair, max_order);
}

mimocap::CapacityCF exact_cf(const Scenario& s) {
    return s.effective_iid() ? mimocap::build_iid_cf(s.config)
                             : mimocap::build_correlated_cf(s.config, *s.pair);
}

// identity correlation stand-in for high-SNR asymptotics of an iid scenario
mimocap::CorrelationPair identity_pair(const mimocap::ChannelConfig& config, bool regularize) {
    auto pair = mimocap::CorrelationPair::validate_and_decompose(
        mimocap::ComplexMatrix::Identity(config.n_t, config.n_t),
        mimocap::ComplexMatrix::Identity(config.n_r, config.n_r), config);
    if (regularize) pair = mimocap::regularize_spectrum(pair, 1e-3);
    return pair;
}

json cumulants_to_json(const mimocap::CumulantSet& cs, double u) {
    json j;
    j["kappa"] = json::array();
    for (std::size_t n = 0; n < cs.kappa.size(); ++n)
        j["kappa"].push_back(cs.kappa[n] * std::pow(u, n + 1));
    j["mean"] = cs.mean * u;
    j["variance"] = cs.variance * u * u;
    j["skewness"] = cs.skewness;
    j["kurtosis_excess"] = cs.kurtosis_excess;
    return j;
}

int cmd_stats(const ScenarioOptions& o, bool high_snr) {
    const Scenario s = resolve_scenario(o);
    mimocap::CumulantSet cs;
    if (high_snr) {
        if (s.effective_iid()) {
            const bool square = s.config.n_t == s.config.n_r;
            cs = mimocap::cumulants_high_snr(s.config, identity_pair(s.config, !square));
        } else {
            cs = mimocap::cumulants_high_snr(s.config, *s.pair);
        }
    } else {
        cs = exact_cumulants(s);
    }
    const double u = o.bits ? 1.0 / kLn2 : 1.0;
    if (o.json_out) {
        json j = cumulants_to_json(cs, u);
        j["unit"] = o.bits ? "bits/s/Hz" : "nats/s/Hz";
        j["engine"] = high_snr ? "high_snr" : (s.effective_iid() ? "exact_iid" : "exact_corr");
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "kappa1,kappa2,kappa3,kappa4,m1,mu2,beta1,beta2\n";
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      cs.kappa[0] * u, cs.kappa[1] * u * u, cs.kappa[2] * u * u * u,
                      cs.kappa[3] * u * u * u * u, cs.mean * u, cs.variance * u * u, cs.skewness,
                      cs.kurtosis_excess);
        std::cout << buf;
    }
    return 0;
}

int cmd_dist(const ScenarioOptions& o, mimocap::InversionSpec spec, double outage_q,
             const std::string& out_path) {
    const Scenario s = resolve_scenario(o);
    const mimocap::CumulantSet cs = exact_cumulants(s, 2);
    const mimocap::CapacityCF cf = exact_cf(s);
    const mimocap::CfHints hints{cs.mean, std::sqrt(cs.variance)};
    const auto f = cf.as_function();
    const mimocap::DistributionGrid grid = mimocap::invert_cf(f, spec, hints);
    const double u = o.bits ? 1.0 / kLn2 : 1.0;

    if (outage_q > 0.0) {
        const double c_out = mimocap::outage_capacity(f, grid, outage_q) * u;
        if (o.json_out) {
            json j;
            j["q"] = outage_q;
            j["outage_capacity"] = c_out;
            j["unit"] = o.bits ? "bits/s/Hz" : "nats/s/Hz";
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "q,outage_capacity\n" << outage_q << "," << c_out << "\n";
        }
        return 0;
    }

    mimocap::DistributionGrid scaled = grid;
    if (o.bits) {
        for (auto& x : scaled.capacity) x *= u;
        for (auto& p : scaled.pdf) p /= u;
    }
    if (out_path.empty()) {
        mimocap::write_grid_csv(std::cout, scaled);
    } else {
        std::ofstream out(out_path);
        if (!out) throw mimocap::io_error("cannot open output file: " + out_path);
        mimocap::write_grid_csv(out, scaled);
    }
    return 0;
}

json simulation_report(const Scenario& s, const ScenarioOptions& o, std::int64_t trials,
                       std::uint64_t seed, int threads, bool compare) {
    mimocap::SimulationSpec spec;
    spec.config = s.config;
    spec.pair = s.pair;
    spec.n_trials = trials;
    spec.seed = seed;
    spec.n_threads = threads;
    const std::vector<double> samples = mimocap::simulate_capacities(spec);
    const mimocap::EmpiricalStats st = mimocap::summarize(samples);
    const double u = o.bits ? 1.0 / kLn2 : 1.0;

    json j;
    j["n_trials"] = st.n;
    j["seed"] = seed;
    j["unit"] = o.bits ? "bits/s/Hz" : "nats/s/Hz";
    j["mean"] = st.mean * u;
    j["variance"] = st.variance * u * u;
    j["skewness"] = st.skewness;
    j["kurtosis_excess"] = st.kurtosis_excess;
    j["se_mean"] = st.se_mean * u;
    j["se_variance"] = st.se_variance * u * u;
    j["se_skewness"] = st.se_skewness;
    j["se_kurtosis"] = st.se_kurtosis;
    const mimocap::Histogram h = mimocap::make_histogram(samples, 64);
    json edges = json::array(), counts = json::array();
    for (double e : h.edges) edges.push_back(e * u);
    for (auto c : h.counts) counts.push_back(c);
    j["histogram"] = {{"edges", edges}, {"counts", counts}};

    if (compare) {
        const mimocap::CumulantSet cs = exact_cumulants(s);
        const mimocap::MomentComparison mc =
            mimocap::compare_moments(st, cs.mean, cs.variance, cs.skewness, cs.kurtosis_excess);
        j["analytic"] = cumulants_to_json(cs, u);
        j["z_scores"] = {{"mean", mc.z_mean},
                         {"variance", mc.z_variance},
                         {"skewness", mc.z_skewness},
                         {"kurtosis_excess", mc.z_kurtosis}};
    }
    return j;
}

int cmd_sim(ScenarioOptions o, std::int64_t trials, int threads, bool compare,
            const std::string& sweep_rho, const std::string& samples_out) {
    if (trials < 1) throw CLI::ValidationError("--trials", "must be >= 1");
    std::uint64_t seed = o.seed;
    if (!o.seed_set) {
        seed = std::random_device{}();
        std::cerr << "note: no --seed given, using generated seed " << seed << "\n";
    }

    if (!sweep_rho.empty()) {
        double lo = 0.0, hi = 0.0;
        int points = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(sweep_rho);
        if (!(ss >> lo >> c1 >> hi >> c2 >> points) || c1 != ':' || c2 != ':' || points < 1)
            throw CLI::ValidationError("--sweep-rho", "expected lo:hi:points");
        json out = json::array();
        for (int k = 0; k < points; ++k) {
            const double rho = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
            ScenarioOptions oo = o;
            oo.iid = false;
            oo.corr_file.clear();
            oo.exp_rho = {rho, rho};
            const Scenario s = resolve_scenario(oo);
            json j = simulation_report(s, oo, trials, seed + static_cast<std::uint64_t>(k),
                                       threads, compare);
            j["rho"] = rho;
            out.push_back(std::move(j));
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    const Scenario s = resolve_scenario(o);
    if (!samples_out.empty()) {
        mimocap::SimulationSpec spec;
        spec.config = s.config;
        spec.pair = s.pair;
        spec.n_trials = trials;
        spec.seed = seed;
        spec.n_threads = threads;
        const auto samples = mimocap::simulate_capacities(spec);
        std::ofstream out(samples_out);
        if (!out) throw mimocap::io_error("cannot open output file: " + samples_out);
        mimocap::write_samples_csv(out, samples);
    }
    std::cout << simulation_report(s, o, trials, seed, threads, compare).dump(2) << "\n";
    return 0;
}

int cmd_sweep(const ScenarioOptions& o, const std::string& axis, double from, double to,
              int steps) {
    if (steps < 1) throw CLI::ValidationError("--steps", "must be >= 1");
    const double u = o.bits ? 1.0 / kLn2 : 1.0;
    std::cout << "axis,point,statistic,value\n";
    char buf[160];
    const auto emit = [&](double point, const mimocap::CumulantSet& cs) {
        const struct {
            const char* name;
            double value;
        } rows[] = {{"mean", cs.mean * u},
                    {"variance", cs.variance * u * u},
                    {"skewness", cs.skewness},
                    {"kurtosis_excess", cs.kurtosis_excess}};
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%s,%.10g,%s,%.10g\n", axis.c_str(), point, r.name,
                          r.value);
            std::cout << buf;
        }
    };
    for (int k = 0; k < steps; ++k) {
        const double point = steps == 1 ? from : from + (to - from) * k / (steps - 1);
        ScenarioOptions oo = o;
        if (axis == "snr") {
            oo.snr_db = point;
        } else if (axis == "rho") {
            if (oo.exp_rho.empty())
                throw CLI::ValidationError("--axis rho", "requires the --exp correlation source");
            oo.exp_rho = {point, point};
        } else if (axis == "antennas") {
            oo.nt = oo.nr = static_cast<int>(std::lround(point));
        } else {
            throw CLI::ValidationError("--axis", "must be snr, rho, or antennas");
        }
        emit(point, exact_cumulants(resolve_scenario(oo)));
    }
    return 0;
}

int cmd_validate_corr(const ScenarioOptions& o, bool dims_given) {
    if (o.corr_file.empty())
        throw CLI::ValidationError("--corr-file", "required for validate-corr");
    auto [psi_t, psi_r] = mimocap::ingest_correlation_file(o.corr_file);
    const int nt = dims_given ? o.nt : static_cast<int>(psi_t.rows());
    const int nr = dims_given ? o.nr : static_cast<int>(psi_r.rows());
    const auto config = mimocap::ChannelConfig::make(nt, nr, o.snr_db);
    mimocap::ValidationOptions vopts;
    vopts.permissive_diagonal = o.permissive_diagonal;
    const auto pair = mimocap::CorrelationPair::validate_and_decompose(psi_t, psi_r, config, vopts);

    json j;
    j["n_t"] = nt;
    j["n_r"] = nr;
    j["valid"] = true;
    j["diagonal_deviation_noted"] = pair.diagonal_deviation_noted();
    j["lambda"] = std::vector<double>(pair.lambda().data(),
                                      pair.lambda().data() + pair.lambda().size());
    j["sigma"] = std::vector<double>(pair.sigma().data(),
                                     pair.sigma().data() + pair.sigma().size());
    j["min_rel_gap_small"] = pair.min_rel_gap_small();
    j["min_rel_gap_large"] = pair.min_rel_gap_large();
    j["needs_regularization"] =
        std::min(pair.min_rel_gap_small(), pair.min_rel_gap_large()) < 1e-9;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacity statistics of doubly correlated MIMO Rayleigh channels"};
    app.require_subcommand(1);

    ScenarioOptions o_stats, o_dist, o_sim, o_sweep, o_val;
    bool high_snr = false;
    auto* stats = app.add_subcommand("stats", "cumulants, moments, and shape statistics");
    add_common_flags(stats, o_stats);
    stats->add_flag("--high-snr", high_snr, "high-SNR asymptotic statistics");

    mimocap::InversionSpec ispec;
    double outage_q = 0.0;
    std::string dist_out;
    auto* dist = app.add_subcommand("dist", "capacity PDF/CDF grid and outage capacity");
    add_common_flags(dist, o_dist);
    dist->add_option("--points", ispec.n_points, "grid size (power of two)");
    dist->add_option("--c-min", ispec.c_min, "capacity axis lower bound (nats)");
    dist->add_option("--c-max", ispec.c_max, "capacity axis upper bound (nats)");
    dist->add_option("--omega-max", ispec.omega_max, "CF truncation frequency");
    dist->add_option("--outage", outage_q, "outage probability q in (0,1); prints the quantile")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    dist->add_option("--out", dist_out, "write the grid CSV to a file instead of stdout");

    std::int64_t trials = 100000;
    int threads = 0;
    bool compare = false;
    std::string sweep_rho, samples_out;
    auto* sim = app.add_subcommand("sim", "Monte Carlo simulation report");
    add_common_flags(sim, o_sim);
    sim->add_option("--trials", trials, "number of channel realizations");
    sim->add_option("--threads", threads, "worker threads (0 = hardware)");
    sim->add_flag("--compare", compare, "include analytic statistics and z-scores");
    sim->add_option("--sweep-rho", sweep_rho, "lo:hi:points sweep of rhoT = rhoR");
    sim->add_option("--samples-out", samples_out, "write trial,capacity_nats CSV");

    std::string axis = "snr";
    double from = 0.0, to = 30.0;
    int steps = 7;
    auto* sweep = app.add_subcommand("sweep", "exact statistics along an axis, long-format CSV");
    add_common_flags(sweep, o_sweep);
    sweep->add_option("--axis", axis, "snr | rho | antennas");
    sweep->add_option("--from", from, "axis start");
    sweep->add_option("--to", to, "axis end");
    sweep->add_option("--steps", steps, "number of points");

    auto* val = app.add_subcommand("validate-corr", "validate a correlation matrix file");
    add_common_flags(val, o_val, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (stats->parsed()) return cmd_stats(o_stats, high_snr);
        if (dist->parsed()) return cmd_dist(o_dist, ispec, outage_q, dist_out);
        if (sim->parsed()) return cmd_sim(o_sim, trials, threads, compare, sweep_rho, samples_out);
        if (sweep->parsed()) return cmd_sweep(o_sweep, axis, from, to, steps);
        if (val->parsed())
            return cmd_validate_corr(o_val, val->count("--nt") > 0 && val->count("--nr") > 0);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mimocap::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const mimocap::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const mimocap::degeneracy_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mimocap::truncation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mimocap::bracketing_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mimocap::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mimocap::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mimocap::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
