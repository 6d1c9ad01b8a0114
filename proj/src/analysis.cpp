#include "pmsim/analysis.hpp"

#include "pmsim/errors.hpp"
#include "pmsim/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

namespace pmsim::analysis {

namespace {

inline constexpr double kDegenerateSin2 = 1e-9;
inline constexpr double kSurvivalUnderflow = 1e-290;

evolution::EvolutionResult evolve_point(int k, double xi, double theta, double sigma_ref) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("xi must be finite and > 0");
    if (!(sigma_ref > 0.0)) throw std::invalid_argument("sigma_ref must be > 0");
    evolution::ProtocolConfig cfg;
    cfg.n_cycles = k;
    cfg.sigma = sigma_ref;
    cfg.coupling = xi * sigma_ref;
    cfg.theta_prep = theta;
    cfg.theta_protect = theta;
    cfg.protection = true;
    return evolution::run_protocol(cfg);
}

} // namespace

double pbs_uncertainty(double theta, double n_photons) {
    if (!std::isfinite(theta)) throw std::invalid_argument("pbs_uncertainty: theta must be finite");
    if (!(n_photons > 0.0)) throw std::invalid_argument("pbs_uncertainty: photon count must be > 0");
    return std::abs(std::sin(2.0 * theta)) / std::sqrt(n_photons);
}

double quantum_fisher_information(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("quantum_fisher_information: theta must be finite");
    const double s2 = std::sin(2.0 * theta);
    if (std::abs(s2) < kDegenerateSin2)
        throw numeric_range_error("quantum_fisher_information: eigenstate, information diverges");
    return 1.0 / (s2 * s2);
}

double ratio_r(int k, double xi, double theta, double sigma_ref) {
    if (std::abs(std::sin(2.0 * theta)) < kDegenerateSin2)
        throw std::invalid_argument("ratio_r: eigenstate input is degenerate");
    const auto evo = evolve_point(k, xi, theta, sigma_ref);
    if (!(evo.survival > kSurvivalUnderflow))
        throw numeric_range_error("ratio_r: survival probability underflowed");
    const double u_p = evolution::analytic_uncertainty_p(evo);
    const double u_pbs = pbs_uncertainty(theta, 1.0 / evo.survival);
    return u_pbs / u_p;
}

std::vector<RPoint> sweep_r(const SweepGrid& grid, double sigma_ref, int workers) {
    if (grid.k_values.empty() || grid.xi_values.empty() || grid.cos2theta_values.empty())
        throw std::invalid_argument("sweep_r: empty grid axis");
    if (!(sigma_ref > 0.0) || !std::isfinite(sigma_ref))
        throw std::invalid_argument("sweep_r: sigma_ref must be finite and > 0");
    for (int k : grid.k_values)
        if (k < 1) throw std::invalid_argument("sweep_r: k values must be >= 1");
    for (double xi : grid.xi_values)
        if (!(xi > 0.0)) throw std::invalid_argument("sweep_r: xi values must be > 0");
    for (double c2 : grid.cos2theta_values)
        if (!(c2 >= 0.0) || !(c2 <= 1.0))
            throw std::invalid_argument("sweep_r: cos2theta values must be in [0, 1]");

    const std::size_t nk = grid.k_values.size();
    const std::size_t nx = grid.xi_values.size();
    const std::size_t nc = grid.cos2theta_values.size();
    std::vector<RPoint> points(nk * nx * nc);

    auto fill_point = [&](std::size_t idx) {
        const std::size_t ik = idx / (nx * nc);
        const std::size_t ix = (idx / nc) % nx;
        const std::size_t ic = idx % nc;
        RPoint& pt = points[idx];
        pt.k = grid.k_values[ik];
        pt.xi = grid.xi_values[ix];
        pt.cos2theta = grid.cos2theta_values[ic];
        const double nan = std::numeric_limits<double>::quiet_NaN();
        pt.p_sur = pt.u_p = pt.u_pbs = pt.r = nan;
        const double theta = std::acos(std::sqrt(pt.cos2theta));
        if (std::abs(std::sin(2.0 * theta)) < kDegenerateSin2) {
            pt.status = PointStatus::degenerate;
            return;
        }
        try {
            const auto evo = evolve_point(pt.k, pt.xi, theta, sigma_ref);
            if (!(evo.survival > kSurvivalUnderflow))
                throw numeric_range_error("survival underflow");
            pt.p_sur = evo.survival;
            pt.u_p = evolution::analytic_uncertainty_p(evo);
            pt.u_pbs = pbs_uncertainty(theta, 1.0 / evo.survival);
            pt.r = pt.u_pbs / pt.u_p;
            pt.status = PointStatus::ok;
        } catch (const std::exception&) {
            pt.status = PointStatus::error;
        }
    };

    const std::size_t total = points.size();
    unsigned w = workers > 0 ? unsigned(workers) : std::max(1u, std::thread::hardware_concurrency());
    w = std::min<unsigned>(w, unsigned(std::max<std::size_t>(1, total)));
    if (w <= 1) {
        for (std::size_t i = 0; i < total; ++i) fill_point(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(w);
        const std::size_t chunk = (total + w - 1) / w;
        for (unsigned t = 0; t < w; ++t) {
            const std::size_t begin = std::size_t(t) * chunk;
            const std::size_t end = std::min(total, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                for (std::size_t i = begin; i < end; ++i) fill_point(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    return points;
}

std::vector<std::pair<int, double>> photons_needed(const std::vector<int>& k_values,
                                                   double xi, double theta) {
    if (k_values.empty()) throw std::invalid_argument("photons_needed: no k values");
    std::vector<std::pair<int, double>> out;
    out.reserve(k_values.size());
    for (int k : k_values) {
        if (k < 1) throw std::invalid_argument("photons_needed: k values must be >= 1");
        const auto evo = evolve_point(k, xi, theta, 1.0);
        if (!(evo.survival > kSurvivalUnderflow))
            throw numeric_range_error("photons_needed: survival probability underflowed");
        out.emplace_back(k, 1.0 / evo.survival);
    }
    return out;
}

double scaling_exponent(const std::vector<int>& k_values, double xi, double theta) {
    if (!(xi >= 6.0))
        throw std::invalid_argument("scaling_exponent: needs the strong-coupling regime (xi >= 6)");
    const std::set<int> distinct(k_values.begin(), k_values.end());
    if (distinct.size() < 3)
        throw std::invalid_argument("scaling_exponent: needs at least 3 distinct k values");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double n = 0.0;
    for (int k : k_values) {
        if (k < 1) throw std::invalid_argument("scaling_exponent: k values must be >= 1");
        const auto evo = evolve_point(k, xi, theta, 1.0);
        const double lx = std::log(double(k));
        const double ly = std::log(evolution::analytic_uncertainty_p(evo));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        n += 1.0;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace pmsim::analysis
