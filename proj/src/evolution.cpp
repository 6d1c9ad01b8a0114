#include "pmsim/evolution.hpp"

#include "pmsim/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace pmsim::evolution {

namespace {

inline constexpr double kSurvivalFloor = 1e-300;

void validate(const ProtocolConfig& cfg) {
    if (cfg.n_cycles < 1) throw std::invalid_argument("ProtocolConfig: n_cycles must be >= 1");
    if (!std::isfinite(cfg.coupling) || cfg.coupling < 0.0)
        throw std::invalid_argument("ProtocolConfig: coupling must be finite and >= 0");
    if (!std::isfinite(cfg.sigma) || !(cfg.sigma > 0.0))
        throw std::invalid_argument("ProtocolConfig: sigma must be finite and > 0");
    if (!std::isfinite(cfg.theta_prep) || !std::isfinite(cfg.theta_protect))
        throw std::invalid_argument("ProtocolConfig: angles must be finite");
}

} // namespace

JointState weak_step(const JointState& s, double coupling) {
    if (!std::isfinite(coupling)) throw std::invalid_argument("weak_step: coupling must be finite");
    // H picks up the shift, V stays: exp(i g P x p_hat) acts as T_g on the H branch
    return {s.h.translated(coupling), s.v};
}

JointState protect(const JointState& s, double theta_protect) {
    if (!std::isfinite(theta_protect)) throw std::invalid_argument("protect: angle must be finite");
    const double cp = std::cos(theta_protect);
    const double sp = std::sin(theta_protect);
    // project onto cp|H> + sp|V>: both branches collapse onto one shared
    // pointer profile phi = cp*h + sp*v
    const auto phi = qcore::SpatialAmplitude::superpose(s.h.scaled(cp), s.v.scaled(sp));
    return {phi.scaled(cp), phi.scaled(sp)};
}

EvolutionResult run_protocol(const ProtocolConfig& cfg) {
    validate(cfg);
    const auto pol = qcore::make_linear_polarization(cfg.theta_prep);
    JointState state{qcore::SpatialAmplitude::gaussian(cfg.sigma, 0.0, pol.amp_h),
                     qcore::SpatialAmplitude::gaussian(cfg.sigma, 0.0, pol.amp_v)};
    for (int k = 0; k < cfg.n_cycles; ++k) {
        state = weak_step(state, cfg.coupling);
        if (cfg.protection) state = protect(state, cfg.theta_protect);
    }
    const double a = cfg.half_shift();
    state = JointState{state.h.translated(-a), state.v.translated(-a)};
    const double survival = cfg.protection ? state.total_squared_norm() : 1.0;
    return {std::move(state), survival, a, cfg};
}

std::vector<qcore::DensityTerm> density_terms(const JointState& s) {
    auto terms = qcore::density_terms(s.h);
    auto tv = qcore::density_terms(s.v);
    terms.insert(terms.end(), tv.begin(), tv.end());
    return terms;
}

namespace {

double checked_survival(const EvolutionResult& r) {
    if (!(r.survival > kSurvivalFloor))
        throw numeric_range_error("survival probability is zero; detection distribution undefined");
    return r.survival;
}

} // namespace

double detection_density(const EvolutionResult& r, double x) {
    const double p = checked_survival(r);
    const double h = r.final_state.h.value_at(x);
    const double v = r.final_state.v.value_at(x);
    return (h * h + v * v) / p;
}

std::vector<double> detection_density(const EvolutionResult& r, const qcore::Grid& grid) {
    const double p = checked_survival(r);
    const auto hv = qcore::rasterize(r.final_state.h, grid);
    const auto vv = qcore::rasterize(r.final_state.v, grid);
    std::vector<double> out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = (hv[i] * hv[i] + vv[i] * vv[i]) / p;
    return out;
}

double pointer_moment(const EvolutionResult& r, int order) {
    if (order < 0 || order > 2) throw std::invalid_argument("pointer_moment: order must be 0, 1 or 2");
    const double p = checked_survival(r);
    const double s2 = r.final_state.h.sigma() * r.final_state.h.sigma();
    double acc = 0.0;
    for (const auto& t : density_terms(r.final_state)) {
        if (order == 0)
            acc += t.weight;
        else if (order == 1)
            acc += t.weight * t.mean;
        else
            acc += t.weight * (t.mean * t.mean + s2);
    }
    return acc / p;
}

double analytic_uncertainty_x(const EvolutionResult& r) {
    const double m1 = pointer_moment(r, 1);
    const double m2 = pointer_moment(r, 2);
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

double analytic_uncertainty_p(const EvolutionResult& r) {
    const double kg = double(r.config.n_cycles) * r.config.coupling;
    if (!(kg > 0.0))
        throw numeric_range_error("coupling is zero; polarization is not identifiable from the pointer");
    return analytic_uncertainty_x(r) * 2.0 / kg;
}

} // namespace pmsim::evolution
