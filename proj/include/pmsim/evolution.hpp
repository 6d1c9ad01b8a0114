#pragma once

#include "pmsim/qcore.hpp"

#include <numbers>
#include <vector>

namespace pmsim::evolution {

struct ProtocolConfig {
    int n_cycles = 7;                                  // K
    double coupling = 1.66;                            // g, pointer shift per cycle (px)
    double sigma = 4.1;                                // pointer width (px)
    double theta_prep = 17.0 * std::numbers::pi / 60.0;
    double theta_protect = 17.0 * std::numbers::pi / 60.0;
    bool protection = true;

    double xi() const { return coupling / sigma; }
    double half_shift() const { return 0.5 * double(n_cycles) * coupling; } // a = K g / 2
};

// pointer amplitudes attached to the H and V branches; both share one sigma
struct JointState {
    qcore::SpatialAmplitude h;
    qcore::SpatialAmplitude v;
    double total_squared_norm() const { return h.squared_norm() + v.squared_norm(); }
};

JointState weak_step(const JointState& s, double coupling);
JointState protect(const JointState& s, double theta_protect);

struct EvolutionResult {
    JointState final_state;     // recentered: components live at n*g - K*g/2
    double survival = 1.0;      // 1 exactly when protection is off
    double axis_offset = 0.0;   // K*g/2, already subtracted from the centers
    ProtocolConfig config;
};

EvolutionResult run_protocol(const ProtocolConfig& cfg);

// both branches' density lumps; weights sum to the state's squared norm
std::vector<qcore::DensityTerm> density_terms(const JointState& s);

// normalized detection density F(x); requires nonzero survival
double detection_density(const EvolutionResult& r, double x);
std::vector<double> detection_density(const EvolutionResult& r, const qcore::Grid& grid);

// moments of F: order 0 -> total mass (1), 1 -> centroid, 2 -> <x^2>
double pointer_moment(const EvolutionResult& r, int order);

double analytic_uncertainty_x(const EvolutionResult& r);           // pointer spread u(x)
double analytic_uncertainty_p(const EvolutionResult& r);           // u(x) * 2 / (K g)

} // namespace pmsim::evolution
