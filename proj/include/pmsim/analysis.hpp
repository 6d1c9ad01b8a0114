#pragma once

#include <utility>
#include <vector>

namespace pmsim::analysis {

// shot-noise floor of the two-outcome polarizing-splitter estimate of
// cos(2 theta) from m photons: |sin(2 theta)| / sqrt(m)
double pbs_uncertainty(double theta, double n_photons);

// Fisher information of theta-rotation per detected photon, 1 / sin^2(2 theta)
double quantum_fisher_information(double theta);

enum class PointStatus { ok, degenerate, error };

struct RPoint {
    int k = 0;
    double xi = 0.0;
    double cos2theta = 0.0;
    double p_sur = 0.0;
    double u_p = 0.0;
    double u_pbs = 0.0;
    double r = 0.0;
    PointStatus status = PointStatus::ok;
};

// advantage ratio: splitter floor at the matched photon budget m = 1/p_sur
// over the protected single-photon pointer uncertainty. Invariant under a
// common rescaling of sigma and g, so sigma_ref only fixes units.
double ratio_r(int k, double xi, double theta, double sigma_ref = 1.0);

struct SweepGrid {
    std::vector<int> k_values;
    std::vector<double> xi_values;         // g / sigma, all > 0
    std::vector<double> cos2theta_values;  // in [0, 1]
};

// k outer, then xi, then cos^2 theta; eigenstate rows are flagged degenerate
// and failures are flagged error instead of aborting the sweep
std::vector<RPoint> sweep_r(const SweepGrid& grid, double sigma_ref = 1.0, int workers = 0);

// photon budget 1/p_sur(K) per K, for sublinearity studies
std::vector<std::pair<int, double>> photons_needed(const std::vector<int>& k_values,
                                                   double xi, double theta);

// least-squares slope of log u_P against log K in the strong-coupling
// regime; requires xi >= 6 and at least 3 distinct K values
double scaling_exponent(const std::vector<int>& k_values, double xi, double theta);

} // namespace pmsim::analysis
