#pragma once

#include <cstddef>
#include <vector>

namespace pmsim::qcore {

// |psi> = cos(theta)|H> + sin(theta)|V>. Everything here stays real: the
// protocol only ever produces real amplitudes.
struct PolarizationState {
    double amp_h = 1.0;
    double amp_v = 0.0;
};

PolarizationState make_linear_polarization(double theta);

// <psi| (|H><H| - |V><V|) |psi>
double expectation_p(const PolarizationState& s);

double overlap(const PolarizationState& a, const PolarizationState& b);

struct GaussianComponent {
    double weight; // amplitude weight, may be negative
    double center;
};

// components closer than this merge during canonicalization (px)
inline constexpr double kMergeTolerance = 1e-9;
// merged weights smaller than this in magnitude are dropped
inline constexpr double kPruneTolerance = 1e-15;

// sum_k w_k f(x - c_k) with f(x) = (2 pi sigma^2)^(-1/4) exp(-x^2 / (4 sigma^2)),
// so f has unit L2 norm and f^2 is the N(0, sigma^2) density.
class SpatialAmplitude {
public:
    SpatialAmplitude(double sigma, std::vector<GaussianComponent> components);

    static SpatialAmplitude gaussian(double sigma, double center = 0.0, double weight = 1.0);

    double sigma() const { return sigma_; }
    const std::vector<GaussianComponent>& components() const { return components_; }

    double value_at(double x) const;
    SpatialAmplitude translated(double shift) const;
    SpatialAmplitude scaled(double factor) const;
    static SpatialAmplitude superpose(const SpatialAmplitude& a, const SpatialAmplitude& b);

    double squared_norm() const;
    double overlap_with(const SpatialAmplitude& other) const;

private:
    double sigma_;
    std::vector<GaussianComponent> components_; // sorted by center, merged, pruned
};

// unit-norm translated Gaussians: <T_a f, T_b f> = exp(-(a-b)^2 / (8 sigma^2))
double gaussian_overlap(double sigma, double center_a, double center_b);

// |amp|^2 expanded into Gaussian density lumps: each term contributes
// weight * N(x; mean, sigma^2). Weights sum to the squared norm.
struct DensityTerm {
    double weight;
    double mean;
};
std::vector<DensityTerm> density_terms(const SpatialAmplitude& a);

struct Grid {
    double origin = 0.0;
    double step = 1.0;
    std::size_t n = 0;
    double x(std::size_t i) const { return origin + double(i) * step; }
    double upper() const { return n == 0 ? origin : x(n - 1); }
};

// amplitude values on the grid; the grid must cover every component
// center +/- 6 sigma or a domain_coverage_error is thrown
std::vector<double> rasterize(const SpatialAmplitude& a, const Grid& grid);

} // namespace pmsim::qcore
