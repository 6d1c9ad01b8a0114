#include "pmsim/qcore.hpp"

#include "pmsim/errors.hpp"
#include "pmsim/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pmsim::qcore {

PolarizationState make_linear_polarization(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("make_linear_polarization: theta must be finite");
    return {std::cos(theta), std::sin(theta)};
}

double expectation_p(const PolarizationState& s) {
    return s.amp_h * s.amp_h - s.amp_v * s.amp_v;
}

double overlap(const PolarizationState& a, const PolarizationState& b) {
    return a.amp_h * b.amp_h + a.amp_v * b.amp_v;
}

namespace {

std::vector<GaussianComponent> canonicalize(std::vector<GaussianComponent> comps) {
    for (const auto& c : comps) {
        if (!std::isfinite(c.weight) || !std::isfinite(c.center))
            throw std::invalid_argument("SpatialAmplitude: non-finite component");
    }
    std::sort(comps.begin(), comps.end(),
              [](const GaussianComponent& a, const GaussianComponent& b) { return a.center < b.center; });
    std::vector<GaussianComponent> merged;
    merged.reserve(comps.size());
    for (const auto& c : comps) {
        if (!merged.empty() && c.center - merged.back().center < kMergeTolerance)
            merged.back().weight += c.weight;
        else
            merged.push_back(c);
    }
    std::erase_if(merged, [](const GaussianComponent& c) { return std::abs(c.weight) < kPruneTolerance; });
    return merged;
}

} // namespace

SpatialAmplitude::SpatialAmplitude(double sigma, std::vector<GaussianComponent> components)
    : sigma_(sigma), components_(canonicalize(std::move(components))) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("SpatialAmplitude: sigma must be positive and finite");
}

SpatialAmplitude SpatialAmplitude::gaussian(double sigma, double center, double weight) {
    return SpatialAmplitude(sigma, {{weight, center}});
}

double SpatialAmplitude::value_at(double x) const {
    const double norm = std::pow(2.0 * std::numbers::pi * sigma_ * sigma_, -0.25);
    const double inv4s2 = 1.0 / (4.0 * sigma_ * sigma_);
    double acc = 0.0;
    for (const auto& c : components_) {
        const double d = x - c.center;
        acc += c.weight * std::exp(-(d * d) * inv4s2);
    }
    return norm * acc;
}

SpatialAmplitude SpatialAmplitude::translated(double shift) const {
    if (!std::isfinite(shift)) throw std::invalid_argument("translated: shift must be finite");
    std::vector<GaussianComponent> comps = components_;
    for (auto& c : comps) c.center += shift;
    return SpatialAmplitude(sigma_, std::move(comps));
}

SpatialAmplitude SpatialAmplitude::scaled(double factor) const {
    if (!std::isfinite(factor)) throw std::invalid_argument("scaled: factor must be finite");
    std::vector<GaussianComponent> comps = components_;
    for (auto& c : comps) c.weight *= factor;
    return SpatialAmplitude(sigma_, std::move(comps));
}

SpatialAmplitude SpatialAmplitude::superpose(const SpatialAmplitude& a, const SpatialAmplitude& b) {
    if (a.sigma_ != b.sigma_)
        throw std::invalid_argument("superpose: mismatched component widths");
    std::vector<GaussianComponent> comps = a.components_;
    comps.insert(comps.end(), b.components_.begin(), b.components_.end());
    return SpatialAmplitude(a.sigma_, std::move(comps));
}

double gaussian_overlap(double sigma, double center_a, double center_b) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_overlap: sigma must be positive");
    const double d = center_a - center_b;
    return std::exp(-(d * d) / (8.0 * sigma * sigma));
}

double SpatialAmplitude::squared_norm() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        acc += components_[i].weight * components_[i].weight;
        for (std::size_t j = i + 1; j < components_.size(); ++j) {
            acc += 2.0 * components_[i].weight * components_[j].weight *
                   gaussian_overlap(sigma_, components_[i].center, components_[j].center);
        }
    }
    return acc;
}

double SpatialAmplitude::overlap_with(const SpatialAmplitude& other) const {
    if (sigma_ != other.sigma_)
        throw std::invalid_argument("overlap_with: mismatched component widths");
    double acc = 0.0;
    for (const auto& a : components_)
        for (const auto& b : other.components_)
            acc += a.weight * b.weight * gaussian_overlap(sigma_, a.center, b.center);
    return acc;
}

std::vector<DensityTerm> density_terms(const SpatialAmplitude& a) {
    const auto& comps = a.components();
    const double sigma = a.sigma();
    std::vector<DensityTerm> terms;
    terms.reserve(comps.size() * (comps.size() + 1) / 2);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        for (std::size_t j = i; j < comps.size(); ++j) {
            const double overlap = gaussian_overlap(sigma, comps[i].center, comps[j].center);
            const double scale = (i == j) ? 1.0 : 2.0;
            terms.push_back({scale * comps[i].weight * comps[j].weight * overlap,
                             0.5 * (comps[i].center + comps[j].center)});
        }
    }
    return terms;
}

std::vector<double> rasterize(const SpatialAmplitude& a, const Grid& grid) {
    if (grid.n < 2 || !(grid.step > 0.0) || !std::isfinite(grid.origin))
        throw std::invalid_argument("rasterize: grid needs step > 0 and at least 2 points");
    const auto& comps = a.components();
    if (!comps.empty()) {
        const double lo_need = comps.front().center - 6.0 * a.sigma();
        const double hi_need = comps.back().center + 6.0 * a.sigma();
        if (grid.origin > lo_need || grid.upper() < hi_need) {
            std::ostringstream msg;
            msg << "rasterize: grid [" << grid.origin << ", " << grid.upper()
                << "] does not cover required [" << lo_need << ", " << hi_need << "]";
            throw domain_coverage_error(msg.str());
        }
    }
    std::vector<double> values(grid.n, 0.0);
    if (comps.empty()) return values;
    std::vector<double> w(comps.size()), c(comps.size());
    const double norm = std::pow(2.0 * std::numbers::pi * a.sigma() * a.sigma(), -0.25);
    for (std::size_t k = 0; k < comps.size(); ++k) {
        w[k] = norm * comps[k].weight;
        c[k] = comps[k].center;
    }
    kernels::mixture_eval(w.data(), c.data(), comps.size(), grid.origin, grid.step,
                          1.0 / (4.0 * a.sigma() * a.sigma()), values.data(), grid.n);
    return values;
}

} // namespace pmsim::qcore
