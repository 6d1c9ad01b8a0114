#include "pmsim/kernels/kernels.hpp"
#include "pmsim/kernels/philox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmsim::kernels {

void mixture_eval_scalar(const double* w, const double* c, std::size_t m,
                         double x0, double dx, double inv4s2,
                         double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double x = x0 + double(i) * dx;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = x - c[j];
            acc += w[j] * std::exp(-(d * d) * inv4s2);
        }
        out[i] = acc;
    }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double moment_sum_scalar(const double* v, std::size_t n, double x0, double dx, int order) {
    if (order < 0 || order > 2) throw std::invalid_argument("moment_sum: order must be 0, 1 or 2");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = x0 + double(i) * dx;
        const double f = order == 0 ? 1.0 : (order == 1 ? x : x * x);
        acc += v[i] * f;
    }
    return acc;
}

std::uint32_t bernoulli_threshold(double p) {
    if (!(p >= 0.0) || !(p <= 1.0)) throw std::invalid_argument("bernoulli_threshold: p outside [0, 1]");
    const double scaled = std::nearbyint(p * 4294967296.0);
    return scaled >= 4294967295.0 ? 0xFFFFFFFFu : std::uint32_t(scaled);
}

void dark_mask_scalar(std::uint64_t seed, std::uint64_t gate, std::uint32_t domain,
                      std::uint32_t threshold, std::size_t n_pixels,
                      std::uint32_t* out_words) {
    const std::size_t n_words = (n_pixels + 31) / 32;
    std::fill(out_words, out_words + n_words, 0u);
    if (threshold == 0 || n_pixels == 0) return;
    const PhiloxKey key = make_key(seed);
    const std::size_t n_blocks = (n_pixels + 3) / 4;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const auto w = philox4x32(
            {std::uint32_t(gate), std::uint32_t(gate >> 32), std::uint32_t(b), domain}, key);
        for (int lane = 0; lane < 4; ++lane) {
            const std::size_t p = 4 * b + std::size_t(lane);
            if (p < n_pixels && w[std::size_t(lane)] < threshold)
                out_words[p / 32] |= (1u << (p % 32));
        }
    }
}

} // namespace pmsim::kernels
