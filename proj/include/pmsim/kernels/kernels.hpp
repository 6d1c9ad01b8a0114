#pragma once

#include <cstddef>
#include <cstdint>

namespace pmsim::kernels {

// Dispatched entry points. Each picks the scalar reference or the AVX2
// variant at runtime; the *_scalar/*_avx2 names stay visible so equivalence
// tests can pin the two implementations against each other.

// out[i] = sum_j w[j] * exp(-(x0 + i*dx - c[j])^2 * inv4s2)
void mixture_eval(const double* w, const double* c, std::size_t m,
                  double x0, double dx, double inv4s2,
                  double* out, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);

// sum_i v[i] * (x0 + i*dx)^order, order in {0, 1, 2}
double moment_sum(const double* v, std::size_t n, double x0, double dx, int order);

// Bernoulli mask: bit p of out_words[p / 32] is set exactly when the Philox
// word for (seed, gate, pixel p, domain) is < threshold. out_words must hold
// (n_pixels + 31) / 32 words.
void dark_mask(std::uint64_t seed, std::uint64_t gate, std::uint32_t domain,
               std::uint32_t threshold, std::size_t n_pixels,
               std::uint32_t* out_words);

// round(p * 2^32) clamped to u32, the acceptance threshold for probability p
std::uint32_t bernoulli_threshold(double p);

void mixture_eval_scalar(const double* w, const double* c, std::size_t m,
                         double x0, double dx, double inv4s2,
                         double* out, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
double moment_sum_scalar(const double* v, std::size_t n, double x0, double dx, int order);
void dark_mask_scalar(std::uint64_t seed, std::uint64_t gate, std::uint32_t domain,
                      std::uint32_t threshold, std::size_t n_pixels,
                      std::uint32_t* out_words);

#if defined(PMSIM_HAVE_AVX2)
void mixture_eval_avx2(const double* w, const double* c, std::size_t m,
                       double x0, double dx, double inv4s2,
                       double* out, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
double moment_sum_avx2(const double* v, std::size_t n, double x0, double dx, int order);
void dark_mask_avx2(std::uint64_t seed, std::uint64_t gate, std::uint32_t domain,
                    std::uint32_t threshold, std::size_t n_pixels,
                    std::uint32_t* out_words);
#endif

} // namespace pmsim::kernels
