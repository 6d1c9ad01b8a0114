#include "pmsim/kernels/kernels.hpp"
#include "pmsim/kernels/philox.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

// AVX2 + FMA + BMI2 variants of the hot kernels. Built only on x86_64 and
// entered only after the runtime dispatch has checked cpu support.

namespace pmsim::kernels {

namespace {

// exp for 4 doubles. Cody-Waite range reduction, degree-13 Taylor on
// |r| <= ln2/2, two-step 2^n scaling so deep underflow degrades to 0
// instead of wrapping the exponent field.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

    x = _mm256_max_pd(x, _mm256_set1_pd(-750.0));
    x = _mm256_min_pd(x, _mm256_set1_pd(710.0));

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    static const double kInvFact[14] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
        1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
        1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
        1.0,                1.0};
    __m256d p = _mm256_set1_pd(kInvFact[0]);
    for (int k = 1; k < 14; ++k)
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[k]));

    __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m128i lo_lim = _mm_set1_epi32(-1022);
    const __m128i hi_lim = _mm_set1_epi32(1023);
    __m128i n1 = _mm_min_epi32(_mm_max_epi32(n32, lo_lim), hi_lim);
    __m128i n2 = _mm_min_epi32(_mm_max_epi32(_mm_sub_epi32(n32, n1), lo_lim), hi_lim);

    const __m256i bias = _mm256_set1_epi64x(1023);
    const __m256d s1 = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n1), bias), 52));
    const __m256d s2 = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n2), bias), 52));

    return _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);
}

inline double hsum_pd(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

void mixture_eval_avx2(const double* w, const double* c, std::size_t m,
                       double x0, double dx, double inv4s2,
                       double* out, std::size_t n) {
    const __m256d x0v = _mm256_set1_pd(x0);
    const __m256d dxv = _mm256_set1_pd(dx);
    const __m256d neg = _mm256_set1_pd(-inv4s2);
    const __m256d ramp = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d base = _mm256_add_pd(_mm256_set1_pd(double(i)), ramp);
        const __m256d x = _mm256_add_pd(x0v, _mm256_mul_pd(base, dxv));
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < m; ++j) {
            const __m256d d = _mm256_sub_pd(x, _mm256_set1_pd(c[j]));
            const __m256d e = exp_pd(_mm256_mul_pd(_mm256_mul_pd(d, d), neg));
            acc = _mm256_fmadd_pd(_mm256_set1_pd(w[j]), e, acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
        const double x = x0 + double(i) * dx;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = x - c[j];
            acc += w[j] * std::exp(-(d * d) * inv4s2);
        }
        out[i] = acc;
    }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum_pd(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double moment_sum_avx2(const double* v, std::size_t n, double x0, double dx, int order) {
    if (order < 0 || order > 2) throw std::invalid_argument("moment_sum: order must be 0, 1 or 2");
    const __m256d x0v = _mm256_set1_pd(x0);
    const __m256d dxv = _mm256_set1_pd(dx);
    const __m256d ramp = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d base = _mm256_add_pd(_mm256_set1_pd(double(i)), ramp);
        const __m256d x = _mm256_add_pd(x0v, _mm256_mul_pd(base, dxv));
        const __m256d vv = _mm256_loadu_pd(v + i);
        if (order == 0)
            acc = _mm256_add_pd(acc, vv);
        else if (order == 1)
            acc = _mm256_fmadd_pd(vv, x, acc);
        else
            acc = _mm256_fmadd_pd(vv, _mm256_mul_pd(x, x), acc);
    }
    double s = hsum_pd(acc);
    for (; i < n; ++i) {
        const double x = x0 + double(i) * dx;
        const double f = order == 0 ? 1.0 : (order == 1 ? x : x * x);
        s += v[i] * f;
    }
    return s;
}

namespace {

// 8 independent 32x32->64 multiplies against a broadcast constant
inline void mulhilo8(__m256i x, __m256i mvec, __m256i& hi, __m256i& lo) {
    const __m256i prod_even = _mm256_mul_epu32(x, mvec);
    const __m256i prod_odd = _mm256_mul_epu32(_mm256_srli_epi64(x, 32), mvec);
    lo = _mm256_blend_epi32(prod_even, _mm256_slli_epi64(prod_odd, 32), 0xAA);
    hi = _mm256_blend_epi32(_mm256_srli_epi64(prod_even, 32), prod_odd, 0xAA);
}

} // namespace

void dark_mask_avx2(std::uint64_t seed, std::uint64_t gate, std::uint32_t domain,
                    std::uint32_t threshold, std::size_t n_pixels,
                    std::uint32_t* out_words) {
    const std::size_t n_words = (n_pixels + 31) / 32;
    std::fill(out_words, out_words + n_words, 0u);
    if (threshold == 0 || n_pixels == 0) return;

    const PhiloxKey key = make_key(seed);
    const std::size_t n_blocks = (n_pixels + 3) / 4;

    const __m256i m0 = _mm256_set1_epi32(int(kPhiloxM0));
    const __m256i m1 = _mm256_set1_epi32(int(kPhiloxM1));
    const __m256i w0 = _mm256_set1_epi32(int(kPhiloxW0));
    const __m256i w1 = _mm256_set1_epi32(int(kPhiloxW1));
    const __m256i gate_lo = _mm256_set1_epi32(int(std::uint32_t(gate)));
    const __m256i gate_hi = _mm256_set1_epi32(int(std::uint32_t(gate >> 32)));
    const __m256i dom = _mm256_set1_epi32(int(domain));
    const __m256i sign = _mm256_set1_epi32(int(0x80000000u));
    const __m256i thr = _mm256_xor_si256(_mm256_set1_epi32(int(threshold)), sign);

    std::size_t b = 0;
    for (; b + 8 <= n_blocks; b += 8) {
        __m256i x0 = gate_lo;
        __m256i x1 = gate_hi;
        __m256i x2 = _mm256_add_epi32(_mm256_set1_epi32(int(b)),
                                      _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7));
        __m256i x3 = dom;
        __m256i k0 = _mm256_set1_epi32(int(key.k0));
        __m256i k1 = _mm256_set1_epi32(int(key.k1));
        for (int round = 0; round < 10; ++round) {
            __m256i hi0, lo0, hi1, lo1;
            mulhilo8(x0, m0, hi0, lo0);
            mulhilo8(x2, m1, hi1, lo1);
            const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, x1), k0);
            const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, x3), k1);
            x0 = n0;
            x1 = lo1;
            x2 = n2;
            x3 = lo0;
            k0 = _mm256_add_epi32(k0, w0);
            k1 = _mm256_add_epi32(k1, w1);
        }
        const __m256i lanes[4] = {x0, x1, x2, x3};
        std::uint32_t word = 0;
        for (int lane = 0; lane < 4; ++lane) {
            const __m256i biased = _mm256_xor_si256(lanes[lane], sign);
            const __m256i hit = _mm256_cmpgt_epi32(thr, biased);
            const auto bits8 = std::uint32_t(_mm256_movemask_ps(_mm256_castsi256_ps(hit)));
            word |= _pdep_u32(bits8, 0x11111111u << lane);
        }
        out_words[b / 8] = word;
    }
    for (; b < n_blocks; ++b) {
        const auto w = philox4x32(
            {std::uint32_t(gate), std::uint32_t(gate >> 32), std::uint32_t(b), domain}, key);
        for (int lane = 0; lane < 4; ++lane) {
            const std::size_t p = 4 * b + std::size_t(lane);
            if (p < n_pixels && w[std::size_t(lane)] < threshold)
                out_words[p / 32] |= (1u << (p % 32));
        }
    }
    if (n_pixels % 32)
        out_words[n_words - 1] &= (1u << (n_pixels % 32)) - 1u;
}

} // namespace pmsim::kernels
