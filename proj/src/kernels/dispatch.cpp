#include "pmsim/kernels/dispatch.hpp"
#include "pmsim/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace pmsim::kernels {

bool cpu_has_avx2() {
#if defined(PMSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
           __builtin_cpu_supports("bmi2");
#else
    return false;
#endif
}

namespace {

std::atomic<int> g_isa{-1}; // -1 unresolved

Isa resolve_from_env_or_cpu() {
    if (const char* env = std::getenv("PMSIM_ISA")) {
        const std::string v(env);
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2") {
            if (!cpu_has_avx2())
                throw std::runtime_error("PMSIM_ISA=avx2 but host lacks avx2/fma/bmi2");
            return Isa::avx2;
        }
        // unrecognized value falls through to autodetect
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

} // namespace

Isa active_isa() {
    int v = g_isa.load(std::memory_order_acquire);
    if (v < 0) {
        v = int(resolve_from_env_or_cpu());
        g_isa.store(v, std::memory_order_release);
    }
    return Isa(v);
}

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !cpu_has_avx2())
        throw std::invalid_argument("avx2 kernels are not runnable on this host");
    g_isa.store(int(isa), std::memory_order_release);
}

void reset_isa() { g_isa.store(-1, std::memory_order_release); }

std::string isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace {
inline bool use_avx2() {
#if defined(PMSIM_HAVE_AVX2)
    return active_isa() == Isa::avx2;
#else
    return false;
#endif
}
} // namespace

void mixture_eval(const double* w, const double* c, std::size_t m,
                  double x0, double dx, double inv4s2,
                  double* out, std::size_t n) {
#if defined(PMSIM_HAVE_AVX2)
    if (use_avx2()) {
        mixture_eval_avx2(w, c, m, x0, dx, inv4s2, out, n);
        return;
    }
#endif
    mixture_eval_scalar(w, c, m, x0, dx, inv4s2, out, n);
}

double dot(const double* a, const double* b, std::size_t n) {
#if defined(PMSIM_HAVE_AVX2)
    if (use_avx2()) return dot_avx2(a, b, n);
#endif
    return dot_scalar(a, b, n);
}

double moment_sum(const double* v, std::size_t n, double x0, double dx, int order) {
#if defined(PMSIM_HAVE_AVX2)
    if (use_avx2()) return moment_sum_avx2(v, n, x0, dx, order);
#endif
    return moment_sum_scalar(v, n, x0, dx, order);
}

void dark_mask(std::uint64_t seed, std::uint64_t gate, std::uint32_t domain,
               std::uint32_t threshold, std::size_t n_pixels,
               std::uint32_t* out_words) {
#if defined(PMSIM_HAVE_AVX2)
    if (use_avx2()) {
        dark_mask_avx2(seed, gate, domain, threshold, n_pixels, out_words);
        return;
    }
#endif
    dark_mask_scalar(seed, gate, domain, threshold, n_pixels, out_words);
}

} // namespace pmsim::kernels
