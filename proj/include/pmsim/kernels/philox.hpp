#pragma once

#include <array>
#include <cstdint>

namespace pmsim::kernels {

// Philox4x32-10, a counter-based generator. Stateless: every (key, counter)
// pair maps to four independent 32-bit words, so streams can be consumed in
// any order and from any worker partition with identical results.

struct PhiloxKey { std::uint32_t k0, k1; };
struct PhiloxCtr { std::uint32_t c0, c1, c2, c3; };

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> philox4x32(PhiloxCtr ctr, PhiloxKey key) {
    std::uint32_t c0 = ctr.c0, c1 = ctr.c1, c2 = ctr.c2, c3 = ctr.c3;
    std::uint32_t k0 = key.k0, k1 = key.k1;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * c0;
        const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * c2;
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        c0 = n0;
        c1 = lo1;
        c2 = n2;
        c3 = lo0;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {c0, c1, c2, c3};
}

inline PhiloxKey make_key(std::uint64_t seed) {
    return {std::uint32_t(seed), std::uint32_t(seed >> 32)};
}

// draw domains, kept disjoint so the streams never collide
inline constexpr std::uint32_t kDomainPhoton = 0;
inline constexpr std::uint32_t kDomainRunDark = 1;
inline constexpr std::uint32_t kDomainCalibrationDark = 2;

// one 53-bit uniform in [0, 1) from lanes 0..1 of the gate's counter block
inline double uniform53(std::uint64_t seed, std::uint64_t gate, std::uint32_t domain) {
    const auto w = philox4x32(
        {std::uint32_t(gate), std::uint32_t(gate >> 32), 0u, domain}, make_key(seed));
    const std::uint64_t bits = (std::uint64_t(w[0]) << 32) | w[1];
    return double(bits >> 11) * 0x1.0p-53;
}

} // namespace pmsim::kernels
