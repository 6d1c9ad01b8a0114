#pragma once

#include "pmsim/evolution.hpp"

#include <cstdint>
#include <vector>

namespace pmsim::detector {

struct DetectorConfig {
    int cols = 32;
    int rows = 32;
    int active_rows = 20;          // centered readout band
    double pitch = 1.0;            // pixel size (px); pixel c spans [c*pitch, (c+1)*pitch)
    double beam_center_col = 16.0; // beam axis, px from the left array edge
    double beam_center_row = 16.0; // beam axis, px from the top array edge
    double dark_click_prob = 5e-5; // per pixel per gate
    double efficiency = 1.0;       // photon detection efficiency, 0 is legal
    std::uint64_t seed = 1;
    int workers = 0;               // 0 = hardware concurrency
};

struct PixelProbabilities {
    int cols = 0;
    int rows = 0;
    int active_row_begin = 0;
    int active_row_end = 0;        // one past the last active row
    std::vector<double> prob;      // rows x cols row-major, zero outside the band
    double total = 0.0;            // photon click probability per heralded gate
};

// per-gate photon click probability for every pixel: efficiency times the
// exact Gaussian mass of the detection density over the pixel's column
// interval times the vertical beam profile mass over its row interval
PixelProbabilities pixel_click_probabilities(const evolution::EvolutionResult& r,
                                             const DetectorConfig& cfg);

enum class Provenance : std::uint8_t { none = 0, photon = 1, dark = 2 };

struct DetectionEvent {
    std::uint64_t gate = 0;
    std::int16_t col = -1;   // -1 when no click in the gate
    std::int16_t row = -1;
    Provenance provenance = Provenance::none;

    bool is_click() const { return provenance != Provenance::none; }
};

struct CountsMap {
    int cols = 0;
    int rows = 0;
    std::uint64_t gates = 0;
    std::vector<std::uint64_t> counts; // rows x cols row-major

    std::uint64_t& at(int row, int col) { return counts[std::size_t(row) * std::size_t(cols) + std::size_t(col)]; }
    std::uint64_t at(int row, int col) const { return counts[std::size_t(row) * std::size_t(cols) + std::size_t(col)]; }
    std::uint64_t total() const;
};

struct RunResult {
    std::vector<DetectionEvent> events; // ordered by gate; >= 1 record per gate
    CountsMap counts;
};

// gated acquisition: per gate at most one photon click (drawn from the pixel
// probabilities) plus independent dark clicks on every active pixel.
// Deterministic in (seed, n_gates) for any worker count.
RunResult simulate_run(const evolution::EvolutionResult& r, const DetectorConfig& cfg,
                       std::uint64_t n_gates);

// dark-only acquisition on an independent stream, for calibration
CountsMap simulate_dark_run(const DetectorConfig& cfg, std::uint64_t n_gates);

} // namespace pmsim::detector
