#pragma once

#include "pmsim/detector.hpp"
#include "pmsim/evolution.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pmsim::estimation {

struct Calibration {
    double center_col = 16.0; // beam axis, px from the left array edge
    double half_shift = 5.81; // a = K g / 2, full scale for P = +/- 1 (px)
    double pitch = 1.0;
};

struct Estimate {
    std::string method;
    double value = 0.0;
    double uncertainty = 0.0;
    std::uint64_t n_used = 0;
};

// counts after dark subtraction; entries may go negative
struct CorrectedCounts {
    int cols = 0;
    int rows = 0;
    double gates = 0.0;
    std::vector<double> counts; // rows x cols row-major

    double at(int row, int col) const { return counts[std::size_t(row) * std::size_t(cols) + std::size_t(col)]; }
    double total() const;
};

CorrectedCounts from_counts(const detector::CountsMap& run);

// run - dark * (run.gates / dark.gates), geometry must match
CorrectedCounts subtract_dark(const detector::CountsMap& run, const detector::CountsMap& dark);

// sign estimator (N_right - N_left) / N against the calibration axis; a
// column straddling the axis is split proportionally
Estimate estimate_unprotected(const CorrectedCounts& c, const Calibration& cal);

// centroid of the column marginal divided by the half shift
Estimate estimate_protected_ensemble(const CorrectedCounts& c, const Calibration& cal);

// one click, one value: pixel-center offset over the half shift, with the
// analytic pointer spread as the uncertainty
Estimate estimate_single_click(const detector::DetectionEvent& ev, const Calibration& cal,
                               const evolution::EvolutionResult& r);

} // namespace pmsim::estimation
