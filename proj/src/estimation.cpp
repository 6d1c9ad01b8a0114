#include "pmsim/estimation.hpp"

#include "pmsim/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pmsim::estimation {

namespace {

void validate(const Calibration& cal) {
    if (!std::isfinite(cal.center_col) || !std::isfinite(cal.half_shift))
        throw std::invalid_argument("Calibration: center and half shift must be finite");
    if (!(cal.pitch > 0.0)) throw std::invalid_argument("Calibration: pitch must be > 0");
    if (!(cal.half_shift > 0.0))
        throw numeric_range_error("Calibration: zero half shift, polarization not identifiable");
}

std::vector<double> column_totals(const CorrectedCounts& c) {
    std::vector<double> cols(std::size_t(c.cols), 0.0);
    for (int row = 0; row < c.rows; ++row)
        for (int col = 0; col < c.cols; ++col) cols[std::size_t(col)] += c.at(row, col);
    return cols;
}

std::uint64_t rounded_n(double n) {
    return n <= 0.0 ? 0 : std::uint64_t(std::llround(n));
}

} // namespace

double CorrectedCounts::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0.0);
}

CorrectedCounts from_counts(const detector::CountsMap& run) {
    CorrectedCounts c;
    c.cols = run.cols;
    c.rows = run.rows;
    c.gates = double(run.gates);
    c.counts.assign(run.counts.begin(), run.counts.end());
    return c;
}

CorrectedCounts subtract_dark(const detector::CountsMap& run, const detector::CountsMap& dark) {
    if (run.cols != dark.cols || run.rows != dark.rows)
        throw std::invalid_argument("subtract_dark: geometry mismatch");
    if (dark.gates == 0) throw std::invalid_argument("subtract_dark: dark run has zero gates");
    const double scale = double(run.gates) / double(dark.gates);
    CorrectedCounts c = from_counts(run);
    for (std::size_t i = 0; i < c.counts.size(); ++i)
        c.counts[i] -= scale * double(dark.counts[i]);
    return c;
}

Estimate estimate_unprotected(const CorrectedCounts& c, const Calibration& cal) {
    validate(cal);
    const auto cols = column_totals(c);
    double n_right = 0.0, n_left = 0.0;
    for (int col = 0; col < c.cols; ++col) {
        const double lo = double(col) * cal.pitch;
        const double hi = lo + cal.pitch;
        const double w = cols[std::size_t(col)];
        if (hi <= cal.center_col) {
            n_left += w;
        } else if (lo >= cal.center_col) {
            n_right += w;
        } else {
            const double right_frac = (hi - cal.center_col) / cal.pitch;
            n_right += w * right_frac;
            n_left += w * (1.0 - right_frac);
        }
    }
    const double n = n_right + n_left;
    if (!(n > 0.0)) throw insufficient_counts_error("estimate_unprotected: no counts");
    const double value = (n_right - n_left) / n;
    const double var = std::max(0.0, 1.0 - value * value);
    return {"unprotected_ratio", value, std::sqrt(var / n), rounded_n(n)};
}

Estimate estimate_protected_ensemble(const CorrectedCounts& c, const Calibration& cal) {
    validate(cal);
    const auto cols = column_totals(c);
    double n = 0.0, sum = 0.0, sum2 = 0.0;
    for (int col = 0; col < c.cols; ++col) {
        const double x = (double(col) + 0.5) * cal.pitch - cal.center_col;
        const double w = cols[std::size_t(col)];
        n += w;
        sum += w * x;
        sum2 += w * x * x;
    }
    if (!(n > 0.0)) throw insufficient_counts_error("estimate_protected_ensemble: no counts");
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    const double value = mean / cal.half_shift;
    const double uncertainty = std::sqrt(var / n) / cal.half_shift;
    return {"protected_ensemble", value, uncertainty, rounded_n(n)};
}

Estimate estimate_single_click(const detector::DetectionEvent& ev, const Calibration& cal,
                               const evolution::EvolutionResult& r) {
    validate(cal);
    if (!ev.is_click())
        throw std::invalid_argument("estimate_single_click: event carries no click");
    const double x = (double(ev.col) + 0.5) * cal.pitch - cal.center_col;
    return {"single_click", x / cal.half_shift, evolution::analytic_uncertainty_p(r), 1};
}

} // namespace pmsim::estimation
