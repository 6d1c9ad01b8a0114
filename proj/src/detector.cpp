#include "pmsim/detector.hpp"

#include "pmsim/errors.hpp"
#include "pmsim/kernels/kernels.hpp"
#include "pmsim/kernels/philox.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pmsim::detector {

namespace {

void validate(const DetectorConfig& cfg) {
    if (cfg.cols < 1 || cfg.rows < 1)
        throw std::invalid_argument("DetectorConfig: cols and rows must be >= 1");
    if (cfg.active_rows < 1 || cfg.active_rows > cfg.rows)
        throw std::invalid_argument("DetectorConfig: active_rows must be in [1, rows]");
    if (!(cfg.pitch > 0.0) || !std::isfinite(cfg.pitch))
        throw std::invalid_argument("DetectorConfig: pitch must be finite and > 0");
    if (!(cfg.dark_click_prob >= 0.0) || !(cfg.dark_click_prob < 1.0))
        throw std::invalid_argument("DetectorConfig: dark_click_prob must be in [0, 1)");
    if (!(cfg.efficiency >= 0.0) || !(cfg.efficiency <= 1.0))
        throw std::invalid_argument("DetectorConfig: efficiency must be in [0, 1]");
    if (cfg.workers < 0)
        throw std::invalid_argument("DetectorConfig: workers must be >= 0");
    if (!(cfg.beam_center_col >= 0.0) || !(cfg.beam_center_col <= cfg.pitch * cfg.cols) ||
        !(cfg.beam_center_row >= 0.0) || !(cfg.beam_center_row <= cfg.pitch * cfg.rows))
        throw domain_coverage_error("DetectorConfig: beam center lies outside the array");
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// mass of N(mean, sigma^2) over [lo, hi]
inline double gaussian_mass(double mean, double sigma, double lo, double hi) {
    return normal_cdf((hi - mean) / sigma) - normal_cdf((lo - mean) / sigma);
}

int resolve_workers(int requested, std::uint64_t n_gates) {
    unsigned w = requested > 0 ? unsigned(requested)
                               : std::max(1u, std::thread::hardware_concurrency());
    if (std::uint64_t(w) > n_gates) w = unsigned(n_gates);
    return int(std::max(1u, w));
}

} // namespace

std::uint64_t CountsMap::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t(0));
}

PixelProbabilities pixel_click_probabilities(const evolution::EvolutionResult& r,
                                             const DetectorConfig& cfg) {
    validate(cfg);
    const double sigma = r.final_state.h.sigma();

    PixelProbabilities out;
    out.cols = cfg.cols;
    out.rows = cfg.rows;
    out.active_row_begin = (cfg.rows - cfg.active_rows) / 2;
    out.active_row_end = out.active_row_begin + cfg.active_rows;
    out.prob.assign(std::size_t(cfg.rows) * std::size_t(cfg.cols), 0.0);

    // column masses of the (survival-weighted) detection density; the pointer
    // coordinate x = 0 is glued to the beam axis
    const auto terms = evolution::density_terms(r.final_state);
    std::vector<double> col_mass(std::size_t(cfg.cols), 0.0);
    for (int c = 0; c < cfg.cols; ++c) {
        const double lo = double(c) * cfg.pitch - cfg.beam_center_col;
        const double hi = lo + cfg.pitch;
        double acc = 0.0;
        for (const auto& t : terms) acc += t.weight * gaussian_mass(t.mean, sigma, lo, hi);
        col_mass[std::size_t(c)] = acc;
    }

    // vertical beam profile, one Gaussian of the same width on the beam row
    std::vector<double> row_mass(std::size_t(cfg.rows), 0.0);
    for (int row = out.active_row_begin; row < out.active_row_end; ++row) {
        const double lo = double(row) * cfg.pitch - cfg.beam_center_row;
        row_mass[std::size_t(row)] = gaussian_mass(0.0, sigma, lo, lo + cfg.pitch);
    }

    double total = 0.0;
    for (int row = out.active_row_begin; row < out.active_row_end; ++row) {
        for (int c = 0; c < cfg.cols; ++c) {
            const double p = cfg.efficiency * col_mass[std::size_t(c)] * row_mass[std::size_t(row)];
            out.prob[std::size_t(row) * std::size_t(cfg.cols) + std::size_t(c)] = p;
            total += p;
        }
    }
    if (total > 1.0 + 1e-9)
        throw numeric_range_error("pixel_click_probabilities: total exceeds 1");
    out.total = total;
    return out;
}

namespace {

struct GateRangeOutput {
    std::vector<DetectionEvent> events;
    std::vector<std::uint64_t> counts;
};

// shared per-run tables, built once and read by every worker
struct RunTables {
    std::vector<double> cdf;     // prefix sums over active pixels, row-major in band
    int cols = 0;
    int active_row_begin = 0;
    std::size_t n_active = 0;
    std::uint32_t dark_threshold = 0;
    std::uint64_t seed = 0;
};

void simulate_gates(const RunTables& t, std::uint64_t gate_begin, std::uint64_t gate_end,
                    bool with_photon, std::uint32_t dark_domain, bool keep_events,
                    GateRangeOutput& out) {
    const std::size_t n_words = (t.n_active + 31) / 32;
    std::vector<std::uint32_t> words(n_words);
    const double total_p = t.cdf.empty() ? 0.0 : t.cdf.back();
    for (std::uint64_t gate = gate_begin; gate < gate_end; ++gate) {
        bool any = false;
        if (with_photon) {
            const double u = kernels::uniform53(t.seed, gate, kernels::kDomainPhoton);
            if (u < total_p) {
                const auto it = std::upper_bound(t.cdf.begin(), t.cdf.end(), u);
                const auto flat = std::size_t(it - t.cdf.begin());
                const int row = t.active_row_begin + int(flat) / t.cols;
                const int col = int(flat) % t.cols;
                ++out.counts[std::size_t(row) * std::size_t(t.cols) + std::size_t(col)];
                if (keep_events)
                    out.events.push_back({gate, std::int16_t(col), std::int16_t(row), Provenance::photon});
                any = true;
            }
        }
        if (t.dark_threshold != 0) {
            kernels::dark_mask(t.seed, gate, dark_domain, t.dark_threshold, t.n_active, words.data());
            for (std::size_t w = 0; w < n_words; ++w) {
                std::uint32_t bits = words[w];
                while (bits) {
                    const int b = std::countr_zero(bits);
                    bits &= bits - 1;
                    const std::size_t flat = 32 * w + std::size_t(b);
                    const int row = t.active_row_begin + int(flat) / t.cols;
                    const int col = int(flat) % t.cols;
                    ++out.counts[std::size_t(row) * std::size_t(t.cols) + std::size_t(col)];
                    if (keep_events)
                        out.events.push_back({gate, std::int16_t(col), std::int16_t(row), Provenance::dark});
                    any = true;
                }
            }
        }
        if (keep_events && !any) out.events.push_back({gate, -1, -1, Provenance::none});
    }
}

CountsMap run_partitioned(const DetectorConfig& cfg, const RunTables& tables,
                          std::uint64_t n_gates, bool with_photon, std::uint32_t dark_domain,
                          bool keep_events, std::vector<DetectionEvent>* events_out) {
    const int workers = resolve_workers(cfg.workers, n_gates);
    const std::uint64_t chunk = (n_gates + std::uint64_t(workers) - 1) / std::uint64_t(workers);
    std::vector<GateRangeOutput> parts(static_cast<std::size_t>(workers));
    const std::size_t map_size = std::size_t(cfg.rows) * std::size_t(cfg.cols);
    for (auto& p : parts) p.counts.assign(map_size, 0);

    auto body = [&](int w) {
        const std::uint64_t begin = std::uint64_t(w) * chunk;
        const std::uint64_t end = std::min(n_gates, begin + chunk);
        if (begin < end)
            simulate_gates(tables, begin, end, with_photon, dark_domain, keep_events,
                           parts[std::size_t(w)]);
    };
    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
        for (auto& th : pool) th.join();
    }

    CountsMap map;
    map.cols = cfg.cols;
    map.rows = cfg.rows;
    map.gates = n_gates;
    map.counts.assign(map_size, 0);
    std::size_t n_events = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < map_size; ++i) map.counts[i] += p.counts[i];
        n_events += p.events.size();
    }
    if (events_out) {
        events_out->clear();
        events_out->reserve(n_events);
        for (auto& p : parts)
            events_out->insert(events_out->end(), p.events.begin(), p.events.end());
    }
    return map;
}

RunTables build_tables(const DetectorConfig& cfg, const PixelProbabilities* probs) {
    RunTables t;
    t.cols = cfg.cols;
    t.seed = cfg.seed;
    t.dark_threshold = kernels::bernoulli_threshold(cfg.dark_click_prob);
    const int band_begin = (cfg.rows - cfg.active_rows) / 2;
    t.active_row_begin = band_begin;
    t.n_active = std::size_t(cfg.active_rows) * std::size_t(cfg.cols);
    if (probs) {
        t.cdf.resize(t.n_active);
        double acc = 0.0;
        for (std::size_t flat = 0; flat < t.n_active; ++flat) {
            const std::size_t row = std::size_t(band_begin) + flat / std::size_t(cfg.cols);
            acc += probs->prob[row * std::size_t(cfg.cols) + flat % std::size_t(cfg.cols)];
            t.cdf[flat] = acc;
        }
    }
    return t;
}

} // namespace

RunResult simulate_run(const evolution::EvolutionResult& r, const DetectorConfig& cfg,
                       std::uint64_t n_gates) {
    if (n_gates < 1) throw std::invalid_argument("simulate_run: n_gates must be >= 1");
    const auto probs = pixel_click_probabilities(r, cfg); // also validates cfg
    const auto tables = build_tables(cfg, &probs);
    RunResult result;
    result.counts = run_partitioned(cfg, tables, n_gates, true, kernels::kDomainRunDark,
                                    true, &result.events);
    return result;
}

CountsMap simulate_dark_run(const DetectorConfig& cfg, std::uint64_t n_gates) {
    validate(cfg);
    if (n_gates < 1) throw std::invalid_argument("simulate_dark_run: n_gates must be >= 1");
    const auto tables = build_tables(cfg, nullptr);
    return run_partitioned(cfg, tables, n_gates, false, kernels::kDomainCalibrationDark,
                           false, nullptr);
}

} // namespace pmsim::detector
