#include "pmsim/analysis.hpp"
#include "pmsim/detector.hpp"
#include "pmsim/errors.hpp"
#include "pmsim/estimation.hpp"
#include "pmsim/evolution.hpp"
#include "pmsim/io.hpp"
#include "pmsim/kernels/dispatch.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> theta;
    std::optional<double> theta_protect;
    std::optional<int> k;
    std::optional<double> xi;
    std::optional<double> coupling;
    std::optional<double> sigma;
    std::optional<std::string> protection;
    std::optional<std::uint64_t> n_heralds;
    std::optional<int> workers;
    std::optional<double> dark_rate;
    std::optional<double> efficiency;
};

pmsim::io::ExperimentSpec resolve_spec(const Options& opt) {
    auto spec = opt.config_path.empty() ? pmsim::io::default_spec()
                                        : pmsim::io::load_spec(opt.config_path);
    if (opt.sigma) spec.protocol.sigma = *opt.sigma;
    if (opt.xi && opt.coupling)
        throw std::invalid_argument("give --xi or --g, not both");
    if (opt.xi) spec.protocol.coupling = *opt.xi * spec.protocol.sigma;
    if (opt.coupling) spec.protocol.coupling = *opt.coupling;
    if (opt.k) spec.protocol.n_cycles = *opt.k;
    if (opt.theta) {
        spec.protocol.theta_prep = *opt.theta;
        spec.protocol.theta_protect = *opt.theta;
    }
    if (opt.theta_protect) spec.protocol.theta_protect = *opt.theta_protect;
    if (opt.protection) spec.protocol.protection = (*opt.protection == "on");
    if (opt.seed) spec.detector.seed = *opt.seed;
    if (opt.n_heralds) spec.n_heralds = *opt.n_heralds;
    if (opt.workers) spec.detector.workers = *opt.workers;
    if (opt.dark_rate) spec.detector.dark_click_prob = *opt.dark_rate;
    if (opt.efficiency) spec.detector.efficiency = *opt.efficiency;
    return spec;
}

fs::path prepare_out_dir(const Options& opt) {
    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    return dir;
}

pmsim::estimation::Calibration calibration_of(const pmsim::io::ExperimentSpec& spec) {
    return {spec.detector.beam_center_col, spec.protocol.half_shift(), spec.detector.pitch};
}

json run_header(const pmsim::io::ExperimentSpec& spec) {
    json j = pmsim::io::spec_to_json(spec);
    j.erase("sweep");
    return j;
}

pmsim::qcore::Grid density_grid(const pmsim::evolution::ProtocolConfig& cfg) {
    const double half = cfg.half_shift() + 8.0 * cfg.sigma;
    const double step = cfg.sigma / 50.0;
    const auto half_n = std::size_t(std::ceil(half / step));
    return {-double(half_n) * step, step, 2 * half_n + 1};
}

int cmd_distribution(const Options& opt) {
    const auto spec = resolve_spec(opt);
    const auto dir = prepare_out_dir(opt);
    std::vector<bool> modes;
    if (opt.protection)
        modes.push_back(*opt.protection == "on");
    else
        modes = {true, false};

    json summary;
    for (bool prot : modes) {
        auto cfg = spec.protocol;
        cfg.protection = prot;
        const auto evo = pmsim::evolution::run_protocol(cfg);
        const auto grid = density_grid(cfg);
        const auto density = pmsim::evolution::detection_density(evo, grid);
        const std::string mode = prot ? "protected" : "unprotected";
        pmsim::io::write_density_csv(dir / ("density_" + mode + ".csv"), grid, density);

        const auto probs = pmsim::detector::pixel_click_probabilities(evo, spec.detector);
        pmsim::io::write_matrix_csv(dir / ("pixel_probabilities_" + mode + ".csv"), probs.prob,
                                    probs.rows, probs.cols);

        summary[mode] = {{"survival_probability", evo.survival},
                         {"axis_offset", evo.axis_offset},
                         {"centroid", pmsim::evolution::pointer_moment(evo, 1)},
                         {"u_x", pmsim::evolution::analytic_uncertainty_x(evo)},
                         {"u_p", pmsim::evolution::analytic_uncertainty_p(evo)},
                         {"click_probability_per_gate", probs.total}};
    }
    summary["config"] = run_header(spec);
    pmsim::io::write_text(dir / "distribution.json", summary.dump(2) + "\n");
    std::cout << "wrote density and pixel probability tables to " << dir.string() << "\n";
    return 0;
}

json estimates_json(const pmsim::io::ExperimentSpec& spec,
                    const pmsim::evolution::EvolutionResult& evo,
                    const pmsim::estimation::CorrectedCounts& corrected,
                    const pmsim::detector::DetectionEvent* first_click) {
    const auto cal = calibration_of(spec);
    json list = json::array();
    list.push_back(pmsim::io::estimate_to_json(
        pmsim::estimation::estimate_unprotected(corrected, cal)));
    list.push_back(pmsim::io::estimate_to_json(
        pmsim::estimation::estimate_protected_ensemble(corrected, cal)));
    if (first_click)
        list.push_back(pmsim::io::estimate_to_json(
            pmsim::estimation::estimate_single_click(*first_click, cal, evo)));
    json j;
    j["estimates"] = std::move(list);
    j["survival_probability"] = evo.survival;
    j["analytic"] = {{"expectation_p", pmsim::qcore::expectation_p(
                                           pmsim::qcore::make_linear_polarization(
                                               spec.protocol.theta_prep))},
                     {"u_x", pmsim::evolution::analytic_uncertainty_x(evo)},
                     {"u_p", pmsim::evolution::analytic_uncertainty_p(evo)}};
    j["config"] = run_header(spec);
    return j;
}

int cmd_run(const Options& opt) {
    const auto spec = resolve_spec(opt);
    const auto dir = prepare_out_dir(opt);
    const auto evo = pmsim::evolution::run_protocol(spec.protocol);
    const auto run = pmsim::detector::simulate_run(evo, spec.detector, spec.n_heralds);
    const auto dark = pmsim::detector::simulate_dark_run(spec.detector, spec.n_heralds);
    const auto corrected = pmsim::estimation::subtract_dark(run.counts, dark);

    pmsim::io::write_events_csv(dir / "events.csv", run.events);
    pmsim::io::write_counts_csv(dir / "counts.csv", run.counts);
    pmsim::io::write_counts_json(dir / "counts.json", run.counts);
    pmsim::io::write_counts_csv(dir / "dark_counts.csv", dark);
    pmsim::io::write_counts_json(dir / "dark_counts.json", dark);

    const pmsim::detector::DetectionEvent* first_click = nullptr;
    for (const auto& ev : run.events) {
        if (ev.is_click()) {
            first_click = &ev;
            break;
        }
    }
    const json j = estimates_json(spec, evo, corrected, first_click);
    pmsim::io::write_text(dir / "estimates.json", j.dump(2) + "\n");
    std::cout << "simulated " << spec.n_heralds << " gates, " << run.counts.total()
              << " clicks; outputs in " << dir.string() << "\n";
    return 0;
}

int cmd_sweep(const Options& opt) {
    const auto spec = resolve_spec(opt);
    const auto dir = prepare_out_dir(opt);
    const auto points = pmsim::analysis::sweep_r(spec.sweep, 1.0, spec.detector.workers);
    pmsim::io::write_sweep_csv(dir / "sweep.csv", points);
    pmsim::io::write_survival_csv(dir / "survival.csv", points);

    std::vector<int> ks(100);
    for (int i = 0; i < 100; ++i) ks[std::size_t(i)] = i + 1;
    const auto photons =
        pmsim::analysis::photons_needed(ks, spec.protocol.xi(), spec.protocol.theta_prep);
    pmsim::io::write_photons_csv(dir / "photons_needed.csv", photons);

    const std::vector<int> scaling_ks{16, 32, 64, 128};
    const double scaling_xi = 8.0;
    const double scaling_theta = std::numbers::pi / 4.0;
    const double exponent =
        pmsim::analysis::scaling_exponent(scaling_ks, scaling_xi, scaling_theta);
    const json j{{"k_values", scaling_ks}, {"xi", scaling_xi}, {"theta", scaling_theta},
                 {"exponent", exponent}};
    pmsim::io::write_text(dir / "scaling.json", j.dump(2) + "\n");
    std::cout << "swept " << points.size() << " grid points; outputs in " << dir.string() << "\n";
    return 0;
}

int cmd_dark_calibrate(const Options& opt, std::optional<std::uint64_t> n_gates) {
    const auto spec = resolve_spec(opt);
    const auto dir = prepare_out_dir(opt);
    const std::uint64_t gates = n_gates.value_or(spec.n_heralds);
    const auto dark = pmsim::detector::simulate_dark_run(spec.detector, gates);
    pmsim::io::write_counts_csv(dir / "dark_counts.csv", dark);
    pmsim::io::write_counts_json(dir / "dark_counts.json", dark);
    const double n_active = double(spec.detector.active_rows) * double(spec.detector.cols);
    const json j{{"gates", gates},
                 {"total_counts", dark.total()},
                 {"rate_per_pixel_per_gate", double(dark.total()) / (double(gates) * n_active)}};
    pmsim::io::write_text(dir / "dark_calibration.json", j.dump(2) + "\n");
    std::cout << "dark calibration over " << gates << " gates: " << dark.total()
              << " clicks; outputs in " << dir.string() << "\n";
    return 0;
}

int cmd_estimate(const Options& opt, const std::string& counts_path,
                 const std::string& dark_path, const std::string& events_path) {
    const auto spec = resolve_spec(opt);
    const auto dir = prepare_out_dir(opt);
    const auto counts = pmsim::io::read_counts_json(counts_path);
    pmsim::estimation::CorrectedCounts corrected;
    if (!dark_path.empty()) {
        const auto dark = pmsim::io::read_counts_json(dark_path);
        corrected = pmsim::estimation::subtract_dark(counts, dark);
    } else {
        corrected = pmsim::estimation::from_counts(counts);
    }
    const auto evo = pmsim::evolution::run_protocol(spec.protocol);

    pmsim::detector::DetectionEvent first_click;
    bool have_click = false;
    if (!events_path.empty()) {
        const auto records = pmsim::io::read_events_csv(events_path);
        if (!records.empty()) {
            // stored click records carry no provenance tag
            first_click = {records.front().gate, std::int16_t(records.front().col),
                           std::int16_t(records.front().row),
                           pmsim::detector::Provenance::photon};
            have_click = true;
        }
    }
    const json j = estimates_json(spec, evo, corrected, have_click ? &first_click : nullptr);
    pmsim::io::write_text(dir / "estimates.json", j.dump(2) + "\n");
    std::cout << "estimates written to " << (dir / "estimates.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-photon polarization pointer-protocol simulator"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out-dir", opt.out_dir, "output directory (created if missing)");
    app.add_option("--seed", opt.seed, "RNG seed");
    app.add_option("--theta", opt.theta, "preparation angle (rad), also sets the protection angle");
    app.add_option("--theta-protect", opt.theta_protect, "protection angle (rad)");
    app.add_option("--k", opt.k, "number of coupling cycles");
    app.add_option("--xi", opt.xi, "coupling strength g/sigma");
    app.add_option("--g", opt.coupling, "coupling shift per cycle (px)");
    app.add_option("--sigma", opt.sigma, "pointer width (px)");
    app.add_option("--protection", opt.protection, "protection projections on|off")
        ->check(CLI::IsMember({"on", "off"}));
    app.add_option("--n-heralds", opt.n_heralds, "number of heralded gates");
    app.add_option("--workers", opt.workers, "worker threads (0 = auto)");
    app.add_option("--dark-rate", opt.dark_rate, "dark click probability per pixel per gate");
    app.add_option("--efficiency", opt.efficiency, "photon detection efficiency");

    auto* dist = app.add_subcommand("distribution", "pointer distributions and pixel probabilities");
    auto* run = app.add_subcommand("run", "simulate an acquisition and estimate the polarization");
    auto* sweep = app.add_subcommand("sweep", "advantage-ratio and survival surfaces");
    auto* darkcal = app.add_subcommand("dark-calibrate", "dark-only calibration run");
    std::optional<std::uint64_t> dark_gates;
    darkcal->add_option("--n-gates", dark_gates, "gates in the calibration run");
    auto* est = app.add_subcommand("estimate", "estimators on recorded counts");
    std::string counts_path, dark_path, events_path;
    est->add_option("--counts", counts_path, "counts JSON")->required()->check(CLI::ExistingFile);
    est->add_option("--dark", dark_path, "dark counts JSON")->check(CLI::ExistingFile);
    est->add_option("--events", events_path, "events CSV")->check(CLI::ExistingFile);

    // global flags may appear after the subcommand name
    for (auto* sub : {dist, run, sweep, darkcal, est}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dist->parsed()) return cmd_distribution(opt);
        if (run->parsed()) return cmd_run(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (darkcal->parsed()) return cmd_dark_calibrate(opt, dark_gates);
        if (est->parsed()) return cmd_estimate(opt, counts_path, dark_path, events_path);
        return 2;
    } catch (const pmsim::numeric_range_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pmsim::insufficient_counts_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pmsim::domain_coverage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
