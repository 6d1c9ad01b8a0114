#include "pmsim/io.hpp"

#include "pmsim/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pmsim::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw std::invalid_argument("bad numeric field: '" + s + "'");
    return v;
}

long long parse_int(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(begin, &end, 10);
    if (end == begin) throw std::invalid_argument("bad integer field: '" + s + "'");
    return v;
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void expect_header(const std::vector<std::string>& lines, const std::string& header,
                   const std::filesystem::path& path) {
    if (lines.empty() || lines.front() != header)
        throw std::invalid_argument(path.string() + ": expected header '" + header + "'");
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::invalid_argument("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_counts_csv(const std::filesystem::path& path, const detector::CountsMap& map) {
    std::ostringstream out;
    for (int row = 0; row < map.rows; ++row) {
        for (int col = 0; col < map.cols; ++col) {
            if (col) out << ',';
            out << map.at(row, col);
        }
        out << '\n';
    }
    write_text(path, out.str());
}

detector::CountsMap read_counts_csv(const std::filesystem::path& path, std::uint64_t gates) {
    const auto lines = data_lines(read_text(path));
    if (lines.empty()) throw std::invalid_argument(path.string() + ": empty counts matrix");
    detector::CountsMap map;
    map.rows = int(lines.size());
    map.gates = gates;
    for (const auto& line : lines) {
        const auto fields = split_line(line);
        if (map.cols == 0)
            map.cols = int(fields.size());
        else if (int(fields.size()) != map.cols)
            throw std::invalid_argument(path.string() + ": ragged counts matrix");
        for (const auto& f : fields) {
            const long long v = parse_int(f);
            if (v < 0) throw std::invalid_argument(path.string() + ": negative count");
            map.counts.push_back(std::uint64_t(v));
        }
    }
    return map;
}

void write_counts_json(const std::filesystem::path& path, const detector::CountsMap& map) {
    nlohmann::json rows = nlohmann::json::array();
    for (int row = 0; row < map.rows; ++row) {
        nlohmann::json r = nlohmann::json::array();
        for (int col = 0; col < map.cols; ++col) r.push_back(map.at(row, col));
        rows.push_back(std::move(r));
    }
    const nlohmann::json j{{"rows", map.rows}, {"cols", map.cols}, {"gates", map.gates},
                           {"counts", std::move(rows)}};
    write_text(path, j.dump(2) + "\n");
}

detector::CountsMap read_counts_json(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    detector::CountsMap map;
    try {
        map.rows = j.at("rows").get<int>();
        map.cols = j.at("cols").get<int>();
        map.gates = j.at("gates").get<std::uint64_t>();
        const auto& rows = j.at("counts");
        if (int(rows.size()) != map.rows)
            throw std::invalid_argument("row count mismatch");
        for (const auto& r : rows) {
            if (int(r.size()) != map.cols)
                throw std::invalid_argument("column count mismatch");
            for (const auto& v : r) map.counts.push_back(v.get<std::uint64_t>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    return map;
}

void write_events_csv(const std::filesystem::path& path,
                      const std::vector<detector::DetectionEvent>& events) {
    std::ostringstream out;
    out << "gate,col,row\n";
    for (const auto& ev : events) {
        if (!ev.is_click()) continue;
        out << ev.gate << ',' << ev.col << ',' << ev.row << '\n';
    }
    write_text(path, out.str());
}

std::vector<ClickRecord> read_events_csv(const std::filesystem::path& path) {
    const auto lines = data_lines(read_text(path));
    expect_header(lines, "gate,col,row", path);
    std::vector<ClickRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_line(lines[i]);
        if (fields.size() != 3)
            throw std::invalid_argument(path.string() + ": expected 3 fields per event");
        records.push_back({std::uint64_t(parse_int(fields[0])), int(parse_int(fields[1])),
                           int(parse_int(fields[2]))});
    }
    return records;
}

void write_density_csv(const std::filesystem::path& path, const qcore::Grid& grid,
                       const std::vector<double>& density) {
    if (density.size() != grid.n)
        throw std::invalid_argument("write_density_csv: grid/value size mismatch");
    std::ostringstream out;
    out << "x,density\n";
    for (std::size_t i = 0; i < grid.n; ++i)
        out << format_double(grid.x(i)) << ',' << format_double(density[i]) << '\n';
    write_text(path, out.str());
}

DensityTable read_density_csv(const std::filesystem::path& path) {
    const auto lines = data_lines(read_text(path));
    expect_header(lines, "x,density", path);
    DensityTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_line(lines[i]);
        if (fields.size() != 2)
            throw std::invalid_argument(path.string() + ": expected 2 fields per density row");
        table.x.push_back(parse_double(fields[0]));
        table.density.push_back(parse_double(fields[1]));
    }
    return table;
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& values,
                      int rows, int cols) {
    if (values.size() != std::size_t(rows) * std::size_t(cols))
        throw std::invalid_argument("write_matrix_csv: size mismatch");
    std::ostringstream out;
    for (int row = 0; row < rows; ++row) {
        for (int col = 0; col < cols; ++col) {
            if (col) out << ',';
            out << format_double(values[std::size_t(row) * std::size_t(cols) + std::size_t(col)]);
        }
        out << '\n';
    }
    write_text(path, out.str());
}

namespace {

void write_surface_csv(const std::filesystem::path& path,
                       const std::vector<analysis::RPoint>& points, bool full) {
    std::ostringstream out;
    out << (full ? "K,xi,cos2theta,p_sur,u_p,u_pbs,R" : "K,xi,cos2theta,p_sur") << '\n';
    for (const auto& pt : points) {
        out << pt.k << ',' << format_double(pt.xi) << ',' << format_double(pt.cos2theta) << ','
            << format_double(pt.p_sur);
        if (full)
            out << ',' << format_double(pt.u_p) << ',' << format_double(pt.u_pbs) << ','
                << format_double(pt.r);
        out << '\n';
    }
    write_text(path, out.str());
}

} // namespace

void write_sweep_csv(const std::filesystem::path& path, const std::vector<analysis::RPoint>& points) {
    write_surface_csv(path, points, true);
}

std::vector<analysis::RPoint> read_sweep_csv(const std::filesystem::path& path) {
    const auto lines = data_lines(read_text(path));
    expect_header(lines, "K,xi,cos2theta,p_sur,u_p,u_pbs,R", path);
    std::vector<analysis::RPoint> points;
    points.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_line(lines[i]);
        if (fields.size() != 7)
            throw std::invalid_argument(path.string() + ": expected 7 fields per sweep row");
        analysis::RPoint pt;
        pt.k = int(parse_int(fields[0]));
        pt.xi = parse_double(fields[1]);
        pt.cos2theta = parse_double(fields[2]);
        pt.p_sur = parse_double(fields[3]);
        pt.u_p = parse_double(fields[4]);
        pt.u_pbs = parse_double(fields[5]);
        pt.r = parse_double(fields[6]);
        pt.status = std::isfinite(pt.r) ? analysis::PointStatus::ok
                                        : analysis::PointStatus::degenerate;
        points.push_back(pt);
    }
    return points;
}

void write_survival_csv(const std::filesystem::path& path,
                        const std::vector<analysis::RPoint>& points) {
    write_surface_csv(path, points, false);
}

void write_photons_csv(const std::filesystem::path& path,
                       const std::vector<std::pair<int, double>>& rows) {
    std::ostringstream out;
    out << "K,photons_needed\n";
    for (const auto& [k, m] : rows) out << k << ',' << format_double(m) << '\n';
    write_text(path, out.str());
}

std::vector<std::pair<int, double>> read_photons_csv(const std::filesystem::path& path) {
    const auto lines = data_lines(read_text(path));
    expect_header(lines, "K,photons_needed", path);
    std::vector<std::pair<int, double>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_line(lines[i]);
        if (fields.size() != 2)
            throw std::invalid_argument(path.string() + ": expected 2 fields per row");
        rows.emplace_back(int(parse_int(fields[0])), parse_double(fields[1]));
    }
    return rows;
}

nlohmann::json estimate_to_json(const estimation::Estimate& e) {
    return {{"method", e.method}, {"value", e.value}, {"uncertainty", e.uncertainty},
            {"n_used", e.n_used}};
}

estimation::Estimate estimate_from_json(const nlohmann::json& j) {
    estimation::Estimate e;
    try {
        e.method = j.at("method").get<std::string>();
        e.value = j.at("value").get<double>();
        e.uncertainty = j.at("uncertainty").get<double>();
        e.n_used = j.at("n_used").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& ex) {
        throw std::invalid_argument(std::string("bad estimate json: ") + ex.what());
    }
    return e;
}

ExperimentSpec default_spec() {
    ExperimentSpec spec;
    spec.sweep.k_values = {7, 100};
    spec.sweep.xi_values.push_back(0.02);
    for (int i = 1; i <= 60; ++i) spec.sweep.xi_values.push_back(0.1 * double(i));
    for (int i = 1; i <= 49; ++i) spec.sweep.cos2theta_values.push_back(0.02 * double(i));
    return spec;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
    ExperimentSpec spec = default_spec();
    try {
        if (j.contains("protocol")) {
            const auto& p = j.at("protocol");
            auto& cfg = spec.protocol;
            cfg.n_cycles = p.value("n_cycles", cfg.n_cycles);
            cfg.sigma = p.value("sigma", cfg.sigma);
            if (p.contains("xi") && p.contains("coupling"))
                throw std::invalid_argument("protocol: give coupling or xi, not both");
            if (p.contains("xi"))
                cfg.coupling = p.at("xi").get<double>() * cfg.sigma;
            else
                cfg.coupling = p.value("coupling", cfg.coupling);
            cfg.theta_prep = p.value("theta_prep", cfg.theta_prep);
            cfg.theta_protect = p.contains("theta_protect") ? p.at("theta_protect").get<double>()
                                                            : cfg.theta_prep;
            cfg.protection = p.value("protection", cfg.protection);
        }
        if (j.contains("detector")) {
            const auto& d = j.at("detector");
            auto& cfg = spec.detector;
            cfg.cols = d.value("cols", cfg.cols);
            cfg.rows = d.value("rows", cfg.rows);
            cfg.active_rows = d.value("active_rows", cfg.active_rows);
            cfg.pitch = d.value("pitch", cfg.pitch);
            cfg.beam_center_col = d.value("beam_center_col", cfg.beam_center_col);
            cfg.beam_center_row = d.value("beam_center_row", cfg.beam_center_row);
            cfg.dark_click_prob = d.value("dark_click_prob", cfg.dark_click_prob);
            cfg.efficiency = d.value("efficiency", cfg.efficiency);
            cfg.seed = d.value("seed", cfg.seed);
            cfg.workers = d.value("workers", cfg.workers);
        }
        if (j.contains("run")) {
            const auto& r = j.at("run");
            spec.n_heralds = r.value("n_heralds", spec.n_heralds);
            spec.detector.seed = r.value("seed", spec.detector.seed);
        }
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            if (s.contains("k_values"))
                spec.sweep.k_values = s.at("k_values").get<std::vector<int>>();
            if (s.contains("xi_values"))
                spec.sweep.xi_values = s.at("xi_values").get<std::vector<double>>();
            if (s.contains("cos2theta_values"))
                spec.sweep.cos2theta_values = s.at("cos2theta_values").get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& config_path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(config_path));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(config_path.string() + ": " + e.what());
    }
    return spec_from_json(j);
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
    return {
        {"protocol",
         {{"n_cycles", spec.protocol.n_cycles},
          {"coupling", spec.protocol.coupling},
          {"sigma", spec.protocol.sigma},
          {"theta_prep", spec.protocol.theta_prep},
          {"theta_protect", spec.protocol.theta_protect},
          {"protection", spec.protocol.protection}}},
        {"detector",
         {{"cols", spec.detector.cols},
          {"rows", spec.detector.rows},
          {"active_rows", spec.detector.active_rows},
          {"pitch", spec.detector.pitch},
          {"beam_center_col", spec.detector.beam_center_col},
          {"beam_center_row", spec.detector.beam_center_row},
          {"dark_click_prob", spec.detector.dark_click_prob},
          {"efficiency", spec.detector.efficiency},
          {"seed", spec.detector.seed},
          {"workers", spec.detector.workers}}},
        {"run", {{"n_heralds", spec.n_heralds}, {"seed", spec.detector.seed}}},
        {"sweep",
         {{"k_values", spec.sweep.k_values},
          {"xi_values", spec.sweep.xi_values},
          {"cos2theta_values", spec.sweep.cos2theta_values}}}};
}

} // namespace pmsim::io
