#pragma once

#include "pmsim/analysis.hpp"
#include "pmsim/detector.hpp"
#include "pmsim/estimation.hpp"
#include "pmsim/evolution.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace pmsim::io {

// shortest representation that parses back to the identical double
std::string format_double(double v);

// plain integer matrix, one CSV line per detector row
void write_counts_csv(const std::filesystem::path& path, const detector::CountsMap& map);
detector::CountsMap read_counts_csv(const std::filesystem::path& path, std::uint64_t gates = 0);

// {"rows", "cols", "gates", "counts"} with counts as nested arrays
void write_counts_json(const std::filesystem::path& path, const detector::CountsMap& map);
detector::CountsMap read_counts_json(const std::filesystem::path& path);

// header gate,col,row; click records only
void write_events_csv(const std::filesystem::path& path,
                      const std::vector<detector::DetectionEvent>& events);
struct ClickRecord {
    std::uint64_t gate = 0;
    int col = -1;
    int row = -1;
};
std::vector<ClickRecord> read_events_csv(const std::filesystem::path& path);

// header x,density
void write_density_csv(const std::filesystem::path& path, const qcore::Grid& grid,
                       const std::vector<double>& density);
struct DensityTable {
    std::vector<double> x;
    std::vector<double> density;
};
DensityTable read_density_csv(const std::filesystem::path& path);

// plain double matrix, one CSV line per row
void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& values,
                      int rows, int cols);

// header K,xi,cos2theta,p_sur,u_p,u_pbs,R; flagged points carry nan fields
void write_sweep_csv(const std::filesystem::path& path, const std::vector<analysis::RPoint>& points);
std::vector<analysis::RPoint> read_sweep_csv(const std::filesystem::path& path);

// header K,xi,cos2theta,p_sur
void write_survival_csv(const std::filesystem::path& path,
                        const std::vector<analysis::RPoint>& points);

// header K,photons_needed
void write_photons_csv(const std::filesystem::path& path,
                       const std::vector<std::pair<int, double>>& rows);
std::vector<std::pair<int, double>> read_photons_csv(const std::filesystem::path& path);

nlohmann::json estimate_to_json(const estimation::Estimate& e);
estimation::Estimate estimate_from_json(const nlohmann::json& j);

// one experiment = protocol + detector + acquisition size + sweep grids
struct ExperimentSpec {
    evolution::ProtocolConfig protocol;
    detector::DetectorConfig detector;
    std::uint64_t n_heralds = 20000;
    analysis::SweepGrid sweep;
};

ExperimentSpec default_spec();

// overlay a JSON config file onto the defaults; unknown keys are ignored,
// malformed values throw std::invalid_argument
ExperimentSpec load_spec(const std::filesystem::path& config_path);
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace pmsim::io
