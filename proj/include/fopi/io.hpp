#pragma once

#include "fopi/config.hpp"
#include "fopi/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace fopi {

namespace fs = std::filesystem;

/// Short label used in file names ("0.2", "1", "1.4").
std::string chi_label(double chi);

/// Columns chi,k_p,k_i,lambda,J1,J2,J1_display.
void write_front_csv(double chi, const ParetoFront& front, std::ostream& out);
ChiFront read_front_csv(const fs::path& path);

fs::path front_path(const fs::path& dir, double chi);
fs::path trajectory_path(const fs::path& dir, double chi);

/// Settings, seeds and tool version; enough to reproduce the run.
nlohmann::ordered_json make_manifest(const std::string& command, const RunConfig& cfg);
void write_json(const fs::path& path, const nlohmann::ordered_json& j);
void write_text(const fs::path& path, const std::string& text);

/// Region point closest to the ideal corner after normalizing each objective
/// by its range inside the region.
std::optional<FrontRecord> representative_point(const ChiFront& f);

/// Writes the per-chi front CSVs and representative trajectories of a sweep,
/// then the report.
void write_sweep_outputs(const fs::path& dir, const RunConfig& cfg, const SweepResult& result);

/// Rebuilds summary.csv, summary.txt and the plot files from the manifest and
/// front CSVs in dir. Returns the recomputed result.
SweepResult write_report(const fs::path& dir);

}  // namespace fopi
