#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace longlab {

// Flat key-value experiment description. Unknown keys are hard errors so a
// config cannot silently drift from the run it documents.
struct ExperimentConfig {
  std::string kind;  // one experiment name, or "all"
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;
  std::map<std::string, double> numbers;
  std::map<std::string, std::vector<double>> lists;
};

extern const char* const kExperimentKinds[7];  // sorted by name

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical echo of a config: sorted key lines, 17 significant digits.
std::string canonical_config_text(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);  // FNV-1a 64, hex

struct RunRecord {
  std::string name;
  double measured = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct PlotSeries {
  std::string name;
  std::string xlabel;
  std::string ylabel;
  bool loglog = false;
  bool annotate_slope = false;
  std::vector<std::pair<double, double>> points;
};

struct RunReport {
  std::string kind;
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;
  std::string config_hash;
  std::vector<RunRecord> records;
  std::vector<PlotSeries> series;

  bool all_pass() const;
};

// Executes the named experiment (or every experiment for kind "all", merged
// in name order). Deterministic for a fixed config, including the seed.
RunReport run_experiment(const ExperimentConfig& cfg);

std::string report_to_json(const RunReport& r);
std::string report_to_csv(const RunReport& r);
RunReport report_from_json(const std::string& text);

// report.json and report.csv under out_dir (created if missing).
void write_report_files(const RunReport& r, const std::string& out_dir);
RunReport load_report(const std::string& json_path);

// One SVG per plottable series; returns the number of files written and
// warns on stderr instead of failing when there is nothing to draw.
int write_plot_files(const RunReport& r, const std::string& out_dir);

}  // namespace longlab
