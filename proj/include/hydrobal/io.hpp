#pragma once

// File formats: CSV time series and JSON configuration.
//
// Series CSV:  header `step,value`, one row per step.
// Inflow CSV:  header `step,<reservoir id>,...`, m3/s.
// System JSON: {"grid": {...}, "reservoirs": [...], "plants": [...]}.
// Run JSON:    paths (relative to the config file) plus market, fee and
//              solver parameters; see README for the schema.

#include <filesystem>
#include <string>
#include <vector>

#include "hydrobal/market.hpp"
#include "hydrobal/scenarios.hpp"

namespace hydrobal::io {

/// `%.6g`, with negative zero printed as 0.
std::string num(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Throws IoError when the file cannot be read, ValidationError on malformed
/// content.
CsvTable read_csv(const std::filesystem::path& path);
Series read_series(const std::filesystem::path& path, int expected_steps = -1);
InflowSeries read_inflow(const std::filesystem::path& path, const CascadeSystem& system,
                         int expected_steps = -1);

struct SystemConfig {
  CascadeSystem system;
  TimeGrid grid;
};

SystemConfig parse_system(const std::string& json_text);
SystemConfig read_system(const std::filesystem::path& path);

struct RunConfig {
  std::filesystem::path system;
  std::filesystem::path inflow_early;
  std::filesystem::path inflow_late;
  std::filesystem::path wind_forecast;
  std::filesystem::path wind_actual;
  std::filesystem::path spot;
  QuoteParams market;
  FeeSchedule fees;
  SolveOptions solver;
  std::filesystem::path out = "out";
};

/// Relative paths are resolved against the config file's directory.
RunConfig read_run_config(const std::filesystem::path& path);

/// Loads every file of `config`, validates the system and synthesizes quotes.
ScenarioInputs load_inputs(const RunConfig& config);

/// Whole-file reads and writes; errors raise IoError.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace hydrobal::io
