#pragma once

// Step-wise pipeline behind the CLI. Every command renders its files into
// an Outputs map first; nothing touches the output directory until the whole
// command has succeeded.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "hydrobal/io.hpp"
#include "hydrobal/scenarios.hpp"

namespace hydrobal::pipeline {

struct Context {
  io::RunConfig config;
  ScenarioInputs inputs;
  std::filesystem::path out;
  bool mps_dump = false;
};

struct LoadOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;  // random instance when no config is given
  std::optional<std::filesystem::path> out;
  bool mps_dump = false;
};

/// Reads the config, or writes a seeded random instance into
/// `<out>/instance` and reads that.
Context load(const LoadOptions& options);

/// file name -> content
using Outputs = std::map<std::string, std::string>;

Outputs day_ahead(const Context& ctx);
/// Needs commitment.csv from a previous day-ahead run in the output directory.
Outputs reforecast(const Context& ctx);
Outputs quotes(const Context& ctx);
Outputs rebalance(const Context& ctx, LoadMode mode);
Outputs run(const Context& ctx);
/// Human-readable summary of a valid configuration.
std::string describe(const Context& ctx);

/// Writes every file; creates the directory when needed.
void commit(const std::filesystem::path& dir, const Outputs& outputs);

LoadCommitment read_commitment(const std::filesystem::path& path, const CascadeSystem& system, int steps);

/// CSV renderers.
std::string schedule_csv(const CascadeSystem& system, const ScheduleSolution& s);
std::string commitment_csv(const LoadCommitment& c);
std::string fills_csv(const std::vector<Fill>& fills);
std::string quotes_csv(const QuoteLadder& q);
std::string mc_csv(const DualReport& d);

}  // namespace hydrobal::pipeline
