#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "phaselim/probe.hpp"

/// Declarative run configuration, schema validation with JSON-pointer diagnostics,
/// and the recipe engine behind the command-line tool. Output rows share one flat
/// schema (see docs/csv_columns.md); identical config + seed yields byte-identical
/// files.
namespace phaselim::cli {

struct RunConfig {
  std::string command;        ///< qfi | qfim | crb | phase-averaged | gaussian-cfi |
                              ///< campaign | sweep
  std::string inner_command;  ///< sweep only: the command evaluated on the grid.
  std::optional<probe::ProbeSpec> probe;
  std::vector<double> grid_t;
  std::vector<double> grid_r;
  std::vector<double> grid_phi;
  std::string output = "csv";  ///< csv | json
  std::uint64_t seed = 1;
  std::string out_path;  ///< Empty = stdout; relative paths resolve under
                         ///< $PHASELIM_OUT_DIR when set.
  long long m = 10000;
  long long reps = 200;
};

struct Violation {
  std::string pointer;  ///< JSON pointer to the offending field ("/grid/T/0").
  std::string message;
};

/// One output record; optional fields print empty in CSV and null in JSON.
struct Row {
  std::string recipe;
  std::string probe;
  std::optional<double> transmittance;
  std::optional<double> r;
  std::optional<double> phi;
  double value = 0.0;
  std::optional<double> bound;  ///< Variance-units lower bound.
  std::optional<double> snl;    ///< Shot-noise variance for the row's resource.
  std::optional<bool> beats_snl;
  std::string flags;
};

/// Schema check; empty result means valid. Never throws on content.
std::vector<Violation> validate_config(const nlohmann::json& j);

/// Parse a validated config. Throws ConfigError on structural surprises.
RunConfig config_from_json(const nlohmann::json& j);

/// Evaluate the configured recipe over its grids, in grid order (T, then r, then
/// phi). Throws the underlying numeric errors.
std::vector<Row> run_rows(const RunConfig& config);

std::string format_csv(const std::vector<Row>& rows);
std::string format_json(const std::vector<Row>& rows);

/// Full pipeline: rows -> format -> out_path (or `out` when out_path is empty).
/// Returns the process exit code (0 ok, 2 config error, 3 numeric/degeneracy
/// error) and writes a machine-readable JSON error record to `err` on failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace phaselim::cli
