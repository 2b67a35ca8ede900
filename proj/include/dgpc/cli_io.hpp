#pragma once

#include <filesystem>
#include <limits>
#include <ostream>
#include <optional>
#include <string>
#include <vector>

#include "dgpc/driver.hpp"
#include "dgpc/oracles.hpp"
#include "dgpc/sde.hpp"

namespace dgpc {

enum class Command { Dgpc, Hermite, Mc, Invariant, Compare, Sweep };

const char* command_name(Command c);

enum class OracleKind { Auto, Exact, Mc, Invariant, None };

const char* oracle_kind_name(OracleKind k);

struct OracleConfig {
  OracleKind kind = OracleKind::Auto;
  std::size_t samples = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  int batches = 40;
};

struct SweepConfig {
  std::string parameter;  // K, N, L or n_restarts
  std::vector<int> values;
};

/// Overrides of the method block for the no-restart Hermite baseline.
struct BaselineConfig {
  int K = 0;  // 0 keeps the method value
  int N = 0;
  int L = 0;
};

struct RunConfig {
  Command command = Command::Dgpc;
  SdeModel model;
  DgpcConfig method;
  OracleConfig oracle;
  std::optional<BaselineConfig> baseline;
  std::optional<SweepConfig> sweep;
  std::string output;

  void validate() const;
  bool operator==(const RunConfig& other) const;
};

/// Parses a JSON document. Unknown keys are rejected at every level; missing
/// method keys default to RK4 with h = 1e-3.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (every field spelled out, fixed key order).
std::string to_json(const RunConfig& config);

/// One output time of a trajectory as written to CSV.
struct TrajectoryRow {
  double time = 0.0;
  std::vector<double> mean;
  std::vector<double> variance;
  std::optional<CumulantReport> cumulants;
  std::vector<double> eps_mean;
  std::vector<double> eps_var;
  double gram_condition = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<std::string> components;
  std::vector<TrajectoryRow> rows;
  bool has_reference = false;
};

Trajectory trajectory_of(const DgpcResult& result);
Trajectory trajectory_of(const McResult& result);

/// Reference statistics sampled on the trajectory's own grid.
struct ReferenceSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> mean;      // [component][time]
  std::vector<std::vector<double>> variance;  // [component][time]
};

/// Fills the eps columns; the reference grid must match the trajectory grid.
void attach_reference(Trajectory& traj, const ReferenceSeries& ref);

ReferenceSeries reference_of(const Trajectory& traj);

std::vector<std::string> csv_header(const Trajectory& traj);
void write_csv(const Trajectory& traj, std::ostream& out);
void emit_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Exact reference for the models that have one (OU with Gaussian or point
/// data, coupled with a_v = 0), else nullopt.
std::optional<ReferenceSeries> exact_reference(const SdeModel& model, const std::vector<double>& times);

McConfig mc_config_of(const RunConfig& config);

/// Runs the configured command and writes CSV output to config.output (or
/// `out` when the path is empty). Returns the primary trajectory.
Trajectory run_config(const RunConfig& config, std::ostream& out);

/// Relative errors of A against B on A's grid (grids must coincide).
Trajectory compare_configs(const RunConfig& a, const RunConfig& b);

std::filesystem::path default_preset_dir();
RunConfig load_preset(const std::string& name, const std::filesystem::path& preset_dir = default_preset_dir());

/// Writes DgPC, baseline and oracle CSVs plus summary.csv into `out_dir`.
/// Returns the summary table text.
std::string run_experiment(const std::string& name, const std::filesystem::path& out_dir,
                           const std::filesystem::path& preset_dir = default_preset_dir());

}  // namespace dgpc
