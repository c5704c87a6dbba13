#pragma once
// Batch runs: configuration, model construction, solver dispatch and the
// files a run leaves behind (convergence.csv, result.json, checkpoint.bin).

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "margsdp/error.hpp"
#include "margsdp/solver_ti.hpp"

namespace margsdp {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string model = "tfi";  // tfi | afh | sf | lrsf
  std::string lattice = "20x1";
  std::string cluster = "1x1";
  bool periodic = true;
  double h = 1.0;
  double U = 0.0;
  std::string solver = "ti";  // general | ti
  SolverConfig solver_config;
  bool oracle = false;
  std::string output_dir = "out";
  long checkpoint_every = 0;
  std::string resume_from;

  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

ClusterProblem build_problem(const RunConfig& config);

struct RunResult {
  double energy_per_site = 0.0;
  double energy_tail_average = 0.0;
  long iterations = 0;
  bool converged = false;
  double feas_error = 0.0;
  std::optional<double> oracle_energy;
  std::optional<double> relaxation_error;
  std::vector<ConvergenceRecord> history;
  nlohmann::json record;
};

/// Runs one configuration and writes its files into config.output_dir.
/// Errors surface as margsdp::Error.
RunResult run(const RunConfig& config);

/// Writes the history as CSV with 17 significant digits.
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRecord>& history);

struct SweepPoint {
  double value = 0.0;
  std::string cluster;
  std::string status;  // "ok" or the error message
  std::optional<RunResult> result;
};

/// Runs `base` for every (cluster, value) combination, setting the model
/// parameter (h for spin models, U for fermions) to each value. Each point
/// writes into <output_dir>/<cluster>_<param><value>; failures are recorded
/// and the sweep continues. sweep.csv aggregates the table.
std::vector<SweepPoint> sweep(const RunConfig& base, const std::vector<double>& values,
                              const std::vector<std::string>& clusters);

/// Maps an error to the process exit code: 2 for invalid configuration or
/// input, 3 for divergence, 4 for checkpoint problems, 1 otherwise.
int exit_code_for(const Error& error);

}  // namespace margsdp
