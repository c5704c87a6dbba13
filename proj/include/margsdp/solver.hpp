#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "margsdp/sdp_core.hpp"

namespace margsdp {

struct SolverConfig {
  double mu = 10.0;
  double nu = 10.0;
  /// Dual ascent step for X.
  double eps = 2.0;
  /// Step schedule eps_k = eps / (1 + eps_decay * k); 0 keeps it fixed.
  double eps_decay = 0.0;
  long max_iters = 10000;
  /// Stop once |energy delta| per site stays below this for `stable_window`
  /// consecutive iterations. Non-positive runs all max_iters.
  double energy_tol = 1e-6;
  int stable_window = 50;
  /// Inner ADMM sweeps per dual step in the reference scheme.
  int inner_iters = 200;
  double inner_tol = 1e-9;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Translation-invariant solver only: average the A2 / Lambda^(2) terms
  /// into the site update alongside the A1 / Lambda^(1) terms.
  bool symmetrized_site_update = false;

  void validate() const;
  double step(long iteration) const { return eps / (1.0 + eps_decay * static_cast<double>(iteration)); }
};

struct ConvergenceRecord {
  long iter = 0;
  double energy_per_site = 0.0;
  double energy_delta = 0.0;
  double feas_error = 0.0;
  double wall_ms = 0.0;
};

/// True when the last `stable_window` records all have |delta| < energy_tol.
bool has_converged(const std::vector<ConvergenceRecord>& history, const SolverConfig& config);

/// Mean energy per site over the trailing half of the history. When the
/// dual iteration cycles over a face of minimizers (degenerate ground
/// spaces) individual iterates keep oscillating while this average settles.
double tail_average(const std::vector<ConvergenceRecord>& history);

/// Primal, auxiliary and dual variables of the general scheme. Pair-indexed
/// vectors follow PairIndex; lambda_left / lambda_right hold the m x m
/// multipliers of rho_i = A1[rho_ij] and rho_j = A2[rho_ij].
struct SolverState {
  MarginalSet marginals;
  std::vector<Mat> aux;
  std::vector<Mat> lambda_pair;
  std::vector<Mat> lambda_left;
  std::vector<Mat> lambda_right;
  Mat x;
  long iteration = 0;
  std::vector<ConvergenceRecord> history;

  /// Multipliers zero, rho_i and aux_ij multiples of the identity with unit
  /// trace, X the identity.
  static SolverState initial(const ClusterProblem& problem);
};

void update_pair_marginals(SolverState& state, const EffectiveHamiltonians& heff, BipartiteShape shape,
                           const SolverConfig& config);
void update_aux(SolverState& state, const SolverConfig& config);
void update_site_marginals(SolverState& state, const EffectiveHamiltonians& heff, const SolverConfig& config);
void update_local_duals(SolverState& state, BipartiteShape shape, const SolverConfig& config);
void update_global_dual(SolverState& state, const OperatorBasis& basis, double eps);

struct SolveResult {
  double energy_per_site = 0.0;
  SolverState state;
  bool converged = false;
};

using IterationObserver = std::function<void(const SolverState&)>;

/// Interleaved ADMM / projected dual ascent. Each iteration runs, in order:
/// effective Hamiltonians, pair update, auxiliary projection, site update,
/// local multipliers, global dual step.
SolveResult solve(const ClusterProblem& problem, const SolverConfig& config,
                  std::optional<SolverState> start = std::nullopt, const IterationObserver& observer = {});

/// Reference scheme: for each dual step, iterate the ADMM sweeps with X
/// frozen for up to `inner_iters` sweeps (or until the local feasibility
/// error drops below `inner_tol`), then take the projected ascent step.
/// Intended for small instances.
SolveResult solve_reference(const ClusterProblem& problem, const SolverConfig& config);

double energy_per_site(const ClusterProblem& problem, const MarginalSet& marginals);

}  // namespace margsdp
