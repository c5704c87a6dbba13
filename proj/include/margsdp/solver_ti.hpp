#pragma once

#include <optional>
#include <span>
#include <vector>

#include "margsdp/solver.hpp"

namespace margsdp {

/// Reduced state of the translation-invariant scheme. Vectors indexed by
/// grid displacement d have one slot per cluster; slot 0 is unused except in
/// x_row, whose slot 0 holds the diagonal block X_00.
struct TiState {
  Mat rho0;
  std::vector<Mat> rho_pair;
  std::vector<Mat> aux;
  std::vector<Mat> lambda_pair;
  std::vector<Mat> lambda_left;
  std::vector<Mat> lambda_right;
  std::vector<Mat> x_row;
  long iteration = 0;
  std::vector<ConvergenceRecord> history;

  static TiState initial(const ClusterProblem& problem);
};

/// One projected ascent step on a block-circulant X given by its first
/// block row. Both rows hold one block per grid displacement (row-major over
/// `grid`), including d = 0. The symmetric block-circulant matrix is
/// block-diagonalized by the block DFT, projected block by block, and
/// transformed back.
///
/// Throws BrokenSymmetry when a Fourier block is not Hermitian beyond
/// round-off, or when the back-transformed row keeps an imaginary part.
std::vector<Mat> update_x_ti(std::span<const Mat> x_row, std::span<const Mat> g_row, double eps,
                             std::span<const int> grid, int threads = 1);

/// First block row of the moment matrix for the reduced marginals.
std::vector<Mat> g_row_ti(const TiState& state, const OperatorBasis& basis);

/// (Tr[H_0 rho_0] + 1/2 sum_{d != 0} Tr[H_0d rho_0d]) / sites per cluster
double energy_per_site_ti(const ClusterProblem& problem, const TiState& state);

struct TiSolveResult {
  double energy_per_site = 0.0;
  TiState state;
  bool converged = false;
};

using TiIterationObserver = std::function<void(const TiState&)>;

/// Translation-invariant ADMM / projected dual ascent. The site update sums
/// only the A1 / Lambda^(1) terms unless config.symmetrized_site_update is
/// set. Throws InvalidConfig for a problem that is not translation invariant.
TiSolveResult solve_ti(const ClusterProblem& problem, const SolverConfig& config,
                       std::optional<TiState> start = std::nullopt, const TiIterationObserver& observer = {});

/// Expands the reduced state to the full pair set: rho_ij = rho_{0, d(i,j)}.
MarginalSet expand_ti(const ClusterProblem& problem, const TiState& state);

}  // namespace margsdp
