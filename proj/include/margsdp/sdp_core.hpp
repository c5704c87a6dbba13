#pragma once

#include <vector>

#include "margsdp/problem.hpp"

namespace margsdp {

/// One- and two-cluster marginals; `pair` is indexed by PairIndex and holds
/// rho_ij for i < j as an operator on Q_i (x) Q_j.
struct MarginalSet {
  std::vector<Mat> single;
  std::vector<Mat> pair;
};

/// Block (G_ii)_{ab} = Tr[O_a^+ O_b rho_i].
Mat g_single_block(const Mat& rho, const OperatorBasis& basis);

/// Block (G_ij)_{ab} = Tr[(O_a^+ (x) O_b) rho_ij] for i < j. With a
/// parity-graded basis the left factor carries the parity string when O_b
/// is odd.
Mat g_pair_block(const Mat& rho_pair, const OperatorBasis& basis);

/// Full (M n) x (M n) moment matrix; G_ji = G_ij^T.
Mat assemble_g(const MarginalSet& marginals, const OperatorBasis& basis);

/// H_i[X_ii] = H_i - sum_ab (X_ii)_ab O_a^+ O_b
Mat effective_single(const Mat& h, const Mat& x_block, const OperatorBasis& basis);

/// H_ij[X_ij] = H_ij - (K + K^T),  K = sum_ab (X_ij)_ab O_a^+ (x) O_b.
///
/// The printed definition starts the pair term from "H_i"; only the pair
/// Hamiltonian H_ij is dimensionally consistent there, so that is what is
/// used.
Mat effective_pair(const Mat& h, const Mat& x_block, const OperatorBasis& basis);

struct EffectiveHamiltonians {
  std::vector<Mat> single;
  std::vector<Mat> pair;  // PairIndex order
};

EffectiveHamiltonians effective_hamiltonians(const ClusterProblem& problem, const Mat& x, int threads = 1);

/// sum_i Tr[H_i rho_i] + sum_{i<j} Tr[H_ij rho_ij]
double primal_energy(const ClusterProblem& problem, const MarginalSet& marginals);

/// Frobenius inner product <A, B>.
inline double frob(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }

/// Per-cluster feasibility error of the local equality constraints, summed
/// over all pairs i < j and normalized per cluster:
///   sqrt( (2 / M) / (M - 1) * sum_{i<j} (|A1 rho_ij - rho_i|^2
///                                         + |A2 rho_ij - rho_j|^2
///                                         + |rho_ij - aux_ij|^2) ).
/// For translation-invariant data this equals feasibility_error_ti.
double feasibility_error(const MarginalSet& marginals, const std::vector<Mat>& aux);

/// Translation-invariant form over displacements j != 0; rho_pair[0] and
/// aux[0] are unused.
double feasibility_error_ti(const Mat& rho0, const std::vector<Mat>& rho_pair, const std::vector<Mat>& aux);

}  // namespace margsdp
