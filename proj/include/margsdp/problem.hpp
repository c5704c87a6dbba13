#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "margsdp/lattice.hpp"
#include "margsdp/linalg.hpp"

namespace margsdp {

/// Per-cluster operator collection {O_alpha} that defines the moment matrix.
struct OperatorBasis {
  std::vector<Mat> ops;
  /// ops[p * m + q] == E_pq; enables index-permutation fast paths.
  bool matrix_units = false;
  /// Fermionic grading: in a cluster-pair product the left operator picks up
  /// the left cluster's parity string when the right operator is odd.
  bool parity_graded = false;

  int size() const { return static_cast<int>(ops.size()); }
  int local_dim() const { return ops.empty() ? 0 : static_cast<int>(ops.front().rows()); }
};

/// Matrix units E_pq, p-major.
OperatorBasis complete_basis(int m);

/// Diagonal (-1)^popcount(x) on a 2^L-dimensional cluster space.
Vec parity_diagonal(int m);

/// Indexes unordered cluster pairs (i, j), i < j, in lexicographic order.
class PairIndex {
 public:
  explicit PairIndex(int n_clusters);

  int n_clusters() const { return n_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  int operator()(int i, int j) const;
  std::pair<int, int> operator[](int k) const { return pairs_[k]; }

 private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
};

/// Cluster-level pairwise Hamiltonian H = sum_g H_g + sum_{g<d} H_gd.
struct ClusterProblem {
  std::string model;
  Lattice lattice;
  ClusterDecomposition clusters;
  int n_clusters = 0;
  int local_dim = 0;
  int sites_per_cluster = 0;
  std::vector<Mat> h_single;
  /// Nonzero pair terms keyed by (g, d), g < d; absent pairs are zero.
  std::map<std::pair<int, int>, Mat> h_pair;
  OperatorBasis basis;
  bool translation_invariant = false;
  /// Pair terms are Jordan-Wigner images under the cluster-pair ordering.
  bool fermionic = false;

  ClusterProblem(std::string model_name, Lattice lat, ClusterDecomposition decomposition);

  Mat pair_term(int g, int d) const;
  /// Pair term between cluster 0 and the cluster at grid displacement d.
  Mat displacement_term(int d) const { return pair_term(0, d); }
  /// Largest Frobenius norm among the terms; at least 1.
  double scale() const;
  int n_sites() const { return n_clusters * sites_per_cluster; }
  BipartiteShape pair_shape() const { return BipartiteShape::square(local_dim); }

  /// Checks H_g == H_0 and H_gd == H_{0, d - g} entrywise.
  bool check_translation_invariance(double tol = 1e-12) const;
};

}  // namespace margsdp
