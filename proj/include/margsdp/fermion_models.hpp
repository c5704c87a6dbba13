#pragma once

#include <vector>

#include "margsdp/problem.hpp"

namespace margsdp {

/// Jordan-Wigner representation of n_modes fermionic modes on (C^2)^n_modes.
/// Mode positions are 1-based; position 1 is the most significant factor.
struct JordanWignerContext {
  int n_modes = 0;

  /// a_p^dagger = sigma^z (x) ... (x) sigma^z (x) [[0,0],[1,0]] (x) I (x) ... (x) I
  Mat creation(int position) const;
  Mat annihilation(int position) const { return creation(position).transpose(); }
  Mat number(int position) const;
  long dim() const { return 1L << n_modes; }
};

Mat jw_creation(const JordanWignerContext& ctx, int position);

/// Per-cluster orderings kappa_g and the induced cluster-pair orderings
/// kappa_gd (all of cluster g before all of cluster d, g < d).
class PairOrdering {
 public:
  explicit PairOrdering(const ClusterDecomposition& clustering);
  PairOrdering(std::vector<std::vector<int>> single);

  /// Sites of cluster g in JW order.
  const std::vector<int>& single(int g) const { return single_[g]; }
  /// Sites of clusters g and d in JW order, g first.
  std::vector<int> pair(int g, int d) const;
  /// 1-based JW position of `site` within cluster pair (g, d), or 0.
  int position_in_pair(int g, int d, int site) const;
  int position_in_single(int g, int site) const;

 private:
  std::vector<std::vector<int>> single_;
};

/// Spinless fermions: sum_{i~j} [-a_i^+ a_j - a_j^+ a_i] plus either the
/// nearest-neighbour interaction U (n_i - 1/2)(n_j - 1/2), or, when
/// `long_range`, U sum_{i != j} (n_i - 1/2)(n_j - 1/2) / d(i, j) over ordered
/// pairs with minimum-image distances.
ClusterProblem build_spinless(const Lattice& lattice, double U, const ClusterDecomposition& clustering,
                              bool long_range);

/// J_gd of a cluster operator given by its single-cluster JW image.
/// The left cluster's image is A (x) I; the right cluster's image is
/// I (x) A_even + P (x) A_odd, where P is the left cluster's parity string.
Mat jw_lift_left(const Mat& a);
Mat jw_lift_right(const Mat& a);

/// Splits a cluster operator into its parity-even and parity-odd parts.
std::pair<Mat, Mat> parity_split(const Mat& a);

/// Observable products entering the moment matrix, for one cluster pair.
struct JwObservables {
  /// single[a][b] = J_g(A_a)^dagger J_g(A_b)
  std::vector<std::vector<Mat>> single;
  /// pair[a][b] = J_gd(A_{g,a})^dagger J_gd(A_{d,b})
  std::vector<std::vector<Mat>> pair;
};

/// Explicit products for a basis of congruent clusters. Dense; desk scale only.
JwObservables jw_pair_observables(const OperatorBasis& basis);

}  // namespace margsdp
