#pragma once

// Dense linear algebra on density-matrix shaped objects.
//
// Composite indices of a bipartite space Q1 (x) Q2 are row-major: the pair
// (p, s) maps to p * m2 + s. Partial traces, embeddings and Kronecker
// products below all share this convention.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace margsdp {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;

struct BipartiteShape {
  int m1 = 0;
  int m2 = 0;

  int dim() const { return m1 * m2; }
  static BipartiteShape square(int m) { return {m, m}; }
};

/// Relative asymmetry accepted before an eigendecomposition.
inline constexpr double kSymmetryTolerance = 1e-9;

/// Returns (S + S^T) / 2 after checking the asymmetry is below
/// kSymmetryTolerance relative to the Frobenius norm of S.
Mat symmetrized(const Mat& s);
CMat hermitized(const CMat& s);

/// Euclidean projection onto the PSD cone: clamps negative eigenvalues.
Mat psd_project(const Mat& s);
CMat psd_project(const CMat& s);

/// Smallest eigenvalue of the symmetric part of s.
double min_eigenvalue(const Mat& s);

/// Tr_2: trace out the second factor, result is m1 x m1.
Mat partial_trace_second(const Mat& r, BipartiteShape shape);
/// Tr_1: trace out the first factor, result is m2 x m2.
Mat partial_trace_first(const Mat& r, BipartiteShape shape);

/// Adjoint of partial_trace_second: Y -> Y (x) I_{m2}.
Mat embed_second(const Mat& y, BipartiteShape shape);
/// Adjoint of partial_trace_first: Y -> I_{m1} (x) Y.
Mat embed_first(const Mat& y, BipartiteShape shape);

/// R -> mu R + nu (Tr_2 R) (x) I + nu I (x) (Tr_1 R).
Mat pair_quadratic_forward(const Mat& r, BipartiteShape shape, double mu, double nu);

/// Inverse of pair_quadratic_forward.
///
/// The map acts diagonally on the orthogonal decomposition
///   span(I (x) I)  +  {Y (x) I : Tr Y = 0}  +  {I (x) Z : Tr Z = 0}  +  rest
/// with eigenvalues mu + nu (m1 + m2), mu + nu m2, mu + nu m1 and mu, so the
/// inverse costs O((m1 m2)^2) and never forms the (m1 m2)^2 square operator.
/// Requires mu > 0 and nu >= 0.
Mat pair_quadratic_inverse(const Mat& b, BipartiteShape shape, double mu, double nu);

/// Exchanges the two tensor factors: P (A (x) B) P^T = B (x) A.
Mat swap_factors(const Mat& r, BipartiteShape shape);

Mat kron(const Mat& a, const Mat& b);

/// Block DFT over a d-dimensional lattice of blocks.
///
/// `blocks` is indexed by the row-major flattening of a lattice multi-index
/// with extents `dims`. The forward transform uses the kernel
/// exp(-2 pi i j.k / M) with 1/sqrt(prod dims) normalization; the inverse
/// uses the conjugate kernel and the same normalization.
std::vector<CMat> block_dft_forward(std::span<const CMat> blocks, std::span<const int> dims);
std::vector<CMat> block_dft_inverse(std::span<const CMat> blocks, std::span<const int> dims);

}  // namespace margsdp
