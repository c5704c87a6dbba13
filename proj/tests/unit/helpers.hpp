#pragma once

#include <random>

#include <lapacke.h>

#include "margsdp/linalg.hpp"

namespace testing_util {

using margsdp::Mat;
using margsdp::Vec;

inline Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n;
  Mat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = n(rng);
  return a;
}

inline Mat random_symmetric(std::mt19937_64& rng, int n) {
  Mat a = random_matrix(rng, n, n);
  return (a + a.transpose()) * 0.5;
}

/// Random PSD matrix with unit trace.
inline Mat random_density(std::mt19937_64& rng, int n, int rank = -1) {
  Mat b = random_matrix(rng, n, rank < 0 ? n : rank);
  Mat r = b * b.transpose();
  return r / r.trace();
}

/// Eigendecomposition through LAPACK dsyev, independent of the Eigen solver
/// used by the library.
inline void lapack_eig(const Mat& s, Vec& w, Mat& v) {
  const int n = static_cast<int>(s.rows());
  v = s;
  w.resize(n);
  const int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', n, v.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyev failed");
}

inline Mat lapack_psd_project(const Mat& s) {
  Vec w;
  Mat v;
  lapack_eig((s + s.transpose()) * 0.5, w, v);
  return v * w.cwiseMax(0.0).asDiagonal() * v.transpose();
}

inline double lapack_min_eig(const Mat& s) {
  Vec w;
  Mat v;
  lapack_eig((s + s.transpose()) * 0.5, w, v);
  return w.minCoeff();
}

inline double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace testing_util
