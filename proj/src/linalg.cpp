#include "margsdp/linalg.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include <fftw3.h>

#include "margsdp/error.hpp"

namespace margsdp {

namespace {

template <typename M>
void require_finite_square(const M& s, const char* what) {
  if (s.rows() != s.cols()) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": matrix is " + std::to_string(s.rows()) +
                                             "x" + std::to_string(s.cols()) + ", expected square");
  }
  if (!s.allFinite()) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite entries");
  }
}

template <typename M>
M symmetric_part(const M& s, const char* what) {
  require_finite_square(s, what);
  const double norm = s.norm();
  const double asym = (s - s.adjoint()).norm();
  if (asym > kSymmetryTolerance * norm) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": asymmetry " + std::to_string(asym) +
                                             " exceeds tolerance relative to norm " + std::to_string(norm));
  }
  return (s + s.adjoint()) * 0.5;
}

template <typename M>
M project_impl(const M& s) {
  M sym = symmetric_part(s, "psd_project");
  const auto n = sym.rows();
  if (n == 0) return sym;
  Eigen::SelfAdjointEigenSolver<M> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "eigensolver failed on matrix of dimension " + std::to_string(n));
  }
  const Vec& w = es.eigenvalues();  // ascending
  Eigen::Index n_neg = 0;
  while (n_neg < n && w(n_neg) < 0.0) ++n_neg;
  if (n_neg == 0) return sym;
  if (n_neg == n) return M::Zero(n, n);
  const auto& v = es.eigenvectors();
  if (n_neg <= n / 2) {
    // Remove the negative part: S - V_- D_- V_-^*.
    M scaled = v.leftCols(n_neg) * (-w.head(n_neg)).cwiseSqrt().asDiagonal();
    M out = sym;
    out.noalias() += scaled * scaled.adjoint();
    return out;
  }
  const auto n_pos = n - n_neg;
  M scaled = v.rightCols(n_pos) * w.tail(n_pos).cwiseSqrt().asDiagonal();
  M out(n, n);
  out.noalias() = scaled * scaled.adjoint();
  return out;
}

void check_shape(const Mat& r, BipartiteShape shape, const char* what) {
  if (shape.m1 <= 0 || shape.m2 <= 0) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-positive factor dimension");
  }
  if (r.rows() != shape.dim() || r.cols() != shape.dim()) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": matrix is " + std::to_string(r.rows()) + "x" +
                                             std::to_string(r.cols()) + " but shape is " +
                                             std::to_string(shape.m1) + "x" + std::to_string(shape.m2));
  }
}

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

std::vector<CMat> block_dft(std::span<const CMat> blocks, std::span<const int> dims, int sign) {
  if (dims.empty()) throw Error(ErrorKind::InvalidInput, "block_dft: empty lattice dims");
  long total = 1;
  for (int d : dims) {
    if (d <= 0) throw Error(ErrorKind::InvalidInput, "block_dft: non-positive lattice extent");
    total *= d;
  }
  if (static_cast<long>(blocks.size()) != total) {
    throw Error(ErrorKind::InvalidInput, "block_dft: expected " + std::to_string(total) + " blocks, got " +
                                             std::to_string(blocks.size()));
  }
  const auto rows = blocks[0].rows();
  const auto cols = blocks[0].cols();
  for (const auto& b : blocks) {
    if (b.rows() != rows || b.cols() != cols) {
      throw Error(ErrorKind::InvalidInput, "block_dft: ragged block dimensions");
    }
  }
  const int entries = static_cast<int>(rows * cols);
  std::vector<std::complex<double>> buf(static_cast<size_t>(total) * entries);
  for (long j = 0; j < total; ++j) {
    std::copy(blocks[j].data(), blocks[j].data() + entries, buf.begin() + j * entries);
  }
  if (entries > 0) {
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    std::vector<int> n(dims.begin(), dims.end());
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan = fftw_plan_many_dft(static_cast<int>(n.size()), n.data(), entries, data, nullptr, entries, 1, data,
                                nullptr, entries, 1, sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw Error(ErrorKind::Numerical, "block_dft: FFTW planning failed");
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(total));
  std::vector<CMat> out(total, CMat(rows, cols));
  for (long k = 0; k < total; ++k) {
    std::copy(buf.begin() + k * entries, buf.begin() + (k + 1) * entries, out[k].data());
    out[k] *= scale;
  }
  return out;
}

}  // namespace

Mat symmetrized(const Mat& s) { return symmetric_part(s, "symmetrized"); }
CMat hermitized(const CMat& s) { return symmetric_part(s, "hermitized"); }

Mat psd_project(const Mat& s) { return project_impl(s); }
CMat psd_project(const CMat& s) { return project_impl(s); }

double min_eigenvalue(const Mat& s) {
  require_finite_square(s, "min_eigenvalue");
  if (s.rows() == 0) return 0.0;
  Mat sym = (s + s.transpose()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "eigensolver failed on matrix of dimension " + std::to_string(s.rows()));
  }
  return es.eigenvalues()(0);
}

Mat partial_trace_second(const Mat& r, BipartiteShape shape) {
  check_shape(r, shape, "partial_trace_second");
  const int m1 = shape.m1, m2 = shape.m2;
  Mat out = Mat::Zero(m1, m1);
  for (int q = 0; q < m1; ++q)
    for (int p = 0; p < m1; ++p) {
      double acc = 0.0;
      for (int s = 0; s < m2; ++s) acc += r(p * m2 + s, q * m2 + s);
      out(p, q) = acc;
    }
  return out;
}

Mat partial_trace_first(const Mat& r, BipartiteShape shape) {
  check_shape(r, shape, "partial_trace_first");
  const int m1 = shape.m1, m2 = shape.m2;
  Mat out = Mat::Zero(m2, m2);
  for (int s = 0; s < m1; ++s) out += r.block(s * m2, s * m2, m2, m2);
  return out;
}

Mat embed_second(const Mat& y, BipartiteShape shape) {
  if (y.rows() != shape.m1 || y.cols() != shape.m1) {
    throw Error(ErrorKind::InvalidInput, "embed_second: operand does not match first factor");
  }
  return kron(y, Mat::Identity(shape.m2, shape.m2));
}

Mat embed_first(const Mat& y, BipartiteShape shape) {
  if (y.rows() != shape.m2 || y.cols() != shape.m2) {
    throw Error(ErrorKind::InvalidInput, "embed_first: operand does not match second factor");
  }
  return kron(Mat::Identity(shape.m1, shape.m1), y);
}

Mat pair_quadratic_forward(const Mat& r, BipartiteShape shape, double mu, double nu) {
  return mu * r + nu * embed_second(partial_trace_second(r, shape), shape) +
         nu * embed_first(partial_trace_first(r, shape), shape);
}

Mat pair_quadratic_inverse(const Mat& b, BipartiteShape shape, double mu, double nu) {
  if (!(mu > 0.0) || !(nu >= 0.0) || !std::isfinite(mu) || !std::isfinite(nu)) {
    throw Error(ErrorKind::InvalidConfig, "pair_quadratic_inverse: requires mu > 0 and nu >= 0");
  }
  check_shape(b, shape, "pair_quadratic_inverse");
  if (nu == 0.0) return b / mu;

  const int m1 = shape.m1, m2 = shape.m2;
  const double t = b.trace() / shape.dim();
  Mat y = partial_trace_second(b, shape) / m2;
  y.diagonal().array() -= t;
  Mat z = partial_trace_first(b, shape) / m1;
  z.diagonal().array() -= t;

  const double c_id = 1.0 / (mu + nu * (m1 + m2));
  const double c_y = 1.0 / (mu + nu * m2);
  const double c_z = 1.0 / (mu + nu * m1);
  const double c_rest = 1.0 / mu;

  // rest = b - t I - Y (x) I - I (x) Z; the result rescales each piece.
  Mat out = c_rest * b;
  for (int p = 0; p < m1; ++p)
    for (int q = 0; q < m1; ++q) {
      const double v = (c_y - c_rest) * y(p, q);
      if (v == 0.0) continue;
      for (int s = 0; s < m2; ++s) out(p * m2 + s, q * m2 + s) += v;
    }
  for (int p = 0; p < m1; ++p) out.block(p * m2, p * m2, m2, m2) += (c_z - c_rest) * z;
  out.diagonal().array() += (c_id - c_rest) * t;
  return out;
}

Mat swap_factors(const Mat& r, BipartiteShape shape) {
  check_shape(r, shape, "swap_factors");
  const int m1 = shape.m1, m2 = shape.m2;
  Mat out(shape.dim(), shape.dim());
  for (int a = 0; a < m1; ++a)
    for (int b = 0; b < m2; ++b)
      for (int c = 0; c < m1; ++c)
        for (int d = 0; d < m2; ++d) out(b * m1 + a, d * m1 + c) = r(a * m2 + b, c * m2 + d);
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<CMat> block_dft_forward(std::span<const CMat> blocks, std::span<const int> dims) {
  return block_dft(blocks, dims, FFTW_FORWARD);
}

std::vector<CMat> block_dft_inverse(std::span<const CMat> blocks, std::span<const int> dims) {
  return block_dft(blocks, dims, FFTW_BACKWARD);
}

}  // namespace margsdp
