#include "margsdp/sdp_core.hpp"

#include <bit>
#include <cmath>

#include "margsdp/error.hpp"
#include "margsdp/fermion_models.hpp"
#include "margsdp/parallel.hpp"

namespace margsdp {

namespace {

void check_basis(const OperatorBasis& basis, Eigen::Index m, const char* what) {
  if (basis.size() == 0 || basis.local_dim() != m) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": basis does not match local dimension " +
                                             std::to_string(m));
  }
}

inline bool odd(int x) { return std::popcount(static_cast<unsigned>(x)) & 1; }

/// Sign picked up by E_qp (x) E_rs under the fermionic grading.
inline double grading_sign(const OperatorBasis& basis, int p, int r, int s) {
  return (basis.parity_graded && odd(p) && (odd(r) != odd(s))) ? -1.0 : 1.0;
}

}  // namespace

Mat g_single_block(const Mat& rho, const OperatorBasis& basis) {
  const auto m = rho.rows();
  check_basis(basis, m, "g_single_block");
  const int n = basis.size();
  Mat g = Mat::Zero(n, n);
  if (basis.matrix_units) {
    // (G)_{(pq),(rs)} = delta_pr rho_sq
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int s = 0; s < m; ++s) g(p * m + q, p * m + s) = rho(s, q);
  } else {
    // Tr[A^T B rho] = sum A .* (B rho)
    for (int b = 0; b < n; ++b) {
      const Mat b_rho = basis.ops[b] * rho;
      for (int a = 0; a < n; ++a) g(a, b) = basis.ops[a].cwiseProduct(b_rho).sum();
    }
  }
  return (g + g.transpose()) * 0.5;
}

Mat g_pair_block(const Mat& rho_pair, const OperatorBasis& basis) {
  const int m = basis.local_dim();
  if (rho_pair.rows() != m * m || rho_pair.cols() != m * m) {
    throw Error(ErrorKind::InvalidInput, "g_pair_block: pair marginal does not match basis");
  }
  const int n = basis.size();
  Mat g(n, n);
  if (basis.matrix_units) {
    // (G)_{(pq),(rs)} = sign * rho[(p,s),(q,r)]
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r)
          for (int s = 0; s < m; ++s)
            g(p * m + q, r * m + s) = grading_sign(basis, p, r, s) * rho_pair(p * m + s, q * m + r);
    return g;
  }
  // Tr[(A^T (x) B) rho] = sum_{c,a} A[c,a] C_B[c,a],
  // C_B[c,a] = sum_{b,d} B[b,d] rho[(c,d),(a,b)].
  const Vec parity = parity_diagonal(m);
  for (int b = 0; b < n; ++b) {
    Mat even = basis.ops[b], odd_part = Mat::Zero(m, m);
    if (basis.parity_graded) std::tie(even, odd_part) = parity_split(basis.ops[b]);
    Mat c = Mat::Zero(m, m);
    for (int ci = 0; ci < m; ++ci)
      for (int ai = 0; ai < m; ++ai) {
        double acc = 0.0;
        for (int bi = 0; bi < m; ++bi)
          for (int di = 0; di < m; ++di) {
            const double w = even(bi, di) + parity(ci) * odd_part(bi, di);
            if (w != 0.0) acc += w * rho_pair(ci * m + di, ai * m + bi);
          }
        c(ci, ai) = acc;
      }
    for (int a = 0; a < n; ++a) g(a, b) = basis.ops[a].cwiseProduct(c).sum();
  }
  return g;
}

Mat assemble_g(const MarginalSet& marginals, const OperatorBasis& basis) {
  const int M = static_cast<int>(marginals.single.size());
  const PairIndex pairs(M);
  if (static_cast<int>(marginals.pair.size()) != pairs.size()) {
    throw Error(ErrorKind::InvalidState, "assemble_g: expected " + std::to_string(pairs.size()) +
                                             " pair marginals, got " + std::to_string(marginals.pair.size()));
  }
  const int n = basis.size();
  Mat g = Mat::Zero(M * n, M * n);
  for (int i = 0; i < M; ++i) g.block(i * n, i * n, n, n) = g_single_block(marginals.single[i], basis);
  for (int k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    if (marginals.pair[k].size() == 0) throw Error(ErrorKind::InvalidState, "assemble_g: missing pair marginal");
    Mat block = g_pair_block(marginals.pair[k], basis);
    g.block(j * n, i * n, n, n) = block.transpose();
    g.block(i * n, j * n, n, n) = std::move(block);
  }
  return (g + g.transpose()) * 0.5;
}

Mat effective_single(const Mat& h, const Mat& x_block, const OperatorBasis& basis) {
  const auto m = h.rows();
  check_basis(basis, m, "effective_single");
  const int n = basis.size();
  if (x_block.rows() != n || x_block.cols() != n) {
    throw Error(ErrorKind::InvalidInput, "effective_single: X block does not match basis size");
  }
  Mat d = Mat::Zero(m, m);
  if (basis.matrix_units) {
    // sum X_{(pq),(rs)} E_qp E_rs = sum_p X_{(pq),(ps)} E_qs
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int s = 0; s < m; ++s) d(q, s) += x_block(p * m + q, p * m + s);
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double w = x_block(a, b);
        if (w != 0.0) d.noalias() += w * basis.ops[a].transpose() * basis.ops[b];
      }
  }
  Mat out = h - d;
  return (out + out.transpose()) * 0.5;
}

Mat effective_pair(const Mat& h, const Mat& x_block, const OperatorBasis& basis) {
  const int m = basis.local_dim();
  const int n = basis.size();
  if (h.rows() != m * m || h.cols() != m * m) {
    throw Error(ErrorKind::InvalidInput, "effective_pair: Hamiltonian does not match basis");
  }
  if (x_block.rows() != n || x_block.cols() != n) {
    throw Error(ErrorKind::InvalidInput, "effective_pair: X block does not match basis size");
  }
  Mat k = Mat::Zero(m * m, m * m);
  if (basis.matrix_units) {
    // E_qp (x) E_rs = |q r><p s|
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r)
          for (int s = 0; s < m; ++s)
            k(q * m + r, p * m + s) += grading_sign(basis, p, r, s) * x_block(p * m + q, r * m + s);
  } else {
    const Mat parity = parity_diagonal(m).asDiagonal();
    for (int b = 0; b < n; ++b) {
      Mat left = Mat::Zero(m, m);
      for (int a = 0; a < n; ++a) left += x_block(a, b) * basis.ops[a].transpose();
      if (basis.parity_graded) {
        auto [even, odd_part] = parity_split(basis.ops[b]);
        k += kron(left, even) + kron(left * parity, odd_part);
      } else {
        k += kron(left, basis.ops[b]);
      }
    }
  }
  return h - (k + k.transpose());
}

EffectiveHamiltonians effective_hamiltonians(const ClusterProblem& problem, const Mat& x, int threads) {
  const int M = problem.n_clusters;
  const int n = problem.basis.size();
  if (x.rows() != M * n || x.cols() != M * n) {
    throw Error(ErrorKind::InvalidInput, "effective_hamiltonians: X has the wrong block structure");
  }
  const PairIndex pairs(M);
  EffectiveHamiltonians out;
  out.single.resize(M);
  out.pair.resize(pairs.size());
  parallel_for(M, threads, [&](int i) {
    out.single[i] = effective_single(problem.h_single[i], x.block(i * n, i * n, n, n), problem.basis);
  });
  parallel_for(pairs.size(), threads, [&](int k) {
    auto [i, j] = pairs[k];
    out.pair[k] = effective_pair(problem.pair_term(i, j), x.block(i * n, j * n, n, n), problem.basis);
  });
  return out;
}

double primal_energy(const ClusterProblem& problem, const MarginalSet& marginals) {
  double e = 0.0;
  for (int i = 0; i < problem.n_clusters; ++i) e += frob(problem.h_single[i], marginals.single[i]);
  const PairIndex pairs(problem.n_clusters);
  for (const auto& [key, h] : problem.h_pair) e += frob(h, marginals.pair[pairs(key.first, key.second)]);
  return e;
}

double feasibility_error(const MarginalSet& marginals, const std::vector<Mat>& aux) {
  const int M = static_cast<int>(marginals.single.size());
  if (M < 2) return 0.0;
  const PairIndex pairs(M);
  const int m = static_cast<int>(marginals.single[0].rows());
  const auto shape = BipartiteShape::square(m);
  double sum = 0.0;
  for (int k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    const Mat& r = marginals.pair[k];
    sum += (partial_trace_second(r, shape) - marginals.single[i]).squaredNorm();
    sum += (partial_trace_first(r, shape) - marginals.single[j]).squaredNorm();
    sum += (r - aux[k]).squaredNorm();
  }
  return std::sqrt(2.0 * sum / (static_cast<double>(M) * (M - 1)));
}

double feasibility_error_ti(const Mat& rho0, const std::vector<Mat>& rho_pair, const std::vector<Mat>& aux) {
  const int M = static_cast<int>(rho_pair.size());
  if (M < 2) return 0.0;
  const auto shape = BipartiteShape::square(static_cast<int>(rho0.rows()));
  double sum = 0.0;
  for (int d = 1; d < M; ++d) {
    sum += (partial_trace_second(rho_pair[d], shape) - rho0).squaredNorm();
    sum += (partial_trace_first(rho_pair[d], shape) - rho0).squaredNorm();
    sum += (rho_pair[d] - aux[d]).squaredNorm();
  }
  return std::sqrt(sum / (M - 1));
}

}  // namespace margsdp
