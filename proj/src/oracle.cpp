#include "margsdp/oracle.hpp"

#include <bit>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "margsdp/error.hpp"

namespace margsdp {

namespace {

inline bool odd(long x) { return std::popcount(static_cast<unsigned long>(x)) & 1; }

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

GlobalHamiltonian::GlobalHamiltonian(const ClusterProblem& problem)
    : n_clusters_(problem.n_clusters), local_dim_(problem.local_dim), fermionic_(problem.fermionic) {
  const int m = local_dim_;
  const double cap = static_cast<double>(kLanczosDimCap);
  if (std::pow(static_cast<double>(m), n_clusters_) > cap) {
    throw Error(ErrorKind::InvalidConfig, "global Hilbert space of " + std::to_string(problem.n_sites()) +
                                              " sites exceeds the oracle cap of 2^22 states");
  }
  dim_ = ipow(m, n_clusters_);
  for (int g = 0; g < n_clusters_; ++g) {
    Term t;
    t.g = g;
    const Mat& h = problem.h_single[g];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (h(a, b) != 0.0) t.entries.push_back({a, b, h(a, b), odd(a) != odd(b), false});
    if (!t.entries.empty()) terms_.push_back(std::move(t));
  }
  for (const auto& [key, h] : problem.h_pair) {
    Term t;
    t.g = key.first;
    t.d = key.second;
    for (int row = 0; row < m * m; ++row)
      for (int col = 0; col < m * m; ++col) {
        if (h(row, col) == 0.0) continue;
        const int p = row / m, r = row % m, q = col / m, s = col % m;
        const bool odd_right = odd(r) != odd(s);
        t.entries.push_back({row, col, h(row, col), (odd(p) != odd(q)) != odd_right, odd_right});
      }
    if (!t.entries.empty()) terms_.push_back(std::move(t));
  }
}

template <typename Fn>
void GlobalHamiltonian::visit(const Term& t, Fn&& fn) const {
  const long m = local_dim_;
  const long outer = ipow(m, t.g);
  if (t.d < 0) {
    const long inner = ipow(m, n_clusters_ - 1 - t.g);
    for (const auto& e : t.entries)
      for (long o = 0; o < outer; ++o) {
        const double v = (fermionic_ && e.odd_total && odd(o)) ? -e.value : e.value;
        const long r0 = (o * m + e.row) * inner, c0 = (o * m + e.col) * inner;
        for (long i = 0; i < inner; ++i) fn(r0 + i, c0 + i, v);
      }
    return;
  }
  const long mid = ipow(m, t.d - t.g - 1);
  const long inner = ipow(m, n_clusters_ - 1 - t.d);
  for (const auto& e : t.entries) {
    const long a = e.row / m, c = e.row % m, b = e.col / m, f = e.col % m;
    for (long o = 0; o < outer; ++o)
      for (long mi = 0; mi < mid; ++mi) {
        bool flip = false;
        if (fermionic_) flip = (e.odd_total && odd(o)) != (e.odd_right && odd(mi));
        const double v = flip ? -e.value : e.value;
        const long r0 = (((o * m + a) * mid + mi) * m + c) * inner;
        const long c0 = (((o * m + b) * mid + mi) * m + f) * inner;
        for (long i = 0; i < inner; ++i) fn(r0 + i, c0 + i, v);
      }
  }
}

void GlobalHamiltonian::apply(const Vec& x, Vec& y) const {
  if (x.size() != dim_) throw Error(ErrorKind::InvalidInput, "GlobalHamiltonian::apply: wrong vector length");
  y.setZero(dim_);
  for (const auto& t : terms_) visit(t, [&](long r, long c, double v) { y[r] += v * x[c]; });
}

Mat GlobalHamiltonian::dense() const {
  if (dim_ > kDenseDimCap) {
    throw Error(ErrorKind::InvalidConfig, "dense oracle limited to dimension " + std::to_string(kDenseDimCap) +
                                              " (got " + std::to_string(dim_) + "); use the Lanczos oracle");
  }
  Mat h = Mat::Zero(dim_, dim_);
  for (const auto& t : terms_) visit(t, [&](long r, long c, double v) { h(r, c) += v; });
  return h;
}

GroundState ground_energy_dense(const ClusterProblem& problem) {
  const GlobalHamiltonian h(problem);
  Eigen::SelfAdjointEigenSolver<Mat> es(h.dense());
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "dense oracle eigensolver failed");
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

LanczosResult ground_energy_lanczos(const ClusterProblem& problem, int krylov_dim, double tol, int max_restarts,
                                    std::uint64_t seed) {
  const GlobalHamiltonian h(problem);
  const long n = h.dim();
  LanczosResult out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec v(n);
  for (long i = 0; i < n; ++i) v[i] = normal(rng);
  v.normalize();

  const int k_max = static_cast<int>(std::min<long>(krylov_dim, n));
  Mat basis(n, k_max);
  Vec w(n);
  for (int cycle = 0; cycle <= max_restarts; ++cycle) {
    std::vector<double> alpha, beta;
    basis.col(0) = v;
    Eigen::SelfAdjointEigenSolver<Mat> tri;
    int k = 0;
    for (int j = 0; j < k_max; ++j) {
      h.apply(basis.col(j), w);
      ++out.matvecs;
      alpha.push_back(basis.col(j).dot(w));
      for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
      const double b = w.norm();
      k = j + 1;
      Mat t = Mat::Zero(k, k);
      for (int i = 0; i < k; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      tri.compute(t);
      const double estimate = b * std::abs(tri.eigenvectors()(k - 1, 0));
      if (b < 1e-13 || estimate < 0.1 * tol || j + 1 == k_max) break;
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }
    v = basis.leftCols(k) * tri.eigenvectors().col(0);
    v.normalize();
    h.apply(v, w);
    ++out.matvecs;
    out.energy = v.dot(w);
    out.residual = (w - out.energy * v).norm();
    if (out.residual < tol || k == n) {
      out.converged = true;
      break;
    }
  }
  out.vector = std::move(v);
  return out;
}

MarginalSet exact_marginals(const Vec& v, const ClusterProblem& problem) {
  const int M = problem.n_clusters;
  const long m = problem.local_dim;
  if (v.size() != ipow(m, M)) throw Error(ErrorKind::InvalidInput, "exact_marginals: vector length mismatch");
  const bool graded = problem.fermionic;
  MarginalSet out;
  out.single.resize(M);

  for (int g = 0; g < M; ++g) {
    const long outer = ipow(m, g), inner = ipow(m, M - 1 - g);
    Mat c[2] = {Mat::Zero(m, m), Mat::Zero(m, m)};
    Mat u(m, inner);
    for (long o = 0; o < outer; ++o) {
      for (long a = 0; a < m; ++a) u.row(a) = v.segment((o * m + a) * inner, inner).transpose();
      c[graded && odd(o)].noalias() += u * u.transpose();
    }
    Mat rho(m, m);
    for (long p = 0; p < m; ++p)
      for (long q = 0; q < m; ++q) {
        // rho[q, p] = <E_pq>
        const bool flip = odd(p) != odd(q);
        rho(q, p) = c[0](p, q) + (flip ? -c[1](p, q) : c[1](p, q));
      }
    out.single[g] = rho;
  }

  const PairIndex pairs(M);
  out.pair.resize(pairs.size());
  const long mm = m * m;
  for (int k = 0; k < pairs.size(); ++k) {
    auto [g, d] = pairs[k];
    const long outer = ipow(m, g), mid = ipow(m, d - g - 1), inner = ipow(m, M - 1 - d);
    Mat c[4] = {Mat::Zero(mm, mm), Mat::Zero(mm, mm), Mat::Zero(mm, mm), Mat::Zero(mm, mm)};
    Mat u(mm, inner);
    for (long o = 0; o < outer; ++o)
      for (long mi = 0; mi < mid; ++mi) {
        for (long a = 0; a < m; ++a)
          for (long b = 0; b < m; ++b)
            u.row(a * m + b) = v.segment((((o * m + a) * mid + mi) * m + b) * inner, inner).transpose();
        const int cls = graded ? (odd(o) ? 1 : 0) + (odd(mi) ? 2 : 0) : 0;
        c[cls].noalias() += u * u.transpose();
      }
    Mat rho(mm, mm);
    for (long p = 0; p < m; ++p)
      for (long q = 0; q < m; ++q)
        for (long r = 0; r < m; ++r)
          for (long s = 0; s < m; ++s) {
            // rho[(q,s),(p,r)] = <E_pq (x) E_rs>
            const bool odd_right = odd(r) != odd(s);
            const bool odd_total = (odd(p) != odd(q)) != odd_right;
            double acc = 0.0;
            for (int cls = 0; cls < 4; ++cls) {
              const bool flip = (odd_total && (cls & 1)) != (odd_right && (cls & 2));
              acc += flip ? -c[cls](p * m + r, q * m + s) : c[cls](p * m + r, q * m + s);
            }
            rho(q * m + s, p * m + r) = acc;
          }
    out.pair[k] = rho;
  }
  return out;
}

double free_fermion_energy(const Lattice& lattice) {
  const int n = lattice.n_sites();
  Mat t = Mat::Zero(n, n);
  for (auto [i, j] : lattice.bonds()) {
    t(i, j) -= 1.0;
    t(j, i) -= 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(t, Eigen::EigenvaluesOnly);
  double e = 0.0;
  for (int k = 0; k < n; ++k)
    if (es.eigenvalues()(k) < 0.0) e += es.eigenvalues()(k);
  return e;
}

OracleEstimate oracle_energy(const ClusterProblem& problem) {
  const double dim = std::pow(static_cast<double>(problem.local_dim), problem.n_clusters);
  if (dim <= kDenseAutoDim) return {ground_energy_dense(problem).energy / problem.n_sites(), "dense", 0.0, true};
  const auto r = ground_energy_lanczos(problem);
  return {r.energy / problem.n_sites(), "lanczos", r.residual, r.converged};
}

}  // namespace margsdp
