#include "margsdp/fermion_models.hpp"

#include <algorithm>

#include "margsdp/error.hpp"
#include "margsdp/spin_models.hpp"

namespace margsdp {

Mat JordanWignerContext::creation(int position) const {
  if (position < 1 || position > n_modes) {
    throw Error(ErrorKind::InvalidInput,
                "JW mode position " + std::to_string(position) + " outside 1.." + std::to_string(n_modes));
  }
  Mat out = Mat::Identity(1, 1);
  for (int k = 1; k <= n_modes; ++k) {
    if (k < position) out = kron(out, pauli::z());
    else if (k == position) out = kron(out, pauli::lowering());
    else out = kron(out, Mat::Identity(2, 2));
  }
  return out;
}

Mat JordanWignerContext::number(int position) const {
  return creation(position) * annihilation(position);
}

Mat jw_creation(const JordanWignerContext& ctx, int position) { return ctx.creation(position); }

PairOrdering::PairOrdering(const ClusterDecomposition& clustering) {
  single_.reserve(clustering.n_clusters());
  for (int g = 0; g < clustering.n_clusters(); ++g) single_.push_back(clustering.sites(g));
}

PairOrdering::PairOrdering(std::vector<std::vector<int>> single) : single_(std::move(single)) {}

std::vector<int> PairOrdering::pair(int g, int d) const {
  if (g >= d) throw Error(ErrorKind::InvalidInput, "PairOrdering::pair expects g < d");
  std::vector<int> out = single_[g];
  out.insert(out.end(), single_[d].begin(), single_[d].end());
  return out;
}

int PairOrdering::position_in_single(int g, int site) const {
  const auto& s = single_[g];
  auto it = std::find(s.begin(), s.end(), site);
  return it == s.end() ? 0 : static_cast<int>(it - s.begin()) + 1;
}

int PairOrdering::position_in_pair(int g, int d, int site) const {
  if (int p = position_in_single(g, site)) return p;
  if (int p = position_in_single(d, site)) return static_cast<int>(single_[g].size()) + p;
  return 0;
}

namespace {

/// -(a_i^+ a_j + a_j^+ a_i) in a JW context, positions 1-based.
Mat hopping(const JordanWignerContext& ctx, int pi, int pj) {
  Mat t = ctx.creation(pi) * ctx.annihilation(pj);
  return -(t + t.transpose());
}

/// (n_i - 1/2)(n_j - 1/2)
Mat density_pair(const JordanWignerContext& ctx, int pi, int pj) {
  const Mat half = 0.5 * Mat::Identity(ctx.dim(), ctx.dim());
  return (ctx.number(pi) - half) * (ctx.number(pj) - half);
}

}  // namespace

ClusterProblem build_spinless(const Lattice& lattice, double U, const ClusterDecomposition& clustering,
                              bool long_range) {
  const int L = clustering.sites_per_cluster();
  if (2 * L > 12) throw Error(ErrorKind::InvalidConfig, "fermionic clusters limited to 6 sites");
  ClusterProblem problem(long_range ? "lrsf" : "sf", lattice, clustering);
  const int m = 1 << L;
  problem.local_dim = m;
  problem.fermionic = true;
  problem.basis = complete_basis(m);
  problem.basis.parity_graded = true;
  problem.h_single.assign(problem.n_clusters, Mat::Zero(m, m));

  PairOrdering order(clustering);
  const JordanWignerContext single_ctx{L};
  const JordanWignerContext pair_ctx{2 * L};

  auto pair_slot = [&](int g, int d) -> Mat& {
    auto [it, inserted] = problem.h_pair.try_emplace({g, d}, Mat::Zero(m * m, m * m));
    return it->second;
  };

  for (auto [i, j] : lattice.bonds()) {
    const int ci = clustering.cluster_of(i), cj = clustering.cluster_of(j);
    if (ci == cj) {
      const int pi = order.position_in_single(ci, i), pj = order.position_in_single(ci, j);
      problem.h_single[ci] += hopping(single_ctx, pi, pj);
      if (!long_range) problem.h_single[ci] += U * density_pair(single_ctx, pi, pj);
    } else {
      const int g = std::min(ci, cj), d = std::max(ci, cj);
      const int pi = order.position_in_pair(g, d, i), pj = order.position_in_pair(g, d, j);
      Mat& slot = pair_slot(g, d);
      slot += hopping(pair_ctx, pi, pj);
      if (!long_range) slot += U * density_pair(pair_ctx, pi, pj);
    }
  }

  if (long_range && U != 0.0) {
    const int n = lattice.n_sites();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        // Ordered sum over i != j visits each unordered pair twice.
        const double coeff = 2.0 * U / lattice.distance(i, j);
        const int ci = clustering.cluster_of(i), cj = clustering.cluster_of(j);
        if (ci == cj) {
          problem.h_single[ci] +=
              coeff * density_pair(single_ctx, order.position_in_single(ci, i), order.position_in_single(ci, j));
        } else {
          const int g = std::min(ci, cj), d = std::max(ci, cj);
          pair_slot(g, d) +=
              coeff * density_pair(pair_ctx, order.position_in_pair(g, d, i), order.position_in_pair(g, d, j));
        }
      }
  }
  problem.translation_invariant = problem.check_translation_invariance();
  return problem;
}

std::pair<Mat, Mat> parity_split(const Mat& a) {
  const Vec p = parity_diagonal(static_cast<int>(a.rows()));
  const Mat pap = p.asDiagonal() * a * p.asDiagonal();
  return {(a + pap) * 0.5, (a - pap) * 0.5};
}

Mat jw_lift_left(const Mat& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidInput, "jw_lift_left: operator is not square");
  return kron(a, Mat::Identity(a.rows(), a.rows()));
}

Mat jw_lift_right(const Mat& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidInput, "jw_lift_right: operator is not square");
  const auto m = a.rows();
  auto [even, odd] = parity_split(a);
  const Mat p = parity_diagonal(static_cast<int>(m)).asDiagonal();
  return kron(Mat::Identity(m, m), even) + kron(p, odd);
}

JwObservables jw_pair_observables(const OperatorBasis& basis) {
  const int n = basis.size();
  const int m = basis.local_dim();
  for (const auto& op : basis.ops) {
    if (op.rows() != m || op.cols() != m) {
      throw Error(ErrorKind::InvalidInput, "jw_pair_observables: operator not supported on a single cluster");
    }
  }
  JwObservables out;
  out.single.assign(n, std::vector<Mat>(n));
  out.pair.assign(n, std::vector<Mat>(n));
  std::vector<Mat> left(n), right(n);
  for (int a = 0; a < n; ++a) {
    left[a] = jw_lift_left(basis.ops[a]);
    right[a] = basis.parity_graded ? jw_lift_right(basis.ops[a]) : kron(Mat::Identity(m, m), basis.ops[a]);
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      out.single[a][b] = basis.ops[a].transpose() * basis.ops[b];
      out.pair[a][b] = left[a].transpose() * right[b];
    }
  return out;
}

}  // namespace margsdp
