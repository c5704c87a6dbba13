#include "margsdp/spin_models.hpp"

#include "margsdp/error.hpp"

namespace margsdp {

namespace pauli {

Mat x() { return (Mat(2, 2) << 0, 1, 1, 0).finished(); }
Mat z() { return (Mat(2, 2) << 1, 0, 0, -1).finished(); }
Mat raising() { return (Mat(2, 2) << 0, 1, 0, 0).finished(); }
Mat lowering() { return (Mat(2, 2) << 0, 0, 1, 0).finished(); }

Mat heisenberg_bond() {
  // xx + yy = 2 (S+ S- + S- S+)
  return 2.0 * (kron(raising(), lowering()) + kron(lowering(), raising())) + kron(z(), z());
}

}  // namespace pauli

namespace {

inline int bit_at(long x, int pos, int n) { return static_cast<int>((x >> (n - 1 - pos)) & 1L); }

inline long with_bit(long x, int pos, int n, int value) {
  const long mask = 1L << (n - 1 - pos);
  return value ? (x | mask) : (x & ~mask);
}

}  // namespace

Mat lift_site(const Mat& op, int position, int n_sites) {
  if (op.rows() != 2 || op.cols() != 2 || position < 0 || position >= n_sites) {
    throw Error(ErrorKind::InvalidInput, "lift_site: bad operator or position");
  }
  const long dim = 1L << n_sites;
  Mat out = Mat::Zero(dim, dim);
  for (long x = 0; x < dim; ++x) {
    const int b = bit_at(x, position, n_sites);
    for (int r = 0; r < 2; ++r) {
      const double v = op(r, b);
      if (v != 0.0) out(with_bit(x, position, n_sites, r), x) += v;
    }
  }
  return out;
}

Mat lift_two_site(const Mat& op, int pos_a, int pos_b, int n_sites) {
  if (op.rows() != 4 || op.cols() != 4 || pos_a == pos_b || pos_a < 0 || pos_b < 0 || pos_a >= n_sites ||
      pos_b >= n_sites) {
    throw Error(ErrorKind::InvalidInput, "lift_two_site: bad operator or positions");
  }
  const long dim = 1L << n_sites;
  Mat out = Mat::Zero(dim, dim);
  for (long x = 0; x < dim; ++x) {
    const int col = 2 * bit_at(x, pos_a, n_sites) + bit_at(x, pos_b, n_sites);
    for (int r = 0; r < 4; ++r) {
      const double v = op(r, col);
      if (v == 0.0) continue;
      long y = with_bit(x, pos_a, n_sites, r >> 1);
      y = with_bit(y, pos_b, n_sites, r & 1);
      out(y, x) += v;
    }
  }
  return out;
}

ClusterProblem build_spin_model(std::string name, const Lattice& lattice, const ClusterDecomposition& clustering,
                                const Mat& site_term, const Mat& bond_term) {
  const int L = clustering.sites_per_cluster();
  if (2 * L > 24) throw Error(ErrorKind::InvalidConfig, "clusters too large for dense pair terms");
  ClusterProblem problem(std::move(name), lattice, clustering);
  const int m = 1 << L;
  problem.local_dim = m;
  problem.h_single.assign(problem.n_clusters, Mat::Zero(m, m));
  problem.basis = complete_basis(m);

  if (site_term.squaredNorm() > 0.0) {
    for (int s = 0; s < lattice.n_sites(); ++s) {
      problem.h_single[clustering.cluster_of(s)] += lift_site(site_term, clustering.position_in_cluster(s), L);
    }
  }
  for (auto [i, j] : lattice.bonds()) {
    const int ci = clustering.cluster_of(i), cj = clustering.cluster_of(j);
    const int pi = clustering.position_in_cluster(i), pj = clustering.position_in_cluster(j);
    if (ci == cj) {
      problem.h_single[ci] += lift_two_site(bond_term, pi, pj, L);
      continue;
    }
    // Pair space orders the lower-numbered cluster first.
    const int pos_i = ci < cj ? pi : L + pi;
    const int pos_j = ci < cj ? L + pj : pj;
    auto key = std::minmax(ci, cj);
    auto [it, inserted] = problem.h_pair.try_emplace({key.first, key.second}, Mat::Zero(m * m, m * m));
    it->second += lift_two_site(bond_term, pos_i, pos_j, 2 * L);
  }
  problem.translation_invariant = problem.check_translation_invariance();
  return problem;
}

ClusterProblem build_tfi(const Lattice& lattice, double h, const ClusterDecomposition& clustering) {
  return build_spin_model("tfi", lattice, clustering, -h * pauli::x(), -kron(pauli::z(), pauli::z()));
}

ClusterProblem build_afh(const Lattice& lattice, const ClusterDecomposition& clustering) {
  return build_spin_model("afh", lattice, clustering, Mat::Zero(2, 2), pauli::heisenberg_bond());
}

}  // namespace margsdp
