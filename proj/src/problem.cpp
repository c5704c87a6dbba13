#include "margsdp/problem.hpp"

#include <algorithm>
#include <bit>

#include "margsdp/error.hpp"

namespace margsdp {

OperatorBasis complete_basis(int m) {
  if (m < 2) throw Error(ErrorKind::InvalidInput, "complete_basis: m must be at least 2");
  OperatorBasis basis;
  basis.matrix_units = true;
  basis.ops.reserve(static_cast<size_t>(m) * m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      Mat e = Mat::Zero(m, m);
      e(p, q) = 1.0;
      basis.ops.push_back(std::move(e));
    }
  return basis;
}

Vec parity_diagonal(int m) {
  Vec p(m);
  for (int x = 0; x < m; ++x) p(x) = (std::popcount(static_cast<unsigned>(x)) % 2) ? -1.0 : 1.0;
  return p;
}

PairIndex::PairIndex(int n_clusters) : n_(n_clusters) {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) pairs_.emplace_back(i, j);
}

int PairIndex::operator()(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == j || i < 0 || j >= n_) throw Error(ErrorKind::InvalidInput, "PairIndex: invalid pair");
  // Pairs (i, *) start after sum_{a<i} (n - 1 - a) entries.
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

ClusterProblem::ClusterProblem(std::string model_name, Lattice lat, ClusterDecomposition decomposition)
    : model(std::move(model_name)), lattice(std::move(lat)), clusters(std::move(decomposition)) {
  n_clusters = clusters.n_clusters();
  sites_per_cluster = clusters.sites_per_cluster();
}

Mat ClusterProblem::pair_term(int g, int d) const {
  if (g > d) throw Error(ErrorKind::InvalidInput, "pair_term expects g < d");
  auto it = h_pair.find({g, d});
  if (it == h_pair.end()) return Mat::Zero(local_dim * local_dim, local_dim * local_dim);
  return it->second;
}

double ClusterProblem::scale() const {
  double s = 1.0;
  for (const auto& h : h_single) s = std::max(s, h.norm());
  for (const auto& [key, h] : h_pair) s = std::max(s, h.norm());
  return s;
}

bool ClusterProblem::check_translation_invariance(double tol) const {
  if (!lattice.periodic()) return false;
  for (int g = 1; g < n_clusters; ++g) {
    if ((h_single[g] - h_single[0]).cwiseAbs().maxCoeff() > tol) return false;
  }
  for (int g = 0; g < n_clusters; ++g)
    for (int d = g + 1; d < n_clusters; ++d) {
      const int disp = clusters.displacement(g, d);
      if ((pair_term(g, d) - pair_term(0, disp)).cwiseAbs().maxCoeff() > tol) return false;
    }
  return true;
}

}  // namespace margsdp
