#include <gtest/gtest.h>

#include "helpers.hpp"
#include "margsdp/fermion_models.hpp"
#include "margsdp/oracle.hpp"
#include "margsdp/sdp_core.hpp"
#include "margsdp/spin_models.hpp"

using namespace margsdp;
using namespace testing_util;

namespace {

// Same operators, but forces the generic (non-permutation) code paths.
OperatorBasis generic_copy(const OperatorBasis& b) {
  OperatorBasis g = b;
  g.matrix_units = false;
  return g;
}

OperatorBasis graded_basis(int m) {
  OperatorBasis b = complete_basis(m);
  b.parity_graded = true;
  return b;
}

MarginalSet random_marginals(std::mt19937_64& rng, int M, int m) {
  MarginalSet s;
  for (int i = 0; i < M; ++i) s.single.push_back(random_density(rng, m));
  for (int k = 0; k < PairIndex(M).size(); ++k) s.pair.push_back(random_density(rng, m * m));
  return s;
}

}  // namespace

TEST(MomentMatrix, FastAndGenericPathsAgree) {
  std::mt19937_64 rng(1);
  for (bool graded : {false, true}) {
    for (int m : {2, 4}) {
      const OperatorBasis fast = graded ? graded_basis(m) : complete_basis(m);
      const OperatorBasis slow = generic_copy(fast);
      const Mat rho = random_density(rng, m), rho2 = random_density(rng, m * m);
      EXPECT_LT(max_abs(g_single_block(rho, fast) - g_single_block(rho, slow)), 1e-14);
      EXPECT_LT(max_abs(g_pair_block(rho2, fast) - g_pair_block(rho2, slow)), 1e-14);
      const Mat xs = random_symmetric(rng, m * m), xp = random_matrix(rng, m * m, m * m);
      const Mat h = random_symmetric(rng, m), h2 = random_symmetric(rng, m * m);
      EXPECT_LT(max_abs(effective_single(h, xs, fast) - effective_single(h, xs, slow)), 1e-13);
      EXPECT_LT(max_abs(effective_pair(h2, xp, fast) - effective_pair(h2, xp, slow)), 1e-13);
    }
  }
}

TEST(MomentMatrix, BlocksAreExpectationsOfProducts) {
  std::mt19937_64 rng(2);
  const int m = 2;
  const OperatorBasis b = complete_basis(m);
  const Mat rho = random_density(rng, m), rho2 = random_density(rng, m * m);
  const Mat gs = g_single_block(rho, b), gp = g_pair_block(rho2, b);
  for (int a = 0; a < b.size(); ++a)
    for (int c = 0; c < b.size(); ++c) {
      EXPECT_NEAR(gs(a, c), frob((b.ops[a].transpose() * b.ops[c]).transpose(), rho), 1e-15);
      EXPECT_NEAR(gp(a, c), frob(kron(b.ops[a].transpose(), b.ops[c]).transpose(), rho2), 1e-15);
    }
}

TEST(MomentMatrix, GradedBlocksMatchJordanWignerProducts) {
  std::mt19937_64 rng(3);
  for (int m : {2, 4}) {
    const OperatorBasis b = graded_basis(m);
    const auto obs = jw_pair_observables(b);
    const Mat rho = random_density(rng, m), rho2 = random_density(rng, m * m);
    const Mat gs = g_single_block(rho, b), gp = g_pair_block(rho2, b);
    for (int a = 0; a < b.size(); ++a)
      for (int c = 0; c < b.size(); ++c) {
        EXPECT_NEAR(gs(a, c), frob(obs.single[a][c].transpose(), rho), 1e-14);
        EXPECT_NEAR(gp(a, c), frob(obs.pair[a][c].transpose(), rho2), 1e-14);
      }
  }
}

TEST(MomentMatrix, AssemblyLayout) {
  std::mt19937_64 rng(4);
  const auto basis = complete_basis(2);
  const auto s = random_marginals(rng, 3, 2);
  const Mat g = assemble_g(s, basis);
  ASSERT_EQ(g.rows(), 12);
  const PairIndex pairs(3);
  EXPECT_LT(max_abs(g.block(0, 0, 4, 4) - g_single_block(s.single[0], basis)), 1e-15);
  EXPECT_LT(max_abs(g.block(4, 8, 4, 4) - g_pair_block(s.pair[pairs(1, 2)], basis)), 1e-15);
  EXPECT_LT(max_abs(g.block(8, 4, 4, 4) - g_pair_block(s.pair[pairs(1, 2)], basis).transpose()), 1e-15);
}

// sum Tr[H'_i rho_i] + sum Tr[H'_ij rho_ij] = sum Tr[H rho] - Tr[X G]
TEST(EffectiveHamiltonians, AdjointIdentity) {
  std::mt19937_64 rng(5);
  const Lattice lat({4, 1});
  for (bool fermionic : {false, true}) {
    const ClusterDecomposition c(lat, {1, 1});
    const ClusterProblem p = fermionic ? build_spinless(lat, 0.5, c, false) : build_tfi(lat, 0.7, c);
    const int n = p.basis.size();
    const Mat x = random_symmetric(rng, p.n_clusters * n);
    const auto s = random_marginals(rng, p.n_clusters, p.local_dim);
    const auto heff = effective_hamiltonians(p, x);
    double lhs = 0.0;
    for (int i = 0; i < p.n_clusters; ++i) lhs += frob(heff.single[i], s.single[i]);
    for (size_t k = 0; k < s.pair.size(); ++k) lhs += frob(heff.pair[k], s.pair[k]);
    const double rhs = primal_energy(p, s) - frob(x, assemble_g(s, p.basis));
    EXPECT_NEAR(lhs, rhs, 1e-10) << (fermionic ? "fermionic" : "spin");
  }
}

TEST(EffectiveHamiltonians, ZeroDualLeavesHamiltonian) {
  const Lattice lat({3, 1});
  const auto p = build_afh(lat, ClusterDecomposition(lat, {1, 1}));
  const auto heff = effective_hamiltonians(p, Mat::Zero(12, 12));
  for (int i = 0; i < 3; ++i) EXPECT_LT(max_abs(heff.single[i] - p.h_single[i]), 1e-15);
  const PairIndex pairs(3);
  for (int k = 0; k < pairs.size(); ++k) EXPECT_LT(max_abs(heff.pair[k] - p.pair_term(pairs[k].first, pairs[k].second)), 1e-15);
}

TEST(MomentMatrix, ExactMarginalsGivePsdMoments) {
  const Lattice lat({6, 1});
  for (int model = 0; model < 3; ++model) {
    for (std::vector<int> shape : {std::vector<int>{1, 1}, {2, 1}}) {
      const ClusterDecomposition c(lat, shape);
      const ClusterProblem p = model == 0   ? build_tfi(lat, 1.0, c)
                               : model == 1 ? build_afh(lat, c)
                                            : build_spinless(lat, 1.0, c, false);
      const auto gs = ground_energy_dense(p);
      const auto marg = exact_marginals(gs.vector, p);
      EXPECT_GT(lapack_min_eig(assemble_g(marg, p.basis)), -1e-10) << "model " << model;
    }
  }
}

TEST(Feasibility, ZeroForConsistentMarginals) {
  std::mt19937_64 rng(6);
  const auto shape = BipartiteShape::square(2);
  MarginalSet s;
  const Mat a = random_density(rng, 2), b = random_density(rng, 2), c = random_density(rng, 2);
  s.single = {a, b, c};
  s.pair = {kron(a, b), kron(a, c), kron(b, c)};
  EXPECT_LT(feasibility_error(s, s.pair), 1e-15);
  auto aux = s.pair;
  aux[1](0, 0) += 1.0;
  // One unit in one of three pairs: sqrt((2/3)/2 * 1).
  EXPECT_NEAR(feasibility_error(s, aux), std::sqrt(1.0 / 3.0), 1e-14);
  EXPECT_LT(max_abs(partial_trace_second(s.pair[0], shape) - a), 1e-15);
}

TEST(Feasibility, TranslationInvariantFormMatchesGeneral) {
  std::mt19937_64 rng(7);
  const int M = 5;
  const Mat r0 = random_density(rng, 2);
  std::vector<Mat> rp(M), aux(M);
  // rho_0d must equal the swap of rho_0(M-d) for the reduced data to be TI.
  for (int d = 1; d <= M / 2; ++d) {
    rp[d] = random_density(rng, 4);
    rp[M - d] = swap_factors(rp[d], BipartiteShape::square(2));
  }
  for (int d = 1; d < M; ++d) aux[d] = psd_project(Mat(rp[d] + 0.01 * random_symmetric(rng, 4)));
  for (int d = 1; d <= M / 2; ++d) aux[M - d] = swap_factors(aux[d], BipartiteShape::square(2));
  MarginalSet s;
  s.single.assign(M, r0);
  std::vector<Mat> full_aux;
  const PairIndex pairs(M);
  for (int k = 0; k < pairs.size(); ++k) {
    const int d = (pairs[k].second - pairs[k].first) % M;
    s.pair.push_back(rp[d]);
    full_aux.push_back(aux[d]);
  }
  EXPECT_NEAR(feasibility_error(s, full_aux), feasibility_error_ti(r0, rp, aux), 1e-13);
}
