#include <gtest/gtest.h>

#include "helpers.hpp"
#include "margsdp/error.hpp"
#include "margsdp/fermion_models.hpp"
#include "margsdp/oracle.hpp"
#include "margsdp/spin_models.hpp"

using namespace margsdp;
using namespace testing_util;

namespace {

ClusterProblem tfi(std::vector<int> dims, double h, std::vector<int> cluster, bool periodic = true) {
  const Lattice lat(dims, periodic);
  return build_tfi(lat, h, ClusterDecomposition(lat, cluster));
}

ClusterProblem sf(std::vector<int> dims, double U, std::vector<int> cluster, bool long_range = false) {
  const Lattice lat(dims);
  return build_spinless(lat, U, ClusterDecomposition(lat, cluster), long_range);
}

}  // namespace

TEST(Oracle, SingleSiteField) {
  const auto gs = ground_energy_dense(tfi({1, 1}, 1.0, {1, 1}));
  EXPECT_NEAR(gs.energy, -1.0, 1e-14);
}

TEST(Oracle, TwoSiteHeisenbergSinglet) {
  const Lattice lat({2, 1}, false);
  const auto p = build_afh(lat, ClusterDecomposition(lat, {1, 1}));
  const auto gs = ground_energy_dense(p);
  EXPECT_NEAR(gs.energy, -3.0, 1e-12);
  // Singlet marginals: maximally mixed sites, pair = projector on the singlet.
  const auto m = exact_marginals(gs.vector, p);
  EXPECT_LT(max_abs(m.single[0] - Mat::Identity(2, 2) / 2.0), 1e-12);
  Vec singlet(4);
  singlet << 0, 1, -1, 0;
  singlet /= std::sqrt(2.0);
  EXPECT_LT(max_abs(m.pair[0] - singlet * singlet.transpose()), 1e-12);
}

TEST(Oracle, LanczosMatchesDense) {
  for (const auto& p : {tfi({10, 1}, 1.0, {1, 1}), tfi({10, 1}, 0.4, {2, 1}), sf({10, 1}, 1.5, {1, 1}),
                        tfi({5, 2}, 1.2, {1, 2})}) {
    const double dense = ground_energy_dense(p).energy;
    const auto lz = ground_energy_lanczos(p);
    EXPECT_TRUE(lz.converged);
    EXPECT_LT(lz.residual, 1e-9);
    EXPECT_NEAR(lz.energy, dense, 1e-9) << p.model;
  }
}

TEST(Oracle, LanczosVectorIsAnEigenvector) {
  const auto p = tfi({12, 1}, 1.0, {2, 1});
  const auto lz = ground_energy_lanczos(p);
  const GlobalHamiltonian h(p);
  Vec hv;
  h.apply(lz.vector, hv);
  EXPECT_NEAR(lz.vector.norm(), 1.0, 1e-12);
  EXPECT_NEAR(lz.vector.dot(hv), lz.energy, 1e-10);
  EXPECT_LT((hv - lz.energy * lz.vector).norm(), 1e-8);
}

TEST(Oracle, LanczosFlagsNonConvergence) {
  const auto lz = ground_energy_lanczos(tfi({10, 1}, 1.0, {1, 1}), 3, 1e-12, 0);
  EXPECT_FALSE(lz.converged);
  EXPECT_GT(lz.residual, 1e-12);
  EXPECT_GT(lz.energy, ground_energy_dense(tfi({10, 1}, 1.0, {1, 1})).energy - 1e-12);
}

TEST(Oracle, MatrixFreeApplyMatchesDense) {
  std::mt19937_64 rng(3);
  for (const auto& p : {tfi({6, 1}, 0.7, {2, 1}), sf({6, 1}, 0.9, {3, 1}), sf({6, 1}, 0.9, {1, 1}, true)}) {
    const GlobalHamiltonian h(p);
    const Mat d = h.dense();
    EXPECT_LT(max_abs(d - d.transpose()), 1e-15);
    const Vec x = random_matrix(rng, h.dim(), 1);
    Vec y;
    h.apply(x, y);
    EXPECT_LT((y - d * x).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Oracle, DimensionCaps) {
  try {
    GlobalHamiltonian(tfi({13, 1}, 1.0, {1, 1})).dense();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    EXPECT_NE(std::string(e.what()).find("Lanczos"), std::string::npos);
  }
  EXPECT_THROW(GlobalHamiltonian(tfi({24, 1}, 1.0, {1, 1})), Error);
  EXPECT_EQ(oracle_energy(tfi({8, 1}, 1.0, {1, 1})).method, "dense");
  EXPECT_EQ(oracle_energy(tfi({12, 1}, 1.0, {1, 1})).method, "lanczos");
}

TEST(Oracle, SpectrumIndependentOfClustering) {
  const double a = ground_energy_dense(tfi({4, 2}, 0.8, {1, 1})).energy;
  EXPECT_NEAR(ground_energy_dense(tfi({4, 2}, 0.8, {2, 1})).energy, a, 1e-10);
  EXPECT_NEAR(ground_energy_dense(tfi({4, 2}, 0.8, {2, 2})).energy, a, 1e-10);
  EXPECT_NEAR(ground_energy_dense(tfi({4, 2}, 0.8, {1, 2})).energy, a, 1e-10);
}

TEST(FreeFermions, Examples) {
  EXPECT_NEAR(free_fermion_energy(Lattice({2, 1}, false)), -1.0, 1e-14);
  EXPECT_NEAR(free_fermion_energy(Lattice({4, 1})), -2.0, 1e-14);
  // Ring of 8: -2 sum over occupied cos(2 pi k / 8).
  EXPECT_NEAR(free_fermion_energy(Lattice({8, 1})), -2.0 * (1.0 + 2.0 * std::cos(M_PI / 4.0)), 1e-13);
}

TEST(FreeFermions, MatchManyBodyGroundState) {
  for (auto [dims, cluster] : {std::pair{std::vector<int>{8, 1}, std::vector<int>{1, 1}},
                               {std::vector<int>{8, 1}, std::vector<int>{2, 1}},
                               {std::vector<int>{6, 1}, std::vector<int>{3, 1}},
                               {std::vector<int>{4, 2}, std::vector<int>{2, 1}},
                               {std::vector<int>{3, 3}, std::vector<int>{1, 1}}}) {
    const auto p = sf(dims, 0.0, cluster);
    EXPECT_NEAR(ground_energy_dense(p).energy, free_fermion_energy(p.lattice), 1e-10)
        << format_dims(dims) << " / " << format_dims(cluster);
  }
}

TEST(ExactMarginals, ProductState) {
  const auto p = tfi({3, 1}, 1.0, {1, 1});
  Vec a(2), b(2), c(2);
  a << 1, 0;
  b << 0.6, 0.8;
  c << std::sqrt(0.5), -std::sqrt(0.5);
  const Vec v = kron(a, kron(b, c));
  const auto m = exact_marginals(v, p);
  EXPECT_LT(max_abs(m.single[1] - b * b.transpose()), 1e-14);
  const PairIndex pairs(3);
  EXPECT_LT(max_abs(m.pair[pairs(0, 2)] - kron(a * a.transpose(), c * c.transpose())), 1e-14);
}

TEST(ExactMarginals, ReproduceGroundEnergy) {
  for (const auto& p : {tfi({6, 1}, 1.0, {1, 1}), tfi({6, 1}, 1.0, {2, 1}), tfi({4, 2}, 0.5, {2, 1}),
                        sf({6, 1}, 1.0, {1, 1}), sf({6, 1}, 2.0, {2, 1}), sf({6, 1}, 1.0, {1, 1}, true),
                        sf({4, 2}, 0.5, {2, 1})}) {
    const auto gs = ground_energy_dense(p);
    const auto m = exact_marginals(gs.vector, p);
    EXPECT_NEAR(primal_energy(p, m), gs.energy, 1e-10) << p.model << " " << format_dims(p.clusters.cluster_shape());
    for (const auto& r : m.pair) {
      EXPECT_NEAR(r.trace(), 1.0, 1e-12);
      EXPECT_GT(lapack_min_eig(r), -1e-12);
    }
  }
}

TEST(ExactMarginals, PartialTracesAreConsistent) {
  const auto p = sf({6, 1}, 1.0, {2, 1});
  const auto m = exact_marginals(ground_energy_dense(p).vector, p);
  EXPECT_LT(feasibility_error(m, m.pair), 1e-12);
}
