#include <gtest/gtest.h>

#include "helpers.hpp"
#include "margsdp/error.hpp"
#include "margsdp/oracle.hpp"
#include "margsdp/solver_ti.hpp"
#include "margsdp/spin_models.hpp"

using namespace margsdp;
using namespace testing_util;

namespace {

int n_cells(const std::vector<int>& grid) {
  int n = 1;
  for (int g : grid) n *= g;
  return n;
}

std::vector<int> unflatten(int k, const std::vector<int>& grid) {
  std::vector<int> c(grid.size());
  for (int a = static_cast<int>(grid.size()) - 1; a >= 0; --a) {
    c[a] = k % grid[a];
    k /= grid[a];
  }
  return c;
}

int flatten(const std::vector<int>& c, const std::vector<int>& grid) {
  int k = 0;
  for (size_t a = 0; a < grid.size(); ++a) k = k * grid[a] + ((c[a] % grid[a]) + grid[a]) % grid[a];
  return k;
}

int disp(int i, int j, const std::vector<int>& grid) {
  auto a = unflatten(i, grid), b = unflatten(j, grid);
  for (size_t x = 0; x < a.size(); ++x) b[x] -= a[x];
  return flatten(b, grid);
}

int neg(int d, const std::vector<int>& grid) {
  auto c = unflatten(d, grid);
  for (int& x : c) x = -x;
  return flatten(c, grid);
}

// First block row of a random symmetric block-circulant matrix: C_{-d} = C_d^T.
std::vector<Mat> random_row(std::mt19937_64& rng, int n, const std::vector<int>& grid) {
  const int N = n_cells(grid);
  std::vector<Mat> row(N);
  for (int d = 0; d < N; ++d) {
    const int nd = neg(d, grid);
    if (nd < d) continue;
    row[d] = d == nd ? random_symmetric(rng, n) : random_matrix(rng, n, n);
    if (nd != d) row[nd] = row[d].transpose();
  }
  return row;
}

Mat dense_circulant(const std::vector<Mat>& row, const std::vector<int>& grid) {
  const int N = n_cells(grid);
  const int n = static_cast<int>(row[0].rows());
  Mat out(N * n, N * n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) out.block(i * n, j * n, n, n) = row[disp(i, j, grid)];
  return out;
}

ClusterProblem tfi(std::vector<int> dims, double h, std::vector<int> cluster, bool periodic = true) {
  const Lattice lat(dims, periodic);
  return build_tfi(lat, h, ClusterDecomposition(lat, cluster));
}

}  // namespace

TEST(UpdateXTi, MatchesDenseBlockCirculantProjection) {
  std::mt19937_64 rng(1);
  for (const std::vector<int>& grid : {std::vector<int>{4}, {6}, {2, 3}, {2, 2}}) {
    for (int n : {2, 4}) {
      const auto x = random_row(rng, n, grid), g = random_row(rng, n, grid);
      const double eps = 0.7;
      const auto got = update_x_ti(x, g, eps, grid);
      const Mat dense = lapack_psd_project(dense_circulant(x, grid) + eps * dense_circulant(g, grid));
      for (int d = 0; d < n_cells(grid); ++d)
        EXPECT_LT(max_abs(got[d] - dense.block(0, d * n, n, n)), 1e-10) << "grid size " << n_cells(grid) << " n=" << n;
      // The dense projection stays block circulant.
      EXPECT_LT(max_abs(dense_circulant(got, grid) - dense), 1e-10);
    }
  }
}

TEST(UpdateXTi, FixedPointAtZeroStep) {
  std::mt19937_64 rng(2);
  const std::vector<int> grid{6};
  const auto zero = std::vector<Mat>(6, Mat::Zero(4, 4));
  const auto x = update_x_ti(random_row(rng, 4, grid), zero, 1.0, grid);
  const auto again = update_x_ti(x, random_row(rng, 4, grid), 0.0, grid);
  for (int d = 0; d < 6; ++d) EXPECT_LT(max_abs(again[d] - x[d]), 1e-10);
}

TEST(UpdateXTi, PositivelyHomogeneous) {
  std::mt19937_64 rng(3);
  const std::vector<int> grid{4};
  auto x = random_row(rng, 2, grid), g = random_row(rng, 2, grid);
  const auto base = update_x_ti(x, g, 0.5, grid);
  for (auto& b : x) b *= 3.0;
  for (auto& b : g) b *= 3.0;
  const auto scaled = update_x_ti(x, g, 0.5, grid);
  for (int d = 0; d < 4; ++d) EXPECT_LT(max_abs(scaled[d] - 3.0 * base[d]), 1e-10);
}

TEST(UpdateXTi, ThreadedMatchesSerial) {
  std::mt19937_64 rng(4);
  const std::vector<int> grid{2, 3};
  const auto x = random_row(rng, 4, grid), g = random_row(rng, 4, grid);
  const auto a = update_x_ti(x, g, 1.0, grid, 1), b = update_x_ti(x, g, 1.0, grid, 3);
  for (int d = 0; d < 6; ++d) EXPECT_LT(max_abs(a[d] - b[d]), 1e-14);
}

TEST(UpdateXTi, RejectsNonSymmetricRow) {
  std::mt19937_64 rng(5);
  const std::vector<int> grid{4};
  auto x = random_row(rng, 2, grid);
  const auto g = random_row(rng, 2, grid);
  x[1] = random_matrix(rng, 2, 2);  // breaks C_{-1} = C_1^T
  try {
    update_x_ti(x, g, 1.0, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BrokenSymmetry);
  }
  EXPECT_THROW(update_x_ti(std::vector<Mat>(3, Mat::Zero(2, 2)), std::vector<Mat>(3, Mat::Zero(2, 2)), 1.0, grid),
               Error);
}

TEST(SolveTi, RejectsNonTranslationInvariantProblems) {
  try {
    solve_ti(tfi({6, 1}, 1.0, {1, 1}, false), SolverConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
  }
  auto p = tfi({6, 1}, 1.0, {1, 1});
  p.translation_invariant = false;
  EXPECT_THROW(solve_ti(p, SolverConfig{}), Error);
}

TEST(SolveTi, ExactAtZeroField) {
  const auto r = solve_ti(tfi({20, 1}, 0.0, {1, 1}), SolverConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.energy_per_site, -1.0, 1e-5);
}

TEST(SolveTi, AgreesWithGeneralSolver) {
  for (auto [dims, cluster] : {std::pair{std::vector<int>{6, 1}, std::vector<int>{1, 1}},
                               {std::vector<int>{6, 1}, std::vector<int>{2, 1}},
                               {std::vector<int>{4, 2}, std::vector<int>{2, 1}}}) {
    const auto p = tfi(dims, 1.0, cluster);
    const auto ti = solve_ti(p, SolverConfig{});
    const auto gen = solve(p, SolverConfig{});
    EXPECT_TRUE(ti.converged);
    EXPECT_TRUE(gen.converged);
    EXPECT_NEAR(ti.energy_per_site, gen.energy_per_site, 1e-5) << format_dims(dims) << " / " << format_dims(cluster);
  }
}

TEST(SolveTi, IteratesMatchGeneralSolverStepByStep) {
  const auto p = tfi({5, 1}, 0.8, {1, 1});
  SolverConfig cfg;
  cfg.max_iters = 40;
  cfg.energy_tol = 0.0;
  cfg.symmetrized_site_update = true;
  const auto ti = solve_ti(p, cfg);
  const auto gen = solve(p, cfg);
  for (size_t k = 0; k < ti.state.history.size(); ++k)
    EXPECT_NEAR(ti.state.history[k].energy_per_site, gen.state.history[k].energy_per_site, 1e-9) << "iteration " << k;
}

TEST(SolveTi, ExpandedStateReproducesEnergy) {
  const auto p = tfi({8, 1}, 1.0, {2, 1});
  SolverConfig cfg;
  cfg.max_iters = 60;
  cfg.energy_tol = 0.0;
  const auto r = solve_ti(p, cfg);
  EXPECT_NEAR(energy_per_site(p, expand_ti(p, r.state)), r.energy_per_site, 1e-12);
  const auto full = expand_ti(p, r.state);
  EXPECT_EQ(full.pair.size(), static_cast<size_t>(PairIndex(4).size()));
}

TEST(SolveTi, SymmetrizedSiteUpdateReachesSameOptimum) {
  const auto p = tfi({8, 1}, 1.0, {1, 1});
  SolverConfig cfg;
  const auto a = solve_ti(p, cfg);
  cfg.symmetrized_site_update = true;
  const auto b = solve_ti(p, cfg);
  EXPECT_NEAR(a.energy_per_site, b.energy_per_site, 1e-5);
}

TEST(SolveTi, BoundsTightenWithClusterSize) {
  const auto e0 = oracle_energy(tfi({12, 1}, 1.0, {1, 1})).energy_per_site;
  double previous = -1e300;
  for (int L : {1, 2, 3}) {
    const auto r = solve_ti(tfi({12, 1}, 1.0, {L, 1}), SolverConfig{});
    EXPECT_LE(r.energy_per_site, e0 + 1e-6) << "cluster " << L;
    EXPECT_GE(r.energy_per_site, previous - 1e-6) << "cluster " << L;
    previous = r.energy_per_site;
  }
}

TEST(SolveTi, ResumedRunMatchesUninterrupted) {
  const auto p = tfi({6, 1}, 1.0, {1, 1});
  SolverConfig cfg;
  cfg.energy_tol = 0.0;
  cfg.max_iters = 30;
  const auto full = solve_ti(p, cfg);
  cfg.max_iters = 20;
  auto part = solve_ti(p, cfg);
  cfg.max_iters = 30;
  const auto rest = solve_ti(p, cfg, std::move(part.state));
  ASSERT_EQ(rest.state.history.size(), 30u);
  for (size_t k = 0; k < 30; ++k)
    EXPECT_EQ(rest.state.history[k].energy_per_site, full.state.history[k].energy_per_site);
}
