#include "margsdp/solver_ti.hpp"

#include <chrono>
#include <cmath>

#include "margsdp/error.hpp"
#include "margsdp/parallel.hpp"

namespace margsdp {

namespace {

/// Flat index of -k on the grid.
int negated(int k, std::span<const int> grid) {
  int out = 0;
  int stride = 1;
  for (int a = static_cast<int>(grid.size()) - 1; a >= 0; --a) {
    const int c = (k / stride) % grid[a];
    out += ((grid[a] - c) % grid[a]) * stride;
    stride *= grid[a];
  }
  return out;
}

CMat hermitian_or_throw(const CMat& a, int k) {
  const double norm = a.norm();
  const double asym = (a - a.adjoint()).norm();
  if (asym > kSymmetryTolerance * std::max(norm, 1e-300) && asym > 0.0) {
    throw Error(ErrorKind::BrokenSymmetry, "Fourier block " + std::to_string(k) + " is not Hermitian (asymmetry " +
                                               std::to_string(asym / norm) + " relative)");
  }
  return (a + a.adjoint()) * 0.5;
}

}  // namespace

TiState TiState::initial(const ClusterProblem& problem) {
  const int N = problem.n_clusters;
  const int m = problem.local_dim;
  const int n = problem.basis.size();
  const int mm = m * m;
  TiState s;
  s.rho0 = Mat::Identity(m, m) / m;
  s.rho_pair.assign(N, Mat::Identity(mm, mm) / mm);
  s.aux.assign(N, Mat::Identity(mm, mm) / mm);
  s.lambda_pair.assign(N, Mat::Zero(mm, mm));
  s.lambda_left.assign(N, Mat::Zero(m, m));
  s.lambda_right.assign(N, Mat::Zero(m, m));
  for (auto* v : {&s.rho_pair, &s.aux, &s.lambda_pair, &s.lambda_left, &s.lambda_right}) (*v)[0].resize(0, 0);
  s.x_row.assign(N, Mat::Zero(n, n));
  s.x_row[0] = Mat::Identity(n, n);
  return s;
}

std::vector<Mat> update_x_ti(std::span<const Mat> x_row, std::span<const Mat> g_row, double eps,
                             std::span<const int> grid, int threads) {
  const int N = static_cast<int>(x_row.size());
  int cells = 1;
  for (int e : grid) cells *= e;
  if (N == 0 || cells != N || static_cast<int>(g_row.size()) != N) {
    throw Error(ErrorKind::InvalidInput, "update_x_ti: block rows do not match the grid");
  }
  std::vector<CMat> shifted(N);
  for (int d = 0; d < N; ++d) {
    if (x_row[d].rows() != x_row[0].rows() || g_row[d].rows() != x_row[d].rows() ||
        g_row[d].cols() != x_row[d].cols()) {
      throw Error(ErrorKind::InvalidInput, "update_x_ti: block " + std::to_string(d) + " has the wrong shape");
    }
    shifted[d] = (x_row[d] + eps * g_row[d]).cast<std::complex<double>>();
  }
  std::vector<CMat> hat = block_dft_forward(shifted, grid);

  // Real input: the block at -k is the conjugate of the block at k.
  std::vector<int> reps;
  for (int k = 0; k < N; ++k)
    if (negated(k, grid) >= k) reps.push_back(k);
  parallel_for(static_cast<int>(reps.size()), threads, [&](int r) {
    const int k = reps[r];
    hat[k] = psd_project(hermitian_or_throw(hat[k], k));
  });
  for (int k = 0; k < N; ++k) {
    const int nk = negated(k, grid);
    if (nk < k) hat[k] = hat[nk].conjugate();
  }

  std::vector<CMat> back = block_dft_inverse(hat, grid);
  double peak = 1.0, residue = 0.0;
  for (const auto& b : back) {
    peak = std::max(peak, b.real().cwiseAbs().maxCoeff());
    residue = std::max(residue, b.imag().cwiseAbs().maxCoeff());
  }
  if (residue > 1e-9 * peak) {
    throw Error(ErrorKind::BrokenSymmetry,
                "update_x_ti: imaginary residue " + std::to_string(residue) + " after the inverse transform");
  }
  std::vector<Mat> out(N);
  for (int d = 0; d < N; ++d) out[d] = back[d].real();
  return out;
}

std::vector<Mat> g_row_ti(const TiState& state, const OperatorBasis& basis) {
  const int N = static_cast<int>(state.rho_pair.size());
  std::vector<Mat> row(N);
  row[0] = g_single_block(state.rho0, basis);
  for (int d = 1; d < N; ++d) row[d] = g_pair_block(state.rho_pair[d], basis);
  return row;
}

double energy_per_site_ti(const ClusterProblem& problem, const TiState& state) {
  double e = frob(problem.h_single[0], state.rho0);
  for (int d = 1; d < problem.n_clusters; ++d) {
    auto it = problem.h_pair.find({0, d});
    if (it != problem.h_pair.end()) e += 0.5 * frob(it->second, state.rho_pair[d]);
  }
  return e / problem.sites_per_cluster;
}

MarginalSet expand_ti(const ClusterProblem& problem, const TiState& state) {
  const int M = problem.n_clusters;
  const PairIndex pairs(M);
  MarginalSet out;
  out.single.assign(M, state.rho0);
  out.pair.resize(pairs.size());
  for (int k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    out.pair[k] = state.rho_pair[problem.clusters.displacement(i, j)];
  }
  return out;
}

namespace {

void check_ti_state(const TiState& s, const ClusterProblem& problem) {
  const auto N = static_cast<size_t>(problem.n_clusters);
  const int n = problem.basis.size();
  if (s.rho0.rows() != problem.local_dim || s.rho_pair.size() != N || s.aux.size() != N ||
      s.lambda_pair.size() != N || s.lambda_left.size() != N || s.lambda_right.size() != N || s.x_row.size() != N ||
      s.x_row[0].rows() != n) {
    throw Error(ErrorKind::InvalidState, "translation-invariant state does not match the problem");
  }
}

}  // namespace

TiSolveResult solve_ti(const ClusterProblem& problem, const SolverConfig& config, std::optional<TiState> start,
                       const TiIterationObserver& observer) {
  config.validate();
  if (!problem.translation_invariant) {
    throw Error(ErrorKind::InvalidConfig, "translation-invariant solver needs a translation-invariant problem");
  }
  if (!problem.lattice.periodic()) {
    throw Error(ErrorKind::InvalidConfig, "translation-invariant solver needs a periodic lattice");
  }
  if (problem.n_clusters < 2) throw Error(ErrorKind::InvalidConfig, "the relaxation needs at least two clusters");

  TiSolveResult result;
  result.state = start ? std::move(*start) : TiState::initial(problem);
  TiState& s = result.state;
  check_ti_state(s, problem);

  const int N = problem.n_clusters;
  const int m = problem.local_dim;
  const auto shape = problem.pair_shape();
  const auto& basis = problem.basis;
  const double mu = config.mu, nu = config.nu;
  const std::vector<int>& grid = problem.clusters.grid();
  std::vector<Mat> h_disp(N);
  for (int d = 1; d < N; ++d) h_disp[d] = problem.displacement_term(d);

  double last = s.history.empty() ? energy_per_site_ti(problem, s) : s.history.back().energy_per_site;
  result.converged = has_converged(s.history, config);
  std::vector<Mat> h_eff(N);
  while (!result.converged && s.iteration < config.max_iters) {
    const auto t0 = std::chrono::steady_clock::now();

    const Mat h0 = effective_single(problem.h_single[0], s.x_row[0], basis);
    parallel_for(N - 1, config.threads,
                 [&](int k) { h_eff[k + 1] = effective_pair(h_disp[k + 1], s.x_row[k + 1], basis); });

    parallel_for(N - 1, config.threads, [&](int k) {
      const int d = k + 1;
      Mat rhs = mu * s.aux[d] + s.lambda_pair[d] - h_eff[d];
      rhs += embed_second(nu * s.rho0 - s.lambda_left[d], shape);
      rhs += embed_first(nu * s.rho0 - s.lambda_right[d], shape);
      s.rho_pair[d] = pair_quadratic_inverse(rhs, shape, mu, nu);
      s.aux[d] = psd_project(Mat(s.rho_pair[d] - s.lambda_pair[d] / mu));
    });

    Mat acc = Mat::Zero(m, m);
    for (int d = 1; d < N; ++d) {
      if (config.symmetrized_site_update) {
        acc += 0.5 * (nu * partial_trace_second(s.rho_pair[d], shape) + s.lambda_left[d] +
                      nu * partial_trace_first(s.rho_pair[d], shape) + s.lambda_right[d]);
      } else {
        acc += nu * partial_trace_second(s.rho_pair[d], shape) + s.lambda_left[d];
      }
    }
    acc = (acc - h0) / (nu * (N - 1));
    acc.diagonal().array() += (1.0 - acc.trace()) / m;
    s.rho0 = std::move(acc);

    parallel_for(N - 1, config.threads, [&](int k) {
      const int d = k + 1;
      const Mat& r = s.rho_pair[d];
      s.lambda_pair[d] += mu * (s.aux[d] - r);
      s.lambda_left[d] += nu * (partial_trace_second(r, shape) - s.rho0);
      s.lambda_right[d] += nu * (partial_trace_first(r, shape) - s.rho0);
    });

    s.x_row = update_x_ti(s.x_row, g_row_ti(s, basis), -config.step(s.iteration), grid, config.threads);
    ++s.iteration;

    const double e = energy_per_site_ti(problem, s);
    if (!std::isfinite(e) || std::abs(e) > 1e6 * problem.scale()) {
      throw Error(ErrorKind::Divergence, "energy per site " + std::to_string(e) + " at iteration " +
                                             std::to_string(s.iteration) + " exceeds 1e6 x Hamiltonian scale");
    }
    const auto t1 = std::chrono::steady_clock::now();
    s.history.push_back({s.iteration, e, e - last, feasibility_error_ti(s.rho0, s.rho_pair, s.aux),
                         std::chrono::duration<double, std::milli>(t1 - t0).count()});
    last = e;
    result.converged = has_converged(s.history, config);
    if (observer) observer(s);
  }
  result.energy_per_site = last;
  return result;
}

}  // namespace margsdp
