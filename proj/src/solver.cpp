#include "margsdp/solver.hpp"

#include <chrono>
#include <cmath>

#include "margsdp/error.hpp"
#include "margsdp/parallel.hpp"

namespace margsdp {

void SolverConfig::validate() const {
  if (!(mu > 0.0) || !(nu > 0.0) || !(eps > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "mu, nu and eps must be positive");
  }
  if (eps_decay < 0.0) throw Error(ErrorKind::InvalidConfig, "eps_decay must be non-negative");
  if (max_iters < 0) throw Error(ErrorKind::InvalidConfig, "max_iters must be non-negative");
  if (stable_window < 1) throw Error(ErrorKind::InvalidConfig, "stable_window must be at least 1");
  if (inner_iters < 1) throw Error(ErrorKind::InvalidConfig, "inner_iters must be at least 1");
  if (threads < 1) throw Error(ErrorKind::InvalidConfig, "threads must be at least 1");
}

bool has_converged(const std::vector<ConvergenceRecord>& history, const SolverConfig& config) {
  if (config.energy_tol <= 0.0) return false;
  const auto w = static_cast<size_t>(config.stable_window);
  if (history.size() < w) return false;
  for (size_t k = history.size() - w; k < history.size(); ++k) {
    if (!(std::abs(history[k].energy_delta) < config.energy_tol)) return false;
  }
  return true;
}

double tail_average(const std::vector<ConvergenceRecord>& history) {
  if (history.empty()) return 0.0;
  const size_t start = history.size() / 2;
  double sum = 0.0;
  for (size_t k = start; k < history.size(); ++k) sum += history[k].energy_per_site;
  return sum / static_cast<double>(history.size() - start);
}

SolverState SolverState::initial(const ClusterProblem& problem) {
  const int M = problem.n_clusters;
  const int m = problem.local_dim;
  const int n = problem.basis.size();
  const PairIndex pairs(M);
  SolverState s;
  s.marginals.single.assign(M, Mat::Identity(m, m) / m);
  s.marginals.pair.assign(pairs.size(), Mat::Identity(m * m, m * m) / (m * m));
  s.aux.assign(pairs.size(), Mat::Identity(m * m, m * m) / (m * m));
  s.lambda_pair.assign(pairs.size(), Mat::Zero(m * m, m * m));
  s.lambda_left.assign(pairs.size(), Mat::Zero(m, m));
  s.lambda_right.assign(pairs.size(), Mat::Zero(m, m));
  s.x = Mat::Identity(M * n, M * n);
  return s;
}

void update_pair_marginals(SolverState& state, const EffectiveHamiltonians& heff, BipartiteShape shape,
                           const SolverConfig& config) {
  const int M = static_cast<int>(state.marginals.single.size());
  const PairIndex pairs(M);
  parallel_for(pairs.size(), config.threads, [&](int k) {
    auto [i, j] = pairs[k];
    try {
      Mat rhs = config.mu * state.aux[k] + state.lambda_pair[k] - heff.pair[k];
      rhs += embed_second(config.nu * state.marginals.single[i] - state.lambda_left[k], shape);
      rhs += embed_first(config.nu * state.marginals.single[j] - state.lambda_right[k], shape);
      state.marginals.pair[k] = pair_quadratic_inverse(rhs, shape, config.mu, config.nu);
    } catch (const Error& e) {
      throw Error(e.kind(), "pair (" + std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
    }
  });
}

void update_aux(SolverState& state, const SolverConfig& config) {
  const int P = static_cast<int>(state.aux.size());
  parallel_for(P, config.threads, [&](int k) {
    try {
      state.aux[k] = psd_project(Mat(state.marginals.pair[k] - state.lambda_pair[k] / config.mu));
    } catch (const Error& e) {
      throw Error(e.kind(), "aux for pair slot " + std::to_string(k) + ": " + e.what());
    }
  });
}

void update_site_marginals(SolverState& state, const EffectiveHamiltonians& heff, const SolverConfig& config) {
  const int M = static_cast<int>(state.marginals.single.size());
  if (M < 2) throw Error(ErrorKind::InvalidConfig, "site update needs at least two clusters");
  const PairIndex pairs(M);
  const int m = static_cast<int>(state.marginals.single[0].rows());
  const auto shape = BipartiteShape::square(m);
  std::vector<Mat> next(M);
  parallel_for(M, config.threads, [&](int i) {
    Mat acc = -heff.single[i];
    for (int j = 0; j < M; ++j) {
      if (j == i) continue;
      const int k = pairs(i, j);
      if (j > i) acc += config.nu * partial_trace_second(state.marginals.pair[k], shape) + state.lambda_left[k];
      else acc += config.nu * partial_trace_first(state.marginals.pair[k], shape) + state.lambda_right[k];
    }
    acc /= config.nu * (M - 1);
    const double z = (1.0 - acc.trace()) / m;
    acc.diagonal().array() += z;
    next[i] = std::move(acc);
  });
  state.marginals.single = std::move(next);
}

void update_local_duals(SolverState& state, BipartiteShape shape, const SolverConfig& config) {
  const int M = static_cast<int>(state.marginals.single.size());
  const PairIndex pairs(M);
  parallel_for(pairs.size(), config.threads, [&](int k) {
    auto [i, j] = pairs[k];
    const Mat& r = state.marginals.pair[k];
    state.lambda_pair[k] += config.mu * (state.aux[k] - r);
    state.lambda_left[k] += config.nu * (partial_trace_second(r, shape) - state.marginals.single[i]);
    state.lambda_right[k] += config.nu * (partial_trace_first(r, shape) - state.marginals.single[j]);
  });
}

void update_global_dual(SolverState& state, const OperatorBasis& basis, double eps) {
  const Mat g = assemble_g(state.marginals, basis);
  state.x = psd_project(Mat(state.x + eps * g));
}

double energy_per_site(const ClusterProblem& problem, const MarginalSet& marginals) {
  return primal_energy(problem, marginals) / problem.n_sites();
}

namespace {

void check_problem(const ClusterProblem& problem) {
  if (problem.n_clusters < 2) throw Error(ErrorKind::InvalidConfig, "the relaxation needs at least two clusters");
  if (problem.basis.local_dim() != problem.local_dim) {
    throw Error(ErrorKind::InvalidConfig, "operator basis does not match the cluster dimension");
  }
}

void check_divergence(double energy, const ClusterProblem& problem, long iter) {
  if (!std::isfinite(energy) || std::abs(energy) > 1e6 * problem.scale()) {
    throw Error(ErrorKind::Divergence, "energy per site " + std::to_string(energy) + " at iteration " +
                                           std::to_string(iter) + " exceeds 1e6 x Hamiltonian scale " +
                                           std::to_string(problem.scale()));
  }
}

void check_state(const SolverState& s, const ClusterProblem& problem) {
  const PairIndex pairs(problem.n_clusters);
  const int n = problem.basis.size();
  if (static_cast<int>(s.marginals.single.size()) != problem.n_clusters ||
      static_cast<int>(s.marginals.pair.size()) != pairs.size() || static_cast<int>(s.aux.size()) != pairs.size() ||
      static_cast<int>(s.lambda_pair.size()) != pairs.size() ||
      static_cast<int>(s.lambda_left.size()) != pairs.size() ||
      static_cast<int>(s.lambda_right.size()) != pairs.size() || s.x.rows() != problem.n_clusters * n) {
    throw Error(ErrorKind::InvalidState, "solver state does not match the problem");
  }
}

}  // namespace

SolveResult solve(const ClusterProblem& problem, const SolverConfig& config, std::optional<SolverState> start,
                  const IterationObserver& observer) {
  config.validate();
  check_problem(problem);
  SolveResult result;
  result.state = start ? std::move(*start) : SolverState::initial(problem);
  SolverState& s = result.state;
  check_state(s, problem);
  const auto shape = problem.pair_shape();

  double last = s.history.empty() ? energy_per_site(problem, s.marginals) : s.history.back().energy_per_site;
  result.converged = has_converged(s.history, config);
  while (!result.converged && s.iteration < config.max_iters) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto heff = effective_hamiltonians(problem, s.x, config.threads);
    update_pair_marginals(s, heff, shape, config);
    update_aux(s, config);
    update_site_marginals(s, heff, config);
    update_local_duals(s, shape, config);
    update_global_dual(s, problem.basis, -config.step(s.iteration));
    ++s.iteration;

    const double e = energy_per_site(problem, s.marginals);
    check_divergence(e, problem, s.iteration);
    const auto t1 = std::chrono::steady_clock::now();
    s.history.push_back({s.iteration, e, e - last, feasibility_error(s.marginals, s.aux),
                         std::chrono::duration<double, std::milli>(t1 - t0).count()});
    last = e;
    result.converged = has_converged(s.history, config);
    if (observer) observer(s);
  }
  result.energy_per_site = last;
  return result;
}

SolveResult solve_reference(const ClusterProblem& problem, const SolverConfig& config) {
  config.validate();
  check_problem(problem);
  SolveResult result;
  result.state = SolverState::initial(problem);
  SolverState& s = result.state;
  const auto shape = problem.pair_shape();

  double last = energy_per_site(problem, s.marginals);
  while (!result.converged && s.iteration < config.max_iters) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto heff = effective_hamiltonians(problem, s.x, config.threads);
    for (int t = 0; t < config.inner_iters; ++t) {
      update_pair_marginals(s, heff, shape, config);
      update_aux(s, config);
      update_site_marginals(s, heff, config);
      update_local_duals(s, shape, config);
      if (feasibility_error(s.marginals, s.aux) < config.inner_tol) break;
    }
    update_global_dual(s, problem.basis, -config.step(s.iteration));
    ++s.iteration;

    const double e = energy_per_site(problem, s.marginals);
    check_divergence(e, problem, s.iteration);
    const auto t1 = std::chrono::steady_clock::now();
    s.history.push_back({s.iteration, e, e - last, feasibility_error(s.marginals, s.aux),
                         std::chrono::duration<double, std::milli>(t1 - t0).count()});
    last = e;
    result.converged = has_converged(s.history, config);
  }
  result.energy_per_site = last;
  return result;
}

}  // namespace margsdp
