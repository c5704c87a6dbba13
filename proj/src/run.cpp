#include "margsdp/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "margsdp/checkpoint.hpp"
#include "margsdp/error.hpp"
#include "margsdp/fermion_models.hpp"
#include "margsdp/oracle.hpp"
#include "margsdp/spin_models.hpp"

namespace margsdp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_fermionic(const std::string& model) { return model == "sf" || model == "lrsf"; }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string param_name(const RunConfig& c) { return is_fermionic(c.model) ? "U" : "h"; }

}  // namespace

void RunConfig::validate() const {
  if (model != "tfi" && model != "afh" && model != "sf" && model != "lrsf") {
    throw Error(ErrorKind::InvalidConfig, "unknown model '" + model + "' (expected tfi, afh, sf or lrsf)");
  }
  if (solver != "general" && solver != "ti") {
    throw Error(ErrorKind::InvalidConfig, "unknown solver '" + solver + "' (expected general or ti)");
  }
  const auto ldims = parse_dims(lattice);
  const auto cdims = parse_dims(cluster);
  if (ldims.size() != cdims.size()) {
    throw Error(ErrorKind::InvalidConfig, "cluster " + cluster + " and lattice " + lattice + " differ in rank");
  }
  for (size_t a = 0; a < ldims.size(); ++a) {
    if (cdims[a] < 1 || ldims[a] % cdims[a] != 0) {
      throw Error(ErrorKind::InvalidConfig, "cluster " + cluster + " does not tile lattice " + lattice);
    }
  }
  if (solver == "ti" && !periodic) throw Error(ErrorKind::InvalidConfig, "the ti solver needs a periodic lattice");
  if (checkpoint_every < 0) throw Error(ErrorKind::InvalidConfig, "checkpoint_every must be non-negative");
  solver_config.validate();
}

json RunConfig::to_json() const {
  const auto& s = solver_config;
  return json{{"model", model},
              {"lattice", lattice},
              {"cluster", cluster},
              {"periodic", periodic},
              {"h", h},
              {"U", U},
              {"solver", solver},
              {"mu", s.mu},
              {"nu", s.nu},
              {"eps", s.eps},
              {"eps_decay", s.eps_decay},
              {"iters", s.max_iters},
              {"energy_tol", s.energy_tol},
              {"stable_window", s.stable_window},
              {"threads", s.threads},
              {"seed", s.seed},
              {"symmetrized_site_update", s.symmetrized_site_update},
              {"oracle", oracle},
              {"output_dir", output_dir},
              {"checkpoint_every", checkpoint_every},
              {"resume_from", resume_from}};
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  auto& s = c.solver_config;
  c.model = j.value("model", c.model);
  c.lattice = j.value("lattice", c.lattice);
  c.cluster = j.value("cluster", c.cluster);
  c.periodic = j.value("periodic", c.periodic);
  c.h = j.value("h", c.h);
  c.U = j.value("U", c.U);
  c.solver = j.value("solver", c.solver);
  s.mu = j.value("mu", s.mu);
  s.nu = j.value("nu", s.nu);
  s.eps = j.value("eps", s.eps);
  s.eps_decay = j.value("eps_decay", s.eps_decay);
  s.max_iters = j.value("iters", s.max_iters);
  s.energy_tol = j.value("energy_tol", s.energy_tol);
  s.stable_window = j.value("stable_window", s.stable_window);
  s.threads = j.value("threads", s.threads);
  s.seed = j.value("seed", s.seed);
  s.symmetrized_site_update = j.value("symmetrized_site_update", s.symmetrized_site_update);
  c.oracle = j.value("oracle", c.oracle);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.resume_from = j.value("resume_from", c.resume_from);
  return c;
}

ClusterProblem build_problem(const RunConfig& c) {
  c.validate();
  const Lattice lat(parse_dims(c.lattice), c.periodic);
  const ClusterDecomposition clusters(lat, parse_dims(c.cluster));
  if (c.model == "tfi") return build_tfi(lat, c.h, clusters);
  if (c.model == "afh") return build_afh(lat, clusters);
  return build_spinless(lat, c.U, clusters, c.model == "lrsf");
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path);
  out << "iter,energy_per_site,energy_delta,feas_error,wall_ms\n";
  for (const auto& r : history) {
    out << r.iter << ',' << fmt17(r.energy_per_site) << ',' << fmt17(r.energy_delta) << ',' << fmt17(r.feas_error)
        << ',' << fmt17(r.wall_ms) << '\n';
  }
}

RunResult run(const RunConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  const ClusterProblem problem = build_problem(config);
  fs::create_directories(config.output_dir);
  const std::string csv_path = (fs::path(config.output_dir) / "convergence.csv").string();
  const std::string ckpt_path = (fs::path(config.output_dir) / "checkpoint.bin").string();

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw Error(ErrorKind::InvalidConfig, "cannot write " + csv_path);
  csv << "iter,energy_per_site,energy_delta,feas_error,wall_ms\n";
  auto log_record = [&](const ConvergenceRecord& r) {
    csv << r.iter << ',' << fmt17(r.energy_per_site) << ',' << fmt17(r.energy_delta) << ','
        << fmt17(r.feas_error) << ',' << fmt17(r.wall_ms) << '\n';
  };
  auto due = [&](long iteration) { return config.checkpoint_every > 0 && iteration % config.checkpoint_every == 0; };

  RunResult out;
  if (config.solver == "ti") {
    std::optional<TiState> start;
    if (!config.resume_from.empty()) start = load_checkpoint_ti(config.resume_from, problem);
    if (start)
      for (const auto& r : start->history) log_record(r);
    auto res = solve_ti(problem, config.solver_config, std::move(start), [&](const TiState& s) {
      log_record(s.history.back());
      if (due(s.iteration)) {
        csv.flush();
        save_checkpoint(ckpt_path, problem, s);
      }
    });
    if (config.checkpoint_every > 0) save_checkpoint(ckpt_path, problem, res.state);
    out.energy_per_site = res.energy_per_site;
    out.iterations = res.state.iteration;
    out.converged = res.converged;
    out.history = std::move(res.state.history);
  } else {
    std::optional<SolverState> start;
    if (!config.resume_from.empty()) start = load_checkpoint(config.resume_from, problem);
    if (start)
      for (const auto& r : start->history) log_record(r);
    auto res = solve(problem, config.solver_config, std::move(start), [&](const SolverState& s) {
      log_record(s.history.back());
      if (due(s.iteration)) {
        csv.flush();
        save_checkpoint(ckpt_path, problem, s);
      }
    });
    if (config.checkpoint_every > 0) save_checkpoint(ckpt_path, problem, res.state);
    out.energy_per_site = res.energy_per_site;
    out.iterations = res.state.iteration;
    out.converged = res.converged;
    out.history = std::move(res.state.history);
  }
  csv.close();
  out.energy_tail_average = tail_average(out.history);
  out.feas_error = out.history.empty() ? 0.0 : out.history.back().feas_error;

  json oracle_info = nullptr;
  if (config.oracle) {
    const auto est = oracle_energy(problem);
    out.oracle_energy = est.energy_per_site;
    out.relaxation_error = est.energy_per_site - out.energy_per_site;
    oracle_info = json{{"method", est.method}, {"residual", est.residual}, {"converged", est.converged}};
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  json& rec = out.record;
  rec["config"] = config.to_json();
  rec["energy_per_site"] = out.energy_per_site;
  rec["energy_per_site_tail_avg"] = out.energy_tail_average;
  rec["iterations_run"] = out.iterations;
  rec["converged"] = out.converged;
  rec["feas_error"] = out.feas_error;
  rec["oracle_energy"] = out.oracle_energy ? json(*out.oracle_energy) : json(nullptr);
  rec["relaxation_error_per_site"] = out.relaxation_error ? json(*out.relaxation_error) : json(nullptr);
  rec["relaxation_error_per_site_tail_avg"] =
      out.oracle_energy ? json(*out.oracle_energy - out.energy_tail_average) : json(nullptr);
  rec["lower_bound_ok"] = out.relaxation_error ? json(*out.relaxation_error >= -1e-6) : json(nullptr);
  rec["oracle"] = oracle_info;
  rec["n_sites"] = problem.n_sites();
  rec["n_clusters"] = problem.n_clusters;
  rec["wall_clock_s"] = wall;
  rec["code_version"] = kVersion;

  std::ofstream js((fs::path(config.output_dir) / "result.json").string(), std::ios::trunc);
  js << rec.dump(2) << '\n';
  return out;
}

std::vector<SweepPoint> sweep(const RunConfig& base, const std::vector<double>& values,
                              const std::vector<std::string>& clusters) {
  if (values.empty()) throw Error(ErrorKind::InvalidConfig, "sweep needs at least one parameter value");
  if (clusters.empty()) throw Error(ErrorKind::InvalidConfig, "sweep needs at least one cluster shape");
  fs::create_directories(base.output_dir);
  std::vector<SweepPoint> points;
  const std::string pname = param_name(base);
  for (const auto& cl : clusters) {
    for (double v : values) {
      RunConfig c = base;
      c.cluster = cl;
      (pname == "U" ? c.U : c.h) = v;
      c.output_dir = (fs::path(base.output_dir) / (cl + "_" + pname + fmt17(v))).string();
      SweepPoint p{v, cl, "ok", std::nullopt};
      try {
        p.result = run(c);
      } catch (const std::exception& e) {
        p.status = e.what();
      }
      points.push_back(std::move(p));
    }
  }
  std::ofstream out((fs::path(base.output_dir) / "sweep.csv").string(), std::ios::trunc);
  out << pname << ",cluster,status,energy_per_site,energy_per_site_tail_avg,relaxation_error_per_site,iterations,converged\n";
  for (const auto& p : points) {
    std::string status = p.status;
    for (char& ch : status)
      if (ch == ',' || ch == '\n') ch = ' ';
    out << fmt17(p.value) << ',' << p.cluster << ',' << status << ',';
    if (p.result) {
      out << fmt17(p.result->energy_per_site) << ',' << fmt17(p.result->energy_tail_average) << ','
          << (p.result->relaxation_error ? fmt17(*p.result->relaxation_error) : "") << ',' << p.result->iterations
          << ',' << (p.result->converged ? 1 : 0);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
  return points;
}

int exit_code_for(const Error& error) {
  switch (error.kind()) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidInput:
      return 2;
    case ErrorKind::Divergence:
      return 3;
    case ErrorKind::Checkpoint:
      return 4;
    default:
      return 1;
  }
}

}  // namespace margsdp
