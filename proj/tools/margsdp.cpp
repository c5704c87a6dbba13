// Command-line runner.
//
//   margsdp run   --model tfi --lattice 20x1 --cluster 2x1 --h 1 --solver ti
//   margsdp sweep --model tfi --lattice 100x1 --values 0.5,1,1.5 --clusters 1x1,2x1,4x1
//
// Either subcommand accepts --config FILE (TOML/INI, keys named like the
// long flags); flags given on the command line take precedence.

#include <algorithm>
#include <iostream>

#include "CLI11.hpp"
#include "margsdp/run.hpp"

namespace {

void add_run_options(CLI::App& app, margsdp::RunConfig& c) {
  auto& s = c.solver_config;
  app.set_help_flag("--help", "Print this help message and exit");
  app.add_option("--config", "Read options from a TOML/INI file (keys named like the long flags)");
  app.add_option("--model", c.model, "tfi | afh | sf | lrsf")
      ->check(CLI::IsMember({"tfi", "afh", "sf", "lrsf"}))
      ->capture_default_str();
  app.add_option("--lattice", c.lattice, "Lattice extents, e.g. 20x1")->capture_default_str();
  app.add_option("--cluster", c.cluster, "Cluster extents, e.g. 2x1")->capture_default_str();
  app.add_flag("!--open", c.periodic, "Open instead of periodic boundaries");
  app.add_option("--h", c.h, "Transverse field (tfi)")->capture_default_str();
  app.add_option("--U", c.U, "Interaction strength (sf, lrsf)")->capture_default_str();
  app.add_option("--solver", c.solver, "general | ti")
      ->check(CLI::IsMember({"general", "ti"}))
      ->capture_default_str();
  app.add_option("--iters", s.max_iters, "Maximum iterations")->capture_default_str();
  app.add_option("--mu", s.mu, "Penalty on rho_ij = aux_ij")->capture_default_str();
  app.add_option("--nu", s.nu, "Penalty on the partial-trace constraints")->capture_default_str();
  app.add_option("--eps", s.eps, "Dual ascent step")->capture_default_str();
  app.add_option("--eps-decay", s.eps_decay, "Step schedule eps / (1 + decay * k)")->capture_default_str();
  app.add_option("--energy-tol", s.energy_tol,
                 "Stop when |energy delta| per site stays below this (0 runs all iterations)")
      ->capture_default_str();
  app.add_option("--stable-window", s.stable_window, "Iterations the energy delta must stay small")
      ->capture_default_str();
  app.add_flag("--symmetrized-site-update", s.symmetrized_site_update,
               "ti solver: include the A2 terms in the site update");
  app.add_option("--threads", s.threads, "Worker threads per phase")->capture_default_str();
  app.add_option("--seed", s.seed, "Seed for randomized components")->capture_default_str();
  app.add_flag("--oracle", c.oracle, "Compute the exact ground energy for comparison");
  app.add_option("--output-dir", c.output_dir, "Directory for result files")->capture_default_str();
  app.add_option("--checkpoint-every", c.checkpoint_every, "Checkpoint period in iterations (0 = off)")
      ->capture_default_str();
  app.add_option("--resume-from", c.resume_from, "Checkpoint file to resume from");
}

/// Splices the entries of the --config file in behind the subcommand name,
/// skipping keys that are also given as flags so the command line wins.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string file;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (file.empty() || args.empty()) return args;
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> injected;
  for (const auto& item : CLI::ConfigTOML().from_file(file)) {
    if (item.name.empty() || item.name == "++" || item.name == "--" || !item.parents.empty()) continue;
    const std::string flag = "--" + item.name;
    if (given(flag)) continue;
    std::string joined;
    for (const auto& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
    injected.push_back(flag + "=" + joined);
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-marginal SDP relaxation solver for lattice ground states"};
  app.require_subcommand(1);
  app.set_help_flag("-h,--help", "Print this help message and exit");

  margsdp::RunConfig run_cfg;
  auto* run_cmd = app.add_subcommand("run", "Solve one configuration");
  add_run_options(*run_cmd, run_cfg);

  margsdp::RunConfig sweep_cfg;
  std::vector<double> values;
  std::vector<std::string> clusters;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve a grid of parameter values and cluster shapes");
  add_run_options(*sweep_cmd, sweep_cfg);
  sweep_cmd->add_option("--values", values, "Model parameter values (h or U)")->delimiter(',')->required();
  sweep_cmd->add_option("--clusters", clusters, "Cluster shapes; defaults to --cluster")->delimiter(',');

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::FileError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      const auto r = margsdp::run(run_cfg);
      std::cout << "energy_per_site " << r.record["energy_per_site"].dump() << "  iterations " << r.iterations
                << (r.converged ? "  converged" : "");
      if (r.relaxation_error) std::cout << "  relaxation_error_per_site " << *r.relaxation_error;
      std::cout << '\n';
    } else {
      if (clusters.empty()) clusters.push_back(sweep_cfg.cluster);
      const auto points = margsdp::sweep(sweep_cfg, values, clusters);
      int failed = 0;
      for (const auto& p : points) {
        std::cout << p.cluster << ' ' << p.value << ' ';
        if (p.result) {
          std::cout << p.result->energy_per_site << '\n';
        } else {
          std::cout << "FAILED: " << p.status << '\n';
          ++failed;
        }
      }
      if (failed) std::cerr << failed << " of " << points.size() << " points failed\n";
    }
  } catch (const margsdp::Error& e) {
    std::cerr << "error (" << margsdp::to_string(e.kind()) << "): " << e.what() << '\n';
    return margsdp::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
