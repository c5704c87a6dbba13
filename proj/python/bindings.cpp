#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "margsdp/error.hpp"
#include "margsdp/linalg.hpp"
#include "margsdp/oracle.hpp"
#include "margsdp/run.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

margsdp::RunConfig parse_config(const std::string& text) { return margsdp::RunConfig::from_json(json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Two-marginal SDP lower bounds for lattice ground states";
  mod.attr("__version__") = margsdp::kVersion;

  static py::exception<margsdp::Error> error(mod, "MargsdpError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const margsdp::Error& e) {
      py::set_error(error, e.what());
    }
  });

  mod.def(
      "run_json",
      [](const std::string& config) {
        const auto c = parse_config(config);
        py::gil_scoped_release release;
        return margsdp::run(c).record.dump();
      },
      py::arg("config"), "Run one configuration given as JSON text; returns the result record as JSON text.");

  mod.def(
      "config_json",
      [](const std::string& config) { return parse_config(config).to_json().dump(); }, py::arg("config"),
      "Complete a partial configuration with defaults.");

  mod.def(
      "oracle_json",
      [](const std::string& config) {
        const auto problem = margsdp::build_problem(parse_config(config));
        margsdp::OracleEstimate est;
        {
          py::gil_scoped_release release;
          est = margsdp::oracle_energy(problem);
        }
        return json{{"energy_per_site", est.energy_per_site},
                    {"method", est.method},
                    {"residual", est.residual},
                    {"converged", est.converged}}
            .dump();
      },
      py::arg("config"));

  mod.def(
      "free_fermion_energy",
      [](const std::string& dims, bool periodic) {
        return margsdp::free_fermion_energy(margsdp::Lattice(margsdp::parse_dims(dims), periodic));
      },
      py::arg("lattice"), py::arg("periodic") = true, "Total ground energy of the U=0 spinless chain or grid.");

  mod.def(
      "psd_project", [](const margsdp::Mat& s) { return margsdp::psd_project(s); }, py::arg("s"));

  mod.def(
      "pair_quadratic_inverse",
      [](const margsdp::Mat& b, int m1, int m2, double mu, double nu) {
        return margsdp::pair_quadratic_inverse(b, {m1, m2}, mu, nu);
      },
      py::arg("b"), py::arg("m1"), py::arg("m2"), py::arg("mu"), py::arg("nu"));
}
