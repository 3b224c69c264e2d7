// Python module kahlerlab._core: grids, metrics, curvature invariants, kernels, flows,
// the Kempf-Ness sandbox and the CLI commands. JSON crosses the boundary as text.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kahler/acceptance.hpp"
#include "kahler/commands.hpp"
#include "kahler/config.hpp"
#include "kahler/curvature.hpp"
#include "kahler/flows.hpp"
#include "kahler/kempf_ness.hpp"
#include "kahler/lichnerowicz.hpp"
#include "kahler/manifold.hpp"
#include "kahler/parallel.hpp"

namespace py = pybind11;
using namespace kahler;

namespace {

std::vector<py::ssize_t> dims(const Grid& g) {
  auto s = g.shape();
  return {s.begin(), s.end()};
}

py::array_t<cxd> to_numpy(const ScalarField& f) {
  py::array_t<cxd> a(dims(f.grid()));
  std::copy(f.values().begin(), f.values().end(), a.mutable_data());
  return a;
}

ScalarField from_numpy(const Grid& g, py::array_t<cxd, py::array::c_style | py::array::forcecast> a, bool real) {
  if (static_cast<std::size_t>(a.size()) != g.size()) throw InvalidInput("array size does not match the grid");
  return ScalarField(g, std::vector<cxd>(a.data(), a.data() + a.size()), real);
}

py::dict perturbed(const MetricField& g, double t) {
  auto curv = curvature(g);
  auto ps = perturbed_scalar(g, curv, t, false);
  py::dict d;
  d["t"] = t;
  d["S"] = to_numpy(ps.S);
  d["sigma"] = ps.sigma;
  d["calabi_energy"] = ps.calabi_energy;
  d["mean_S"] = ps.mean_S;
  d["admissibility_margin"] = admissible_t(g, curv, t).margin;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discrete Kahler geometry core";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("set_workers", &set_workers, py::arg("n"));
  m.def("workers", &workers);

  py::class_<Grid>(m, "Grid")
      .def_static("torus", &Grid::torus, py::arg("m"), py::arg("n"))
      .def_static("cp1", &Grid::cp1, py::arg("n_polar") = 128, py::arg("n_azimuth") = 256,
                  py::arg("radius") = std::numeric_limits<double>::infinity())
      .def_static("cp2_analytic", &Grid::cp2_analytic, py::arg("n_polar") = 24, py::arg("n_angle") = 4)
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("shape", &Grid::shape)
      .def_property_readonly("tag", &Grid::tag)
      .def("__repr__", [](const Grid& g) { return "<Grid " + g.tag() + ">"; });

  py::class_<MetricField>(m, "Metric")
      .def_static("flat", &MetricField::flat)
      .def_static("fubini_study", &MetricField::fubini_study)
      .def_static("reference", &reference_metric)
      .def("with_potential",
           [](const MetricField& g, py::array_t<cxd> phi) {
             return metric_from_potential(g, from_numpy(g.grid(), phi, true));
           })
      .def_property_readonly("grid", &MetricField::grid)
      .def_property_readonly("dim", &MetricField::dim);

  m.def("random_potential",
        [](const Grid& g, std::uint64_t seed, double amplitude, int max_mode) {
          return to_numpy(random_potential(g, seed, amplitude, max_mode));
        },
        py::arg("grid"), py::arg("seed"), py::arg("amplitude") = 0.1, py::arg("max_mode") = 2);

  m.def("chern_numbers", [](const MetricField& g) { return chern_numbers(g, curvature(g)); },
        "Integrals of c_k ^ omega^(m-k), k = 1..m");
  m.def("sigma", [](const MetricField& g, double t) { return sigma(g, t); }, py::arg("metric"), py::arg("t"));
  m.def("perturbed_scalar", &perturbed, py::arg("metric"), py::arg("t"));

  m.def("kernel",
        [](const MetricField& g, double tol) {
          KernelOptions o;
          o.tol = tol;
          auto r = kernel_basis(g, o);
          py::dict d;
          d["dim"] = r.basis.dim();
          d["eigenvalues"] = r.basis.eigenvalues;
          d["residuals"] = r.basis.residuals;
          d["gram_residual"] = r.basis.gram_residual;
          d["spectrum"] = r.spectrum;
          d["tol"] = r.tol;
          py::list fs;
          for (const auto& f : r.basis.functions) fs.append(to_numpy(f));
          d["functions"] = fs;
          return d;
        },
        py::arg("metric"), py::arg("tol") = -1.0,
        "Potentials of holomorphic gradient fields; functions[0] is the normalized constant");

  m.def("run_flow",
        [](const MetricField& base, py::array_t<cxd> phi0, double t, double h, int max_steps) {
          FlowOptions o;
          o.h = h;
          o.max_steps = max_steps;
          auto r = run_flow(base, from_numpy(base.grid(), phi0, true), t, o);
          py::dict d;
          d["converged"] = r.converged;
          d["steps"] = r.steps;
          d["final_sup"] = r.final_sup;
          d["nu_monotone"] = r.nu_monotone;
          d["calabi_monotone"] = r.calabi_monotone;
          d["phi"] = to_numpy(r.state.phi);
          d["csv"] = flow_csv(r.state.history);
          return d;
        },
        py::arg("base"), py::arg("phi0"), py::arg("t"), py::arg("h") = 0.1, py::arg("max_steps") = 200);

  py::class_<LinearAction>(m, "LinearAction")
      .def_static("torus", &LinearAction::torus, py::arg("weights"))
      .def_static("su2", &LinearAction::su2, py::arg("twice_spins"))
      .def_property_readonly("dim", &LinearAction::dim)
      .def_property_readonly("ambient", &LinearAction::ambient);

  m.def("moment_map", &moment_map, py::arg("action"), py::arg("x"));
  m.def("kempf_ness_h", &kempf_ness_h, py::arg("action"), py::arg("x"), py::arg("xi"), py::arg("s"));
  m.def("kempf_ness_descend",
        [](const LinearAction& act, const Eigen::VectorXcd& x, int budget) {
          DescentOptions o;
          o.budget = budget;
          auto r = kempf_ness_descend(act, x, o);
          py::dict d;
          d["verdict"] = to_string(r.verdict);
          d["x"] = r.state.x;
          d["h"] = r.state.h;
          d["grad_norm"] = r.state.grad_norm;
          d["monotone"] = r.monotone;
          d["escape"] = r.escape;
          return d;
        },
        py::arg("action"), py::arg("x"), py::arg("budget") = 20000);

  m.def("command_names", &command_names);
  m.def("run_command",
        [](const std::string& name, const std::string& config_text, const std::string& out_dir, bool write_files) {
          auto cfg = parse_config(config_text, "<python>");
          if (!out_dir.empty()) cfg.out_dir = out_dir;
          auto r = run_command(name, cfg, write_files);
          return r.report.dump();
        },
        py::arg("name"), py::arg("config") = "", py::arg("out_dir") = "", py::arg("write_files") = false,
        "Runs a CLI command on INI text and returns the JSON report as a string");
  m.def("run_acceptance",
        [](std::vector<int> only, std::uint64_t seed) {
          AcceptanceOptions o;
          o.only = std::move(only);
          o.seed = seed;
          return run_acceptance(o).to_json().dump();
        },
        py::arg("only") = std::vector<int>{}, py::arg("seed") = 42);
}
