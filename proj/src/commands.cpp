#include "kahler/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "kahler/acceptance.hpp"
#include "kahler/container.hpp"
#include "kahler/curvature.hpp"
#include "kahler/exterior.hpp"
#include "kahler/flows.hpp"
#include "kahler/invariants.hpp"
#include "kahler/kempf_ness.hpp"
#include "kahler/lichnerowicz.hpp"
#include "kahler/manifold.hpp"
#include "kahler/parallel.hpp"

namespace kahler {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Ctx {
  const ExperimentConfig& cfg;
  bool write;
  CommandResult res;
  json invariants = json::array();

  void check(const std::string& name, double value, double bound) {
    bool ok = value <= bound;
    invariants.push_back({{"name", name}, {"value", value}, {"bound", bound}, {"pass", ok}});
    res.pass = res.pass && ok;
  }
  void require(const std::string& name, bool ok) {
    invariants.push_back({{"name", name}, {"value", ok}, {"pass", ok}});
    res.pass = res.pass && ok;
  }
  std::string path(const std::string& file) {
    res.files.push_back(file);
    return (fs::path(cfg.out_dir) / file).string();
  }
  void field(const std::string& file, const ScalarField& f, const std::string& name,
             const std::map<std::string, std::string>& extra = {}) {
    if (write) write_field(path(file), f, name, "complex128", extra);
  }
  void text(const std::string& file, const std::string& body) {
    if (write) std::ofstream(path(file)) << body;
  }
};

json manifold_json(const Grid& g) {
  json j;
  j["kind"] = g.kind() == ManifoldKind::Torus ? "torus" : g.kind() == ManifoldKind::CP1 ? "cp1" : "cp2-analytic";
  j["m"] = g.dim();
  j["shape"] = g.shape();
  return j;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

void need(bool ok, const ExperimentConfig& cfg, const std::string& msg) {
  if (!ok) throw ConfigError(cfg.origin, 0, "manifold.kind", msg);
}

struct Setup {
  Grid grid;
  MetricField ref;
  ScalarField phi;
  MetricField g;
};

Setup setup(const ExperimentConfig& cfg) {
  Grid grid = make_grid(cfg.manifold);
  MetricField ref = reference_metric(grid);
  if (grid.kind() == ManifoldKind::CP2) {
    if (cfg.metric.kind != "reference")
      throw ConfigError(cfg.origin, 0, "metric.kind", "cp2-analytic carries only the Fubini-Study metric");
    return {grid, ref, ScalarField(grid, true), ref};
  }
  ScalarField phi = configured_potential(cfg, grid);
  MetricField g = metric_from_potential(ref, phi);
  return {grid, ref, phi, g};
}

void cmd_chern(Ctx& c, json& out) {
  Setup s = setup(c.cfg);
  auto curv = curvature(s.g);
  auto nums = chern_numbers(s.g, curv);
  out["chern_numbers"] = nums;
  int m = s.g.dim();
  for (int k = 1; k <= m; ++k) {
    std::vector<cxd> top(s.grid.size());
    for (std::size_t n = 0; n < s.grid.size(); ++n)
      top[n] = wedge(curv.chern_at(k, n), wedge_power(PQForm::kahler_form(s.g.at(n)), m - k)).top();
    c.field("c" + std::to_string(k) + ".kfc", ScalarField(s.grid, std::move(top)), "c" + std::to_string(k));
  }
  std::vector<double> expect;
  double tol;
  switch (s.grid.kind()) {
    case ManifoldKind::Torus: expect.assign(m, 0.0); tol = c.cfg.tol("chern", 1e-9); break;
    case ManifoldKind::CP1: expect = {2.0}; tol = c.cfg.tol("chern", 1e-6); break;
    default: expect = {3.0, 3.0}; tol = c.cfg.tol("chern", 1e-8); break;
  }
  out["expected"] = expect;
  for (int k = 0; k < m; ++k) c.check("chern_number_" + std::to_string(k + 1), std::abs(nums[k] - expect[k]), tol);
}

void cmd_scalar(Ctx& c, json& out) {
  Setup s = setup(c.cfg);
  auto curv = curvature(s.g);
  json recs = json::array();
  for (std::size_t i = 0; i < c.cfg.ts.size(); ++i) {
    double t = c.cfg.ts[i];
    auto ps = perturbed_scalar(s.g, curv, t, false);
    auto det = scalar_determinant_route(s.g, curv, t);
    auto adm = admissible_t(s.g, curv, t);
    double route = (ps.S - det).sup_norm() / std::max(1.0, ps.S.sup_norm());
    double target = 2 * s.g.dim() * kPi * ps.sigma;
    double mean = std::abs(ps.mean_S - target) / std::max(1.0, std::abs(target));
    recs.push_back({{"t", t},
                    {"sigma", ps.sigma},
                    {"calabi_energy", ps.calabi_energy},
                    {"mean_S", ps.mean_S},
                    {"admissibility_margin", adm.margin},
                    {"route_gap", route}});
    c.check("route_equivalence_t" + fmt(t), route, c.cfg.tol("route", 1e-10));
    c.check("mean_identity_t" + fmt(t), mean, c.cfg.tol("mean", 1e-7));
    c.require("admissible_t" + fmt(t), adm.ok);
    c.field("S_" + std::to_string(i) + ".kfc", ps.S, "S", {{"t", fmt(t)}});
  }
  out["records"] = recs;
}

void cmd_sigma(Ctx& c, json& out) {
  Setup s = setup(c.cfg);
  auto curv = curvature(s.g), cref = curvature(s.ref);
  json recs = json::array();
  for (double t : c.cfg.ts) {
    double a = sigma(s.g, curv, t), b = sigma(s.ref, cref, t);
    recs.push_back({{"t", t}, {"sigma", a}, {"sigma_reference", b}});
    c.check("metric_independence_t" + fmt(t), std::abs(a - b) / std::max(1.0, std::abs(b)), c.cfg.tol("sigma", 1e-7));
    if (s.grid.kind() == ManifoldKind::Torus) c.check("torus_sigma_zero_t" + fmt(t), std::abs(a), c.cfg.tol("sigma_torus", 1e-9));
  }
  out["records"] = recs;
}

json cx(cxd z) { return {z.real(), z.imag()}; }

void cmd_futaki(Ctx& c, json& out) {
  Setup s = setup(c.cfg);
  need(s.grid.kind() != ManifoldKind::CP2, c.cfg, "futaki needs a torus or cp1 grid");
  double tol = c.cfg.tol("futaki", 1e-5);
  json recs = json::array();
  if (s.grid.kind() == ManifoldKind::Torus) {
    // translations: f_1 only, through the Ricci potential
    for (int i = 0; i < s.grid.dim(); ++i) {
      std::vector<cxd> comp(s.grid.dim(), 0.0);
      comp[i] = 1.0;
      auto X = constant_field(s.grid, comp);
      cxd a = bando_f1_via_potential(X, s.ref), b = bando_f1_via_potential(X, s.g);
      recs.push_back({{"field", "d/dz" + std::to_string(i + 1)}, {"f1_reference", cx(a)}, {"f1", cx(b)}});
      c.check("f1_two_metric_gap_" + std::to_string(i + 1), std::abs(a - b), tol);
    }
  } else {
    auto cref = curvature(s.ref), cg = curvature(s.g);
    auto us = cp1_coordinate_functions(s.grid);
    for (int a = 0; a < 3; ++a) {
      auto ut = transported_potential(us[a], s.phi, s.ref);
      for (double t : c.cfg.ts) {
        cxd fa = bando_total(us[a], s.ref, cref, t), fb = bando_total(ut, s.g, cg, t);
        recs.push_back({{"potential", "x" + std::to_string(a + 1)}, {"t", t}, {"F_reference", cx(fa)}, {"F", cx(fb)}});
        std::string tag = "x" + std::to_string(a + 1) + "_t" + fmt(t);
        c.check("F_reference_zero_" + tag, std::abs(fa), tol);
        c.check("F_zero_" + tag, std::abs(fb), tol);
        c.check("F_two_metric_gap_" + tag, std::abs(fa - fb), tol);
      }
      cxd pot = bando_f1_via_potential(gradient_field(ut, s.g), s.g, cg), pair = bando_pairings(ut, s.g, cg)[0];
      c.check("f1_route_gap_x" + std::to_string(a + 1), std::abs(pot - pair), tol);
    }
  }
  out["records"] = recs;
}

void cmd_mabuchi(Ctx& c, json& out) {
  Setup s = setup(c.cfg);
  need(s.grid.kind() != ManifoldKind::CP2, c.cfg, "mabuchi needs a torus or cp1 grid");
  double amp = c.cfg.metric.amplitude;
  auto a = c.cfg.metric.kind == "reference" ? random_potential(s.grid, c.cfg.seed, amp, 2) : s.phi;
  auto b = random_potential(s.grid, c.cfg.seed + 1, amp, 2), d = random_potential(s.grid, c.cfg.seed + 2, amp, 2);
  ScalarField z0(s.grid, true);
  json recs = json::array();
  for (double t : c.cfg.ts) {
    auto lin = mabuchi_energy(KahlerPath::linear(s.ref, z0, a), t);
    auto cub = mabuchi_energy(KahlerPath::cubic(s.ref, z0, a, b), t);
    double co = mabuchi_cocycle(s.ref, a, b, d, t);
    recs.push_back({{"t", t}, {"nu_linear", lin.value}, {"nu_cubic", cub.value}, {"nodes", lin.nodes}, {"cocycle", co}});
    c.check("path_independence_t" + fmt(t), std::abs(lin.value - cub.value), c.cfg.tol("path", 1e-7));
    c.check("cocycle_t" + fmt(t), std::abs(co), c.cfg.tol("cocycle", 3e-7));
    c.require("quadrature_converged_t" + fmt(t), lin.converged && cub.converged);
    if (s.grid.kind() == ManifoldKind::CP1) {
      auto dc = mabuchi_derivative_check(s.ref, cp1_coordinate_functions(s.grid)[2], t);
      recs.back()["derivative_check"] = {{"lhs", dc.lhs}, {"rhs", dc.rhs}, {"gap", dc.gap}};
      c.require("derivative_identity_t" + fmt(t), dc.pass);
    }
  }
  out["records"] = recs;
}

void cmd_flow(Ctx& c, json& out) {
  Setup s = setup(c.cfg);
  need(s.grid.kind() != ManifoldKind::CP2, c.cfg, "flow needs a torus or cp1 grid");
  std::vector<double> ts = c.cfg.ts;
  if (!std::is_sorted(ts.begin(), ts.end())) throw ConfigError(c.cfg.origin, 0, "experiment.t", "t list must increase");
  FlowOptions opt = c.cfg.flow;
  opt.s_tol = c.cfg.tol("flow_s", opt.s_tol);
  json rungs = json::array();
  ScalarField phi = s.phi;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    json r = {{"t", ts[i]}};
    try {
      FlowReport f = run_flow(s.ref, phi, ts[i], opt);
      r["converged"] = f.converged;
      r["steps"] = f.steps;
      r["final_sup"] = f.final_sup;
      r["final_step"] = f.final_step;
      r["nu_monotone"] = f.nu_monotone;
      r["calabi_monotone"] = f.calabi_monotone;
      r["rejections"] = f.state.rejections;
      r["drift"] = (f.state.phi - remove_mean(phi, s.ref)).sup_norm();
      r["final_nu"] = f.state.history.back().nu_t;
      c.require("converged_t" + fmt(ts[i]), f.converged);
      c.require("nu_monotone_t" + fmt(ts[i]), f.nu_monotone);
      c.text("flow_" + std::to_string(i) + ".csv", flow_csv(f.state.history));
      c.field("phi_" + std::to_string(i) + ".kfc", f.state.phi, "phi", {{"t", fmt(ts[i])}});
      phi = f.state.phi;
    } catch (const NumericalError& e) {
      r["converged"] = false;
      r["error"] = e.what();
      c.require("converged_t" + fmt(ts[i]), false);
    }
    rungs.push_back(r);
  }
  out["rungs"] = rungs;
}

void cmd_kernel(Ctx& c, json& out) {
  Setup s = setup(c.cfg);
  need(s.grid.kind() != ManifoldKind::CP2, c.cfg, "kernel needs a torus or cp1 grid");
  KernelOptions ko;
  ko.tol = c.cfg.tol("kernel", -1);
  auto rep = kernel_basis(s.g, ko);
  out["dim_complex_kernel"] = rep.basis.dim();
  out["eigenvalues_below_tol"] = rep.basis.eigenvalues;
  out["residuals"] = rep.basis.residuals;
  out["spectrum"] = rep.spectrum;
  out["tol"] = rep.tol;
  c.check("gram_residual", rep.basis.gram_residual, 1e-8);
  for (int i = 1; i <= rep.basis.dim(); ++i)
    c.check("holomorphy_residual_" + std::to_string(i), gradient_field(rep.basis.functions[i], s.g).residual,
            c.cfg.tol("holomorphy", 1e-6));
  if (c.cfg.expected_kernel_dim) c.require("expected_dim", rep.basis.dim() == *c.cfg.expected_kernel_dim);
  for (int i = 1; i <= rep.basis.dim(); ++i) c.field("kernel_" + std::to_string(i) + ".kfc", rep.basis.functions[i], "u");
}

void cmd_kempf_ness(Ctx& c, json& out) {
  const auto& sc = c.cfg.kempf_ness;
  if (sc.starts.empty()) throw ConfigError(c.cfg.origin, 0, "start", "kempf-ness needs at least one [start.NAME] section");
  LinearAction act = sc.action();
  DescentOptions opt;
  opt.budget = sc.budget;
  std::vector<json> recs(sc.starts.size());
  std::vector<std::vector<json>> checks(sc.starts.size());
  // independent runs; each writes only its own slot
  parallel_for(sc.starts.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto& st = sc.starts[i];
      std::uint64_t seed = c.cfg.seed + 1000 * i;
      json r = {{"name", st.name}};
      auto add = [&](const std::string& name, double v, double bound) {
        checks[i].push_back({{"name", st.name + ":" + name}, {"value", v}, {"bound", bound}, {"pass", v <= bound}});
      };
      auto req = [&](const std::string& name, bool ok) {
        checks[i].push_back({{"name", st.name + ":" + name}, {"value", ok}, {"pass", ok}});
      };
      auto d = kempf_ness_descend(act, st.x, opt);
      r["verdict"] = to_string(d.verdict);
      r["steps"] = d.state.steps.size();
      r["h_start"] = d.state.h.front();
      r["h_end"] = d.state.h.back();
      r["grad_norm"] = d.state.grad_norm;
      Eigen::VectorXd mu = moment_map(act, d.state.x);
      r["mu_end"] = std::vector<double>(mu.data(), mu.data() + mu.size());
      if (d.escape.size()) r["escape"] = std::vector<double>(d.escape.data(), d.escape.data() + d.escape.size());
      req("descent_monotone", d.monotone);
      if (!st.expect.empty()) {
        r["expect"] = st.expect;
        req("verdict", r["verdict"] == st.expect);
      }
      double grad = 0, convex = INFINITY;
      for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd xi = random_point(act.dim(), seed + k).real();
        if (xi.norm() == 0) continue;
        xi /= xi.norm();
        grad = std::max(grad, gradient_identity_gap(act, st.x, xi));
        convex = std::min(convex, convexity_probe(act, st.x, xi, 41, 3.0).min_second_diff);
      }
      r["gradient_identity_gap"] = grad;
      r["min_second_difference"] = convex;
      add("gradient_identity", grad, 1e-10);
      add("convexity", -convex, 1e-10);
      // stabilizer data at the final point (the start when the descent escapes to 0)
      Eigen::VectorXcd p = d.verdict == Verdict::Polystable ? d.state.x : st.x;
      try {
        auto ch = stabilizer_character(act, p);
        std::vector<Eigen::MatrixXcd> gs;
        for (int k = 0; k < 10; ++k) gs.push_back(random_complex_group(act, seed + 100 + k));
        double eq = character_equivariance_gap(act, p, gs);
        r["stabilizer_dim"] = ch.basis.cols();
        r["character_gap"] = ch.character_gap;
        r["equivariance_gap"] = eq;
        add("character", ch.character_gap, 1e-10);
        add("equivariance", eq, 1e-8);
        auto ed = extremal_decomposition(act, p);
        r["ad_eigenvalues"] = std::vector<double>(ed.eigenvalues.data(), ed.eigenvalues.data() + ed.eigenvalues.size());
        r["mu_zero"] = ed.mu_zero;
        r["zero_space_is_complexified"] = ed.zero_space_is_complexified;
        r["equivalence_holds"] = ed.equivalence_holds;
        req("ad_eigenvalues_nonnegative", ed.is_extremal);
        req("zero_space_is_complexified", ed.zero_space_is_complexified);
      } catch (const InvalidInput& e) {
        r["extremal"] = e.what();  // not a critical point of |mu|^2
      } catch (const NumericalError& e) {
        r["stabilizer_error"] = e.what();
      }
      recs[i] = r;
    }
  });
  out["group"] = sc.group;
  out["ambient"] = act.ambient();
  out["starts"] = recs;
  for (auto& v : checks)
    for (auto& j : v) {
      c.res.pass = c.res.pass && j["pass"].get<bool>();
      c.invariants.push_back(j);
    }
}

void cmd_suite(Ctx& c, json& out) {
  AcceptanceOptions opt;
  opt.workers = c.cfg.workers;
  opt.seed = c.cfg.seed;
  auto rep = run_acceptance(opt);
  out["suite"] = rep.to_json();
  for (const auto& cr : rep.criteria) c.require("criterion_" + std::to_string(cr.id), cr.pass);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> n = {"chern", "scalar", "sigma",      "futaki", "mabuchi",
                                             "flow",  "kernel", "kempf-ness", "suite"};
  return n;
}

CommandResult run_command(const std::string& name, const ExperimentConfig& cfg, bool write_files) {
  Ctx c{cfg, write_files, {}};
  if (write_files) fs::create_directories(cfg.out_dir);
  json results = json::object();
  if (name == "chern") cmd_chern(c, results);
  else if (name == "scalar") cmd_scalar(c, results);
  else if (name == "sigma") cmd_sigma(c, results);
  else if (name == "futaki") cmd_futaki(c, results);
  else if (name == "mabuchi") cmd_mabuchi(c, results);
  else if (name == "flow") cmd_flow(c, results);
  else if (name == "kernel") cmd_kernel(c, results);
  else if (name == "kempf-ness") cmd_kempf_ness(c, results);
  else if (name == "suite") cmd_suite(c, results);
  else throw InvalidInput("unknown command " + name);

  json& r = c.res.report;
  r["schema"] = "kahlerlab." + name + "/1";
  r["command"] = name;
  if (!cfg.experiment.empty()) r["experiment"] = cfg.experiment;
  if (name != "suite" && name != "kempf-ness") r["manifold"] = manifold_json(make_grid(cfg.manifold));
  r["seed"] = cfg.seed;
  r["t"] = cfg.ts;
  r["pass"] = c.res.pass;
  r["invariants"] = c.invariants;
  r["results"] = results;
  if (write_files) {
    std::string file = (name == "kempf-ness" ? std::string("kempf_ness") : name) + ".json";
    std::ofstream(c.path(file)) << r.dump(2) << "\n";
  }
  return std::move(c.res);
}

}  // namespace kahler
