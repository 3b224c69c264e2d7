#include "kahler/acceptance.hpp"

#include <algorithm>
#include <cmath>

#include <boost/crc.hpp>

#include "kahler/curvature.hpp"
#include "kahler/exterior.hpp"
#include "kahler/flows.hpp"
#include "kahler/invariants.hpp"
#include "kahler/kempf_ness.hpp"
#include "kahler/lichnerowicz.hpp"
#include "kahler/manifold.hpp"
#include "kahler/parallel.hpp"
#include "kahler/rng.hpp"

namespace kahler {

using json = nlohmann::ordered_json;

namespace {

struct Check {
  json& d;
  bool ok = true;
  // records value under key and whether it satisfies value <= bound
  void le(const std::string& key, double value, double bound) {
    d[key] = {{"value", value}, {"bound", bound}};
    if (!(value <= bound)) ok = false;
  }
  void ge(const std::string& key, double value, double bound) {
    d[key] = {{"value", value}, {"min", bound}};
    if (!(value >= bound)) ok = false;
  }
  void is(const std::string& key, bool v) {
    d[key] = v;
    if (!v) ok = false;
  }
  template <class T>
  void eq(const std::string& key, const T& value, const T& expect) {
    d[key] = {{"value", value}, {"expect", expect}};
    if (!(value == expect)) ok = false;
  }
};

double rel(cxd a, cxd b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

bool c1_polarization(Check& c, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  double worst = 0;
  for (int m = 1; m <= 3; ++m)
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::MatrixXcd A(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = cxd(rng.normal(), rng.normal());
      std::vector<Eigen::MatrixXcd> args(m, A);
      worst = std::max(worst, rel(mixed_cm(args), A.determinant()));
    }
  c.le("max_rel_error_diagonal", worst, 1e-12);
  std::vector<Eigen::MatrixXcd> ab = {Eigen::Vector2cd(1, 2).asDiagonal(), Eigen::Vector2cd(3, 4).asDiagonal()};
  c.le("c2_diag12_diag34_error", std::abs(mixed_cm(ab) - cxd(5.0)), 1e-14);
  return c.ok;
}

bool c2_topology(Check& c, std::uint64_t seed) {
  double t1 = 0, t2c1 = 0, t2c2 = 0;
  Grid g1 = Grid::torus(1, 32), g2 = Grid::torus(2, 16);
  for (int i = 0; i < 20; ++i) {
    MetricField g = metric_from_potential(MetricField::flat(g1), random_potential(g1, seed + i, 0.3, 3));
    auto n1 = chern_numbers(g, curvature(g));
    t1 = std::max(t1, std::abs(n1[0]));
    MetricField gp = metric_from_potential(MetricField::flat(g2), random_potential(g2, seed + i, 0.3, 2));
    auto n2 = chern_numbers(gp, curvature(gp));
    t2c1 = std::max(t2c1, std::abs(n2[0]));
    t2c2 = std::max(t2c2, std::abs(n2[1]));
  }
  c.le("torus_m1_max_abs_c1", t1, 1e-9);
  c.le("torus_m2_max_abs_c1_omega", t2c1, 1e-9);
  c.le("torus_m2_max_abs_c2", t2c2, 1e-9);
  Grid s = Grid::cp1(64, 64);
  double e = 0;
  for (int i = 0; i < 3; ++i) {
    MetricField gp = metric_from_potential(MetricField::fubini_study(s), random_potential(s, seed + i, 0.4, 3));
    e = std::max(e, std::abs(chern_numbers(gp, curvature(gp))[0] - 2.0));
  }
  c.le("cp1_perturbed_max_abs_c1_minus_2", e, 1e-5);
  return c.ok;
}

const std::vector<double> kTs = {-0.1, 0.0, 0.05, 0.2};

std::vector<MetricField> suite_metrics(std::uint64_t seed) {
  Grid g1 = Grid::torus(1, 32), g2 = Grid::torus(2, 8), s = Grid::cp1(32, 32), c2 = Grid::cp2_analytic(8, 3);
  std::vector<MetricField> out;
  out.push_back(MetricField::flat(g1));
  out.push_back(metric_from_potential(MetricField::flat(g1), random_potential(g1, seed, 0.4, 3)));
  out.push_back(metric_from_potential(MetricField::flat(g2), random_potential(g2, seed, 0.4, 2)));
  out.push_back(MetricField::fubini_study(s));
  out.push_back(metric_from_potential(MetricField::fubini_study(s), random_potential(s, seed, 0.4, 2)));
  out.push_back(MetricField::fubini_study(c2));
  return out;
}

bool c3_routes(Check& c, std::uint64_t seed) {
  double worst = 0;
  for (const auto& g : suite_metrics(seed)) {
    auto curv = curvature(g);
    for (double t : kTs) {
      auto a = scalar_chern_route(g, curv, t), b = scalar_determinant_route(g, curv, t);
      worst = std::max(worst, (a - b).sup_norm() / std::max(1.0, a.sup_norm()));
    }
  }
  c.le("max_rel_route_gap", worst, 1e-10);
  return c.ok;
}

bool c4_references(Check& c, std::uint64_t seed) {
  Grid ch = Grid::cp1(128, 32, 4.0);
  MetricField fsc = MetricField::fubini_study(ch);
  auto sc = scalar_chern_route(fsc, curvature(fsc), 0.0);
  c.le("cp1_chart_fd_S_minus_4pi", (sc - ScalarField::constant(ch, 4 * kPi)).sup_norm(), 1e-5);
  Grid c2 = Grid::cp2_analytic(12, 4);
  MetricField fs2 = MetricField::fubini_study(c2);
  auto cc = curvature(fs2);
  double e2 = 0;
  for (double t : kTs)
    e2 = std::max(e2, (scalar_chern_route(fs2, cc, t) - ScalarField::constant(c2, 12 * kPi * (1 + t))).sup_norm());
  c.le("cp2_S_minus_12pi_1_plus_t", e2, 1e-10);
  double mean = 0;
  for (const auto& g : suite_metrics(seed)) {
    auto curv = curvature(g);
    for (double t : kTs) {
      auto ps = perturbed_scalar(g, curv, t, false);
      double target = 2 * g.dim() * kPi * ps.sigma;
      mean = std::max(mean, std::abs(ps.mean_S - target) / std::max(1.0, std::abs(target)));
    }
  }
  c.le("max_rel_mean_identity_gap", mean, 1e-7);
  return c.ok;
}

bool c5_bando(Check& c, std::uint64_t seed) {
  Grid s = Grid::cp1(32, 32);
  MetricField fs = MetricField::fubini_study(s);
  auto cfs = curvature(fs);
  auto phi = random_potential(s, seed, 0.3, 3);
  MetricField gt = metric_from_potential(fs, phi);
  auto cgt = curvature(gt);
  double zero = 0, gap = 0, routes = 0;
  auto us = cp1_coordinate_functions(s);
  for (const auto& u : us) {
    auto ut = transported_potential(u, phi, fs);
    for (double t : {0.0, 0.2}) {
      cxd a = bando_total(u, fs, cfs, t), b = bando_total(ut, gt, cgt, t);
      zero = std::max({zero, std::abs(a), std::abs(b)});
      gap = std::max(gap, std::abs(a - b));
    }
    cxd f_fs = bando_f1_via_potential(gradient_field(u, fs), fs, cfs);
    cxd f_gt = bando_f1_via_potential(gradient_field(ut, gt), gt, cgt);
    cxd p_fs = bando_pairings(u, fs, cfs)[0], p_gt = bando_pairings(ut, gt, cgt)[0];
    zero = std::max({zero, std::abs(f_fs), std::abs(f_gt), std::abs(p_fs), std::abs(p_gt)});
    gap = std::max({gap, std::abs(f_fs - f_gt), std::abs(p_fs - p_gt)});
    routes = std::max({routes, std::abs(f_fs - p_fs), std::abs(f_gt - p_gt)});
  }
  c.le("cp1_max_abs_character", zero, 1e-5);
  c.le("cp1_two_metric_gap", gap, 1e-5);
  c.le("cp1_f1_route_gap", routes, 1e-5);

  Grid t = Grid::torus(1, 64);
  MetricField flat = MetricField::flat(t);
  MetricField g = metric_from_potential(flat, random_potential(t, seed + 1, 0.4, 3));
  double tg = 0;
  for (cxd dir : {cxd(1.0), cxd(0.0, 1.0)}) {
    auto X = constant_field(t, {dir});
    tg = std::max(tg, std::abs(bando_f1_via_potential(X, flat) - bando_f1_via_potential(X, g)));
  }
  c.le("torus_f1_two_metric_gap", tg, 1e-5);
  return c.ok;
}

bool c6_mabuchi(Check& c, std::uint64_t seed) {
  Grid t = Grid::torus(1, 32);
  MetricField g0 = metric_from_potential(MetricField::flat(t), random_potential(t, seed, 0.3, 2));
  auto a = random_potential(t, seed + 1, 0.2, 2), b = random_potential(t, seed + 2, 0.2, 2),
       d = random_potential(t, seed + 3, 0.2, 2);
  ScalarField z0(t, true);
  double path = 0, cocycle = 0;
  for (double tt : {0.0, 0.2}) {
    double lin = mabuchi_energy(KahlerPath::linear(g0, z0, a), tt).value;
    double cub = mabuchi_energy(KahlerPath::cubic(g0, z0, a, b), tt).value;
    path = std::max(path, std::abs(lin - cub));
    cocycle = std::max(cocycle, std::abs(mabuchi_cocycle(g0, a, b, d, tt)));
  }
  c.le("path_independence_gap", path, 1e-7);
  c.le("cocycle_sum", cocycle, 3e-7);

  Grid s = Grid::cp1(32, 32);
  MetricField fs = MetricField::fubini_study(s);
  auto u = cp1_coordinate_functions(s)[2];
  auto phi = ScalarField::sample(s, [](std::span<const cxd> z) {
    double r = std::norm(z[0]);
    return cxd(0.05 * (r * r - 1) / ((r + 1) * (r + 1)));
  }, true);
  MetricField gt = metric_from_potential(fs, phi);
  auto ut = transported_potential(u, phi, fs);
  bool pass = true;
  double worst = 0;
  for (auto [g, v] : {std::pair{&fs, &u}, std::pair{&gt, &ut}}) {
    auto dc = mabuchi_derivative_check(*g, *v, 0.1);
    pass = pass && dc.pass;
    worst = std::max(worst, dc.gap / std::max(1e-6, 1e-4 * std::abs(dc.rhs)));
  }
  c.is("derivative_identity_pass", pass);
  c.le("derivative_identity_gap_over_bound", worst, 1.0);
  return c.ok;
}

bool c7_flow(Check& c, std::uint64_t seed) {
  Grid t = Grid::torus(1, 64);
  MetricField flat = MetricField::flat(t);
  int good = 0;
  double sup = 0;
  json steps = json::array();
  for (int i = 0; i < 10; ++i) {
    auto rep = run_flow(flat, random_potential(t, seed + i, 0.3, 3), 0.1);
    if (rep.converged && rep.final_sup < 1e-6 && rep.nu_monotone) ++good;
    sup = std::max(sup, rep.final_sup);
    steps.push_back(rep.steps);
  }
  c.d["steps"] = steps;
  c.eq("runs_converged_monotone", good, 10);
  c.le("max_final_sup", sup, 1e-6);
  std::vector<double> ts;
  for (int i = 0; i <= 6; ++i) ts.push_back(0.05 * i);
  auto cont = continue_in_t(flat, random_potential(t, seed + 100, 0.3, 3), ts);
  c.is("continuation_all_rungs", cont.all_converged);
  c.d["frontier"] = cont.frontier;
  return c.ok;
}

bool c8_lichnerowicz(Check& c, std::uint64_t seed) {
  auto flat = kernel_basis(MetricField::flat(Grid::torus(1, 64)));
  c.le("flat_first_eigenvalue_rel_error", std::abs(flat.spectrum.front() / std::pow(kPi, 4) - 1), 1e-6);
  c.eq("flat_kernel_dim", flat.basis.dim(), 0);
  Grid s = Grid::cp1(32, 32);
  MetricField fs = MetricField::fubini_study(s);
  c.eq("fs_kernel_complex_dim", kernel_basis(fs).basis.dim(), 3);

  auto phi = random_potential(s, seed, 0.3, 3);
  MetricField gt = metric_from_potential(fs, phi);
  double grad = 0, mean = 0;
  for (const auto& u : cp1_coordinate_functions(s)) {
    auto ut = transported_potential(u, phi, fs);
    auto X = gradient_field(u, fs), Xt = gradient_field(ut, gt);
    grad = std::max(grad, (X.X[0] - Xt.X[0]).sup_norm() / std::max(1.0, X.X[0].sup_norm()));
    mean = std::max(mean, std::abs(integrate_volume(ut, gt)));
  }
  c.le("transport_gradient_gap", grad, 1e-8);
  c.le("transport_mean_zero", mean, 1e-8);

  Grid t = Grid::torus(1, 32);
  MetricField gp = metric_from_potential(MetricField::flat(t), random_potential(t, seed + 1, 0.4, 2));
  double sa = 0;
  for (const MetricField* g : {&gp, &gt})
    for (int i = 0; i < 3; ++i) {
      auto a = random_potential(g->grid(), seed + 10 + i, 1.0, 3), b = random_potential(g->grid(), seed + 20 + i, 1.0, 3);
      auto La = apply_L(a, *g);
      double scale = std::sqrt(l2_inner(La, La, *g).real() * l2_inner(b, b, *g).real());
      sa = std::max(sa, std::abs(l2_inner(La, b, *g) - l2_inner(a, apply_L(b, *g), *g)) / scale);
    }
  c.le("self_adjointness_rel_gap", sa, 1e-8);
  return c.ok;
}

Eigen::VectorXcd vec2(cxd a, cxd b) {
  Eigen::VectorXcd x(2);
  x << a, b;
  return x;
}

bool c9_kempf_ness(Check& c, std::uint64_t seed) {
  Eigen::MatrixXi w(1, 2);
  w << 1, -1;
  auto pair = LinearAction::torus(w);
  c.eq("pair_1_1", to_string(kempf_ness_descend(pair, vec2(1, 1)).verdict), std::string("polystable"));
  c.eq("pair_2_half", to_string(kempf_ness_descend(pair, vec2(2, 0.5)).verdict), std::string("polystable"));
  c.eq("pair_1_0", to_string(kempf_ness_descend(pair, vec2(1, 0)).verdict), std::string("unstable"));

  double convex = INFINITY;
  convex = std::min(convex, convexity_probe(pair, vec2(1, 1), Eigen::VectorXd::Ones(1), 41).min_second_diff);
  convex = std::min(convex, convexity_probe(pair, vec2(1, 0), Eigen::VectorXd::Ones(1), 41).min_second_diff);
  std::vector<LinearAction> su2s = {LinearAction::su2({1}), LinearAction::su2({2}), LinearAction::su2({1, 3})};
  for (const auto& a : su2s)
    for (std::uint64_t k = 0; k < 20; ++k) {
      Eigen::VectorXd xi = random_point(3, seed + 1000 + k).real();
      convex = std::min(convex,
                        convexity_probe(a, random_point(a.ambient(), seed + k), xi / xi.norm(), 51, 5.0).min_second_diff);
    }
  c.ge("min_second_difference", convex, -1e-10);

  double eq = 0;
  for (const auto& a : su2s) {
    std::vector<Eigen::MatrixXcd> gs;
    for (std::uint64_t k = 0; k < 10; ++k) gs.push_back(random_complex_group(a, seed + k));
    eq = std::max(eq, character_equivariance_gap(a, random_point(a.ambient(), seed + 77), gs));
  }
  c.le("character_equivariance_gap", eq, 1e-8);

  auto e = extremal_decomposition(su2s[0], vec2(1, 0));
  c.ge("su2_min_ad_eigenvalue", e.eigenvalues.minCoeff(), -1e-10);
  c.d["su2_ad_eigenvalues"] = std::vector<double>(e.eigenvalues.data(), e.eigenvalues.data() + e.eigenvalues.size());
  c.is("su2_zero_space_is_complexified", e.zero_space_is_complexified);
  c.is("su2_equivalence_with_mu_zero", e.equivalence_holds);
  return c.ok;
}

}  // namespace

std::string criterion_name(int id) {
  static const char* names[] = {"",
                                "polarization",
                                "topological invariance",
                                "route equivalence",
                                "constant curvature references",
                                "Bando character",
                                "Mabuchi energy",
                                "flow",
                                "Lichnerowicz",
                                "Kempf-Ness sandbox",
                                "reproducibility"};
  return id >= 1 && id <= kCriteria ? names[id] : "?";
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id >= kCriteria) throw InvalidInput("no criterion " + std::to_string(id) + " to run on its own");
  CriterionResult r;
  r.id = id;
  r.name = criterion_name(id);
  r.details = json::object();
  Check c{r.details};
  try {
    switch (id) {
      case 1: r.pass = c1_polarization(c, seed); break;
      case 2: r.pass = c2_topology(c, seed); break;
      case 3: r.pass = c3_routes(c, seed); break;
      case 4: r.pass = c4_references(c, seed); break;
      case 5: r.pass = c5_bando(c, seed); break;
      case 6: r.pass = c6_mabuchi(c, seed); break;
      case 7: r.pass = c7_flow(c, seed); break;
      case 8: r.pass = c8_lichnerowicz(c, seed); break;
      case 9: r.pass = c9_kempf_ness(c, seed); break;
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.error = e.what();
  }
  return r;
}

json AcceptanceReport::to_json() const {
  json j;
  j["schema"] = "kahlerlab.suite/1";
  j["all_pass"] = all_pass;
  json arr = json::array();
  for (const auto& c : criteria) {
    json e;
    e["id"] = c.id;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["details"] = c.details;
    if (!c.error.empty()) e["error"] = c.error;
    arr.push_back(e);
  }
  j["criteria"] = arr;
  return j;
}

namespace {

AcceptanceReport run_battery(const std::vector<int>& ids, std::uint64_t seed) {
  AcceptanceReport rep;
  for (int id : ids) rep.criteria.push_back(run_criterion(id, seed));
  rep.all_pass = std::all_of(rep.criteria.begin(), rep.criteria.end(), [](const auto& c) { return c.pass; });
  return rep;
}

std::uint32_t crc(const std::string& s) {
  boost::crc_32_type h;
  h.process_bytes(s.data(), s.size());
  return h.checksum();
}

}  // namespace

AcceptanceReport run_acceptance(const AcceptanceOptions& opt) {
  auto wanted = [&](int id) { return opt.only.empty() || std::count(opt.only.begin(), opt.only.end(), id) > 0; };
  std::vector<int> ids;
  for (int id = 1; id < kCriteria; ++id)
    if (wanted(id)) ids.push_back(id);
  bool repro = wanted(kCriteria), repro_only = ids.empty();
  // criterion 10 alone still compares the full battery
  if (repro_only)
    for (int id = 1; id < kCriteria; ++id) ids.push_back(id);

  int saved = workers();
  set_workers(opt.workers);
  AcceptanceReport rep = run_battery(ids, opt.seed);
  if (repro) {
    std::string first = rep.to_json().dump(2);
    set_workers(opt.repro_workers);
    std::string second = run_battery(ids, opt.seed).to_json().dump(2);
    CriterionResult r;
    r.id = kCriteria;
    r.name = criterion_name(kCriteria);
    r.details = json::object();
    r.details["workers"] = {opt.workers, opt.repro_workers};
    r.details["bytes"] = {first.size(), second.size()};
    r.details["crc32"] = {crc(first), crc(second)};
    r.pass = first == second;
    r.details["identical"] = r.pass;
    if (repro_only) rep.criteria.clear();
    rep.criteria.push_back(r);
  }
  set_workers(saved);
  rep.all_pass = std::all_of(rep.criteria.begin(), rep.criteria.end(), [](const auto& c) { return c.pass; });
  return rep;
}

}  // namespace kahler
