#include "kahler/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kahler/curvature.hpp"
#include "kahler/invariants.hpp"
#include "kahler/manifold.hpp"

namespace kahler {

namespace {

struct Eval {
  MetricField g;
  ScalarField S;  // S(omega,t) - target
  double calabi = 0;
  double sup = 0;
};

Eval evaluate(const MetricField& base, const ScalarField& phi, double t, double target) {
  MetricField g = metric_from_potential(base, phi);
  ScalarField S = scalar_chern_route(g, curvature(g), t);
  double calabi = integrate_volume(S * S.conj(), g).real();
  S += cxd(-target);
  S.make_real(1e-8);
  double sup = S.sup_norm();
  return {std::move(g), std::move(S), calabi, sup};
}

double extremal_from_S(const ScalarField& S, const MetricField& g) {
  ScalarField d = gradient_dbar_norm(S, g);
  return std::sqrt(std::max(0.0, integrate_volume(d * d, g).real()));
}

// Largest eigenvalue of g^{-1} against the reference metric; the linearized
// operator scales like its square, so the damping does too.
double stiffness(const MetricField& g) {
  double a = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.grid().kind() == ManifoldKind::CP1) {
      a = std::max(a, 1.0 / g.rho()[n]);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.at(n), Eigen::EigenvaluesOnly);
      a = std::max(a, 1.0 / es.eigenvalues()(0));
    }
  }
  return std::max(1.0, a);
}

ScalarField update(const ScalarField& S, const MetricField& g, const MetricField& base, double h, bool scaled) {
  ScalarField u = solve_damped_biharmonic(S, h, scaled ? stiffness(g) : 1.0) * cxd(h);
  return remove_mean(u, base);
}

double target_of(const MetricField& base, double t) { return 2.0 * base.dim() * kPi * sigma(base, t); }

FlowRecord record(const FlowState& s, const Eval& e, double nu, bool log_extremal) {
  FlowRecord r;
  r.step = s.step;
  r.h = s.h;
  r.calabi_energy = e.calabi;
  r.nu_t = nu;
  r.sup_S_minus_sigma = e.sup;
  r.extremal_residual = log_extremal ? extremal_from_S(e.S, e.g) : 0.0;
  return r;
}

// Advances s by one accepted step starting from its evaluation e.
std::pair<FlowState, Eval> advance(const FlowState& s, const Eval& e, double target, const FlowOptions& opt) {
  FlowState n = s;
  int consecutive = 0;
  std::vector<double> tried;
  while (true) {
    ScalarField phi = n.phi + update(e.S, e.g, n.base, n.h, opt.metric_scaled_damping);
    phi.make_real(1e-8);
    try {
      Eval ne = evaluate(n.base, phi, n.t, target);
      ScalarField dphi = phi - n.phi;
      double nu0 = n.history.empty() ? 0.0 : n.history.back().nu_t;
      double dnu = -0.5 * (integrate_volume(dphi * e.S, e.g).real() + integrate_volume(dphi * ne.S, ne.g).real());
      n.phi = std::move(phi);
      n.step += 1;
      n.history.push_back(record(n, ne, nu0 + dnu, opt.log_extremal));
      return {std::move(n), std::move(ne)};
    } catch (const PositivityError&) {
      tried.push_back(n.h);
      n.rejections += 1;
      if (++consecutive >= opt.max_rejections)
        throw ConvergenceError("flow step rejected " + std::to_string(consecutive) + " times for positivity", tried);
      n.h *= 0.5;
    }
  }
}

}  // namespace

double extremal_residual(const MetricField& g, double t) {
  return extremal_from_S(scalar_chern_route(g, curvature(g), t), g);
}

FlowState make_flow_state(const MetricField& base, const ScalarField& phi0, double t, double h) {
  if (!(phi0.grid() == base.grid())) throw InvalidInput("potential and metric live on different grids");
  if (!(h > 0)) throw InvalidInput("flow step must be positive");
  FlowState s{base, remove_mean(phi0, base), t, 0, h, 0, {}};
  s.phi.make_real(1e-8);
  metric_from_potential(base, s.phi);
  return s;
}

FlowState flow_step(const FlowState& s, const FlowOptions& opt) {
  double target = target_of(s.base, s.t);
  Eval e = evaluate(s.base, s.phi, s.t, target);
  return advance(s, e, target, opt).first;
}

FlowReport run_flow(const MetricField& base, const ScalarField& phi0, double t, const FlowOptions& opt) {
  FlowState s = make_flow_state(base, phi0, t, opt.h);
  double target = target_of(base, t);
  Eval e = evaluate(base, s.phi, t, target);
  if (!admissible_t(e.g, curvature(e.g), t).ok) throw InvalidInput("t is not admissible at the start metric");
  s.history.push_back(record(s, e, 0.0, opt.log_extremal));
  double step_norm = update(e.S, e.g, base, s.h, opt.metric_scaled_damping).sup_norm();
  while (!(e.sup < opt.s_tol && step_norm < opt.step_tol) && s.step < opt.max_steps) {
    ScalarField before = s.phi;
    auto next = advance(s, e, target, opt);
    s = std::move(next.first);
    e = std::move(next.second);
    step_norm = (s.phi - before).sup_norm();
  }
  bool converged = e.sup < opt.s_tol && step_norm < opt.step_tol;
  FlowReport rep{std::move(s)};
  rep.converged = converged;
  const auto& hist = rep.state.history;
  for (std::size_t i = 1; i < hist.size(); ++i) {
    if (hist[i].nu_t > hist[i - 1].nu_t + opt.slack) rep.nu_monotone = false;
    if (hist[i].calabi_energy > hist[i - 1].calabi_energy + opt.slack) rep.calabi_monotone = false;
  }
  rep.steps = rep.state.step;
  rep.final_sup = e.sup;
  rep.final_step = step_norm;
  return rep;
}

ContinuationReport continue_in_t(const MetricField& base, const ScalarField& phi0, const std::vector<double>& ts,
                                 const FlowOptions& opt, bool compare_cold) {
  if (!std::is_sorted(ts.begin(), ts.end())) throw InvalidInput("continuation grid must be increasing");
  ContinuationReport rep;
  ScalarField phi = phi0;
  bool prefix = true;
  for (double t : ts) {
    ContinuationRung r;
    r.t = t;
    try {
      FlowReport f = run_flow(base, phi, t, opt);
      r.converged = f.converged;
      r.steps = f.steps;
      r.final_sup = f.final_sup;
      r.drift = (f.state.phi - remove_mean(phi, base)).sup_norm();
      phi = f.state.phi;
      if (compare_cold) r.cold_steps = run_flow(base, phi0, t, opt).steps;
    } catch (const NumericalError&) {
      r.converged = false;
    }
    prefix = prefix && r.converged;
    if (prefix) rep.frontier = t;
    rep.rungs.push_back(r);
  }
  rep.all_converged = prefix && !ts.empty();
  return rep;
}

std::string flow_csv(const std::vector<FlowRecord>& history) {
  std::ostringstream os;
  os << "step,h,calabi_energy,nu_t,sup_S_minus_sigma,extremal_residual\n";
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.h, r.calabi_energy, r.nu_t,
                  r.sup_S_minus_sigma, r.extremal_residual);
    os << buf;
  }
  return os.str();
}

}  // namespace kahler
