#pragma once

#include <string>
#include <vector>

#include "kahler/fields.hpp"

namespace kahler {

// Calabi-type descent on potentials: phi <- phi + h (1 + h Delta_0^2)^{-1} (S(omega_phi,t) - 2 m pi sigma(t)),
// with Delta_0 the reference Laplacian of the background (flat torus, Fubini-Study cp1).
struct FlowOptions {
  double h = 0.1;
  int max_steps = 200;
  double s_tol = 1e-6;      // sup |S - 2 m pi sigma|
  double step_tol = 1e-10;  // sup |phi_{n+1} - phi_n|
  double slack = 1e-9;      // allowed per-step increase in the monotonicity flags
  int max_rejections = 30;  // consecutive positivity rejections before giving up
  bool log_extremal = true;
  // scale the damping by the largest eigenvalue of g^{-1} against the reference
  // metric; false keeps the plain reference operator
  bool metric_scaled_damping = true;
};

struct FlowRecord {
  int step = 0;
  double h = 0;
  double calabi_energy = 0;  // int S^2 omega^m
  double nu_t = 0;           // Mabuchi energy relative to the start metric
  double sup_S_minus_sigma = 0;
  double extremal_residual = 0;
};

struct FlowState {
  MetricField base;
  ScalarField phi;  // mean zero against the base volume form
  double t = 0;
  int step = 0;
  double h = 0;
  int rejections = 0;  // total rejected trial steps
  std::vector<FlowRecord> history;
};

struct FlowReport {
  FlowState state;
  bool converged = false;
  bool nu_monotone = true;
  bool calabi_monotone = true;
  int steps = 0;
  double final_sup = 0;
  double final_step = 0;
};

// L2(omega^m) norm of dbar(grad'S(omega,t)); zero at perturbed extremal metrics.
double extremal_residual(const MetricField& g, double t);

FlowState make_flow_state(const MetricField& base, const ScalarField& phi0, double t, double h);
// One accepted step; halves h on positivity failures and throws ConvergenceError
// after max_rejections consecutive rejections.
FlowState flow_step(const FlowState& s, const FlowOptions& opt = {});
FlowReport run_flow(const MetricField& base, const ScalarField& phi0, double t, const FlowOptions& opt = {});

struct ContinuationRung {
  double t = 0;
  bool converged = false;
  int steps = 0;
  int cold_steps = -1;  // steps of a cold start from phi = 0, when requested
  double final_sup = 0;
  double drift = 0;  // sup |phi_t - phi_{t_prev}|
};

struct ContinuationReport {
  std::vector<ContinuationRung> rungs;
  bool all_converged = false;
  double frontier = 0;  // largest t reached by consecutive converged rungs
};

// Re-runs the flow over an increasing t grid, warm-started from the previous rung.
ContinuationReport continue_in_t(const MetricField& base, const ScalarField& phi0, const std::vector<double>& ts,
                                 const FlowOptions& opt = {}, bool compare_cold = false);

std::string flow_csv(const std::vector<FlowRecord>& history);

}  // namespace kahler
