#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kahler/curvature.hpp"
#include "kahler/fields.hpp"

namespace kahler {

// Vector field X = X^i d/dz^i in chart components.
struct HolomorphicVectorField {
  std::vector<ScalarField> X;
  double residual = 0;  // sup |dbar X| in the metric norm
  std::optional<ScalarField> potential;

  // X(f) = X^i d_i f
  ScalarField apply(const ScalarField& f) const;
};

// Acceptance threshold for holomorphy residuals: spectral tori 1e-8, sphere grids 1e-5.
double holomorphy_tolerance(const Grid& g);

// grad'u = g^{i jbar} dbar_j u d/dz^i together with its holomorphy residual.
HolomorphicVectorField gradient_field(const ScalarField& u, const MetricField& g);
// Pointwise |dbar grad'u|; its sup is the holomorphy residual.
ScalarField gradient_dbar_norm(const ScalarField& u, const MetricField& g);
// Constant-coefficient field on a torus (no potential).
HolomorphicVectorField constant_field(const Grid& g, std::vector<cxd> components);

// {u,v} = u^i v_i - v^i u_i with u^i = g^{i jbar} dbar_j u.
ScalarField poisson_bracket(const ScalarField& u, const ScalarField& v, const MetricField& g);

// P_k = -int u c_k ^ omega^{m-k}; the total character is F_t = sum_k t^{k-1} P_k.
std::vector<cxd> bando_pairings(const ScalarField& u, const MetricField& g, const CurvatureData& curv);

// F_t(grad'u) = -(1/2 m pi) int u S(omega,t) omega^m. Requires a normalized holomorphy potential.
cxd bando_total(const ScalarField& u, const MetricField& g, double t);
cxd bando_total(const ScalarField& u, const MetricField& g, const CurvatureData& curv, double t);

// m = 1: f_1(X) = int X(F_1) omega with i d dbar F_1 = c_1 - H c_1.
cxd bando_f1_via_potential(const HolomorphicVectorField& X, const MetricField& g);
cxd bando_f1_via_potential(const HolomorphicVectorField& X, const MetricField& g, const CurvatureData& curv);

// omega_s = omega_0 + i d dbar phi_s for s in [0,1].
struct KahlerPath {
  MetricField base;
  std::function<ScalarField(double)> phi;
  std::function<ScalarField(double)> dphi;  // right derivative
  std::vector<double> kinks;                 // points where dphi jumps; must be dyadic

  static KahlerPath linear(const MetricField& base, const ScalarField& from, const ScalarField& to);
  // from + p(s)(to - from) + s(1-s) detour with p(s) = 3s^2 - 2s^3
  static KahlerPath cubic(const MetricField& base, const ScalarField& from, const ScalarField& to,
                          const ScalarField& detour);
  // 0 -> target on [0,1/2] and back on [1/2,1]
  static KahlerPath there_and_back(const MetricField& base, const ScalarField& target);
};

struct MabuchiOptions {
  int initial_nodes = 9;  // composite Simpson, odd
  int max_nodes = 257;
  double gap_tol = 1e-8;  // |I_2n - I_n| stopping rule
};

struct MabuchiResult {
  double value = 0;
  double gap = 0;
  int nodes = 0;
  bool converged = false;
};

// M_t along the path: -int_0^1 ds int phidot (S(omega_s,t) - 2 m pi sigma(t)) omega_s^m.
MabuchiResult mabuchi_energy(const KahlerPath& path, double t, const MabuchiOptions& opt = {});

// M_t(a,b) + M_t(b,c) + M_t(c,a) along linear segments.
double mabuchi_cocycle(const MetricField& base, const ScalarField& a, const ScalarField& b,
                       const ScalarField& c, double t, const MabuchiOptions& opt = {});

struct DerivativeCheck {
  double lhs = 0;  // d nu_t / dr at r = 0 along phi_r = r u (Richardson of central differences)
  double rhs = 0;  // 2 m pi F_t(grad'u)
  double gap = 0;
  bool pass = false;
};

DerivativeCheck mabuchi_derivative_check(const MetricField& g, const ScalarField& u, double t, double h = 1e-3);

}  // namespace kahler
