#include "kahler/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "grid_impl.hpp"
#include "kahler/manifold.hpp"
#include "kahler/parallel.hpp"
#include "kahler/sphere.hpp"

namespace kahler {

namespace {

void require_same(const ScalarField& f, const MetricField& g) {
  if (!(f.grid() == g.grid())) throw InvalidInput("field and metric live on different grids");
}

// |dbar_zbar X^z| for X = grad'u on cp1:
// (2 pi / rho) | edthbar^2 u - cot edthbar u - edthbar(log rho) edthbar u |
ScalarField cp1_gradient_dbar(const ScalarField& u, const MetricField& g) {
  const Grid& grid = g.grid();
  const auto& G = grid.impl();
  const auto& rho = g.rho();
  std::size_t N = grid.size();
  auto q = sphere::edth_bar(grid, u.values(), +1);
  auto qq = sphere::edth_bar(grid, q, -1);
  std::vector<cxd> lr(N);
  for (std::size_t n = 0; n < N; ++n) lr[n] = std::log(rho[n]);
  auto dlr = g.analytic_fs() ? std::vector<cxd>(N, 0.0) : sphere::edth_bar(grid, lr, +1);
  ScalarField r(grid, true);
  for (int j = 0; j < G.npol; ++j)
    for (int k = 0; k < G.naz; ++k) {
      std::size_t n = std::size_t(j) * G.naz + k;
      r[n] = 2 * kPi / rho[n] * std::abs(qq[n] - G.cot[j] * q[n] - dlr[n] * q[n]);
    }
  return r;
}

// Euclidean norm of the chart components dbar_l X^i.
ScalarField torus_dbar(const std::vector<ScalarField>& X) {
  const Grid& grid = X.front().grid();
  ScalarField r(grid, true);
  for (const auto& Xi : X)
    for (int l = 0; l < grid.dim(); ++l) {
      auto d = d_antiholo(Xi, l);
      for (std::size_t n = 0; n < r.size(); ++n) r[n] += std::norm(d[n]);
    }
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = std::sqrt(r[n].real());
  return r;
}

void check_potential(const ScalarField& u, const MetricField& g) {
  double scale = std::max(1.0, u.sup_norm());
  if (std::abs(integrate_volume(u, g)) > 1e-8 * scale * g.volume())
    throw InvalidInput("holomorphy potential must satisfy int u omega^m = 0");
  auto X = gradient_field(u, g);
  if (X.residual > holomorphy_tolerance(g.grid()) * std::max(1.0, scale))
    throw InvalidInput("grad'u is not holomorphic (residual " + std::to_string(X.residual) + ")");
}

}  // namespace

ScalarField HolomorphicVectorField::apply(const ScalarField& f) const {
  ScalarField r(f.grid());
  for (std::size_t i = 0; i < X.size(); ++i) r += X[i] * d_holo(f, int(i));
  return r;
}

ScalarField gradient_dbar_norm(const ScalarField& u, const MetricField& g) {
  require_same(u, g);
  if (g.grid().kind() == ManifoldKind::CP1) return cp1_gradient_dbar(u, g);
  if (g.grid().kind() == ManifoldKind::CP2) throw InvalidInput("gradient fields need a torus or cp1 grid");
  return torus_dbar(gradient_field(u, g).X);
}

double holomorphy_tolerance(const Grid& g) { return g.kind() == ManifoldKind::Torus ? 1e-8 : 1e-5; }

HolomorphicVectorField gradient_field(const ScalarField& u, const MetricField& g) {
  require_same(u, g);
  const Grid& grid = g.grid();
  int m = grid.dim();
  auto du = d_antiholo(u);
  HolomorphicVectorField X;
  for (int i = 0; i < m; ++i) {
    ScalarField Xi(grid);
    for (int j = 0; j < m; ++j)
      for (std::size_t n = 0; n < grid.size(); ++n) Xi[n] += g.ginv(n, j, i) * du[j][n];
    X.X.push_back(std::move(Xi));
  }
  X.residual = (grid.kind() == ManifoldKind::CP1 ? cp1_gradient_dbar(u, g) : torus_dbar(X.X)).sup_norm();
  X.potential = u;
  return X;
}

HolomorphicVectorField constant_field(const Grid& g, std::vector<cxd> components) {
  if (g.kind() != ManifoldKind::Torus) throw InvalidInput("constant vector fields exist only on tori");
  if (int(components.size()) != g.dim()) throw InvalidInput("vector field needs m components");
  HolomorphicVectorField X;
  for (cxd c : components) X.X.push_back(ScalarField::constant(g, c));
  X.residual = 0;
  return X;
}

ScalarField poisson_bracket(const ScalarField& u, const ScalarField& v, const MetricField& g) {
  require_same(u, g);
  require_same(v, g);
  int m = g.dim();
  auto ub = d_antiholo(u), vb = d_antiholo(v), uh = d_holo(u), vh = d_holo(v);
  ScalarField r(g.grid());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (std::size_t n = 0; n < r.size(); ++n)
        r[n] += g.ginv(n, j, i) * (ub[j][n] * vh[i][n] - vb[j][n] * uh[i][n]);
  return r;
}

std::vector<cxd> bando_pairings(const ScalarField& u, const MetricField& g, const CurvatureData& curv) {
  require_same(u, g);
  int m = g.dim();
  std::size_t N = g.size();
  std::vector<cxd> P;
  for (int k = 1; k <= m; ++k) {
    std::vector<cxd> top(N);
    parallel_for(N, [&](std::size_t b, std::size_t e) {
      for (std::size_t n = b; n < e; ++n)
        top[n] = u[n] * wedge(curv.chern_at(k, n), wedge_power(PQForm::kahler_form(g.at(n)), m - k)).top();
    });
    P.push_back(-integrate(ScalarField(g.grid(), std::move(top))));
  }
  return P;
}

cxd bando_total(const ScalarField& u, const MetricField& g, const CurvatureData& curv, double t) {
  require_same(u, g);
  check_potential(u, g);
  ScalarField S = scalar_chern_route(g, curv, t);
  return -integrate_volume(u * S, g) / (2.0 * g.dim() * kPi);
}

cxd bando_total(const ScalarField& u, const MetricField& g, double t) { return bando_total(u, g, curvature(g), t); }

cxd bando_f1_via_potential(const HolomorphicVectorField& X, const MetricField& g, const CurvatureData& curv) {
  if (g.dim() != 1) throw InvalidInput("the potential route for f_1 is implemented for m = 1");
  if (X.X.size() != 1 || !(X.X[0].grid() == g.grid())) throw InvalidInput("vector field does not match the metric");
  if (X.residual > holomorphy_tolerance(g.grid())) throw InvalidInput("vector field is not holomorphic");
  const Grid& grid = g.grid();
  std::size_t N = grid.size();
  // Harmonic part of c_1 on a surface: (int c_1 / int omega) omega.
  std::vector<cxd> c1(N);
  for (std::size_t n = 0; n < N; ++n) c1[n] = curv.chern_at(1, n).at_mask(1, 1);
  ScalarField c1f(grid, c1);
  double lambda = (integrate(c1f) / g.volume()).real();
  // i d dbar F = c_1 - lambda omega  <=>  laplacian F = (c_1 / i - lambda g) / g
  ScalarField rhs(grid, true);
  for (std::size_t n = 0; n < N; ++n) {
    double gn = g.g(n, 0, 0).real();
    rhs[n] = ((c1[n] / kI).real() - lambda * gn) / gn;
  }
  ScalarField F = solve_poisson(remove_mean(rhs, g), g);
  return integrate_volume(X.apply(F), g);
}

cxd bando_f1_via_potential(const HolomorphicVectorField& X, const MetricField& g) {
  return bando_f1_via_potential(X, g, curvature(g));
}

KahlerPath KahlerPath::linear(const MetricField& base, const ScalarField& from, const ScalarField& to) {
  ScalarField d = to - from;
  return {base, [from, d](double s) { return from + d * cxd(s); }, [d](double) { return d; }};
}

KahlerPath KahlerPath::cubic(const MetricField& base, const ScalarField& from, const ScalarField& to,
                             const ScalarField& detour) {
  ScalarField d = to - from;
  return {base,
          [from, d, detour](double s) { return from + d * cxd(3 * s * s - 2 * s * s * s) + detour * cxd(s * (1 - s)); },
          [d, detour](double s) { return d * cxd(6 * s - 6 * s * s) + detour * cxd(1 - 2 * s); }};
}

KahlerPath KahlerPath::there_and_back(const MetricField& base, const ScalarField& target) {
  return {base, [target](double s) { return target * cxd(s <= 0.5 ? 2 * s : 2 * (1 - s)); },
          [target](double s) { return target * cxd(s < 0.5 ? 2.0 : -2.0); }, {0.5}};
}

MabuchiResult mabuchi_energy(const KahlerPath& path, double t, const MabuchiOptions& opt) {
  if (opt.initial_nodes < 3 || opt.initial_nodes % 2 == 0) throw InvalidInput("Simpson rule needs an odd node count >= 3");
  const MetricField& g0 = path.base;
  int m = g0.dim();
  double target = 2.0 * m * kPi * sigma(g0, t);
  auto integrand = [&](double s, double deriv_at) {
    ScalarField phi = path.phi(s);
    phi.make_real(1e-10);
    MetricField gs = metric_from_potential(g0, phi);
    ScalarField S = scalar_chern_route(gs, curvature(gs), t);
    S += cxd(-target);
    return -integrate_volume(path.dphi(deriv_at) * S, gs).real();
  };
  // right[i] / left[i]: integrand with the derivative taken from either side;
  // they differ only at kinks, which panels never straddle.
  std::vector<double> left, right;
  auto fill = [&](int count) {
    std::vector<double> L(count), R(count);
    for (int i = 0; i < count; ++i) {
      if (!right.empty() && i % 2 == 0) {
        L[i] = left[i / 2];
        R[i] = right[i / 2];
        continue;
      }
      double s = double(i) / (count - 1);
      R[i] = integrand(s, s);
      bool kink = std::find(path.kinks.begin(), path.kinks.end(), s) != path.kinks.end();
      L[i] = kink ? integrand(s, std::nextafter(s, 0.0)) : R[i];
    }
    left = std::move(L);
    right = std::move(R);
  };
  auto rule = [&]() {
    std::size_t cnt = right.size();
    double h = 1.0 / double(cnt - 1);
    std::vector<double> panels;
    for (std::size_t p = 0; p + 2 < cnt; p += 2) panels.push_back((right[p] + 4 * right[p + 1] + left[p + 2]) * h / 3.0);
    return pairwise_sum(panels);
  };
  for (double k : path.kinks)
    if (std::fmod(k * (opt.initial_nodes - 1), 2.0) != 0.0) throw InvalidInput("path kink must fall on a panel boundary");
  MabuchiResult r;
  int n = opt.initial_nodes;
  fill(n);
  double prev = rule();
  r.value = prev;
  r.nodes = n;
  while (2 * n - 1 <= opt.max_nodes) {
    n = 2 * n - 1;
    fill(n);
    double cur = rule();
    r.gap = std::abs(cur - prev);
    r.value = cur + (cur - prev) / 15.0;
    r.nodes = n;
    if (r.gap < opt.gap_tol) {
      r.converged = true;
      break;
    }
    prev = cur;
  }
  return r;
}

double mabuchi_cocycle(const MetricField& base, const ScalarField& a, const ScalarField& b, const ScalarField& c,
                       double t, const MabuchiOptions& opt) {
  double ab = mabuchi_energy(KahlerPath::linear(base, a, b), t, opt).value;
  double bc = mabuchi_energy(KahlerPath::linear(base, b, c), t, opt).value;
  double ca = mabuchi_energy(KahlerPath::linear(base, c, a), t, opt).value;
  return ab + bc + ca;
}

DerivativeCheck mabuchi_derivative_check(const MetricField& g, const ScalarField& u, double t, double h) {
  require_same(u, g);
  DerivativeCheck d;
  if (u.sup_norm() == 0.0) {
    d.pass = true;
    return d;
  }
  d.rhs = (2.0 * g.dim() * kPi * bando_total(u, g, t)).real();
  ScalarField zero(g.grid(), true);
  // central differences at h and h/2, Richardson-combined to remove the h^2 term
  auto central = [&](double step) {
    ScalarField up = u * cxd(step), um = u * cxd(-step);
    up.make_real(1e-10);
    um.make_real(1e-10);
    double nu_p = mabuchi_energy(KahlerPath::linear(g, zero, up), t).value;
    double nu_m = mabuchi_energy(KahlerPath::linear(g, zero, um), t).value;
    return (nu_p - nu_m) / (2 * step);
  };
  double coarse = central(h), fine = central(h / 2);
  d.lhs = (4 * fine - coarse) / 3;
  d.gap = std::abs(d.lhs - d.rhs);
  d.pass = d.gap <= std::max(1e-6, 1e-4 * std::abs(d.rhs));
  return d;
}

}  // namespace kahler
