#include <cmath>

#include "doctest.h"
#include "kahler/invariants.hpp"
#include "kahler/lichnerowicz.hpp"
#include "kahler/manifold.hpp"

using namespace kahler;

namespace {

ScalarField sphere_coord(const Grid& s, int axis) {
  return ScalarField::sample(s, [axis](std::span<const cxd> z) {
    double r = std::norm(z[0]);
    if (axis == 0) return cxd(2 * z[0].real() / (1 + r));
    if (axis == 1) return cxd(2 * z[0].imag() / (1 + r));
    return cxd((r - 1) / (r + 1));
  }, true);
}

ScalarField cos_x(const Grid& t, double eps) {
  return ScalarField::sample(t, [eps](std::span<const cxd> z) { return cxd(eps * std::cos(2 * kPi * z[0].real())); },
                             true);
}

}  // namespace

TEST_SUITE("invariants") {

TEST_CASE("gradient fields") {
  Grid s = Grid::cp1(32, 32);
  MetricField fs = MetricField::fubini_study(s);
  auto zero = gradient_field(ScalarField::constant(s, 2.0), fs);
  CHECK(zero.X[0].sup_norm() <= 1e-10);
  CHECK(zero.residual <= 1e-10);

  // g = 1 / (2 pi (1+|z|^2)^2) and dbar u = 2 z / (1+|z|^2)^2 give X = 4 pi z d/dz
  auto u = sphere_coord(s, 2);
  CHECK(std::abs(integrate_volume(u, fs)) <= 1e-12);
  auto X = gradient_field(u, fs);
  CHECK(X.residual <= 1e-8);
  double err = 0;
  for (std::size_t n = 0; n < s.size(); ++n) err = std::max(err, std::abs(X.X[0][n] - 4 * kPi * s.coord(n, 0)));
  CHECK(err <= 1e-8);

  Grid t = Grid::torus(1, 64);
  auto Y = gradient_field(cos_x(t, 1.0), MetricField::flat(t));
  CHECK(Y.residual > 1.0);
  CHECK(Y.residual > holomorphy_tolerance(t));
}

TEST_CASE("Poisson bracket") {
  Grid s = Grid::cp1(32, 32);
  MetricField fs = MetricField::fubini_study(s);
  auto x = sphere_coord(s, 0), y = sphere_coord(s, 1), z = sphere_coord(s, 2);
  CHECK(poisson_bracket(z, z, fs).sup_norm() <= 1e-12);
  CHECK(poisson_bracket(z, ScalarField::constant(s, 5.0), fs).sup_norm() <= 1e-12);
  // near the chart origin x ~ 2 Re z, y ~ 2 Im z, x3 ~ -1 + 2|z|^2 and g^{-1} = 2 pi:
  // {x3, x} = 2 pi (2 z - 2 zbar) = 4 pi i y; the su(2) relations follow by symmetry
  CHECK((poisson_bracket(z, x, fs) - y * cxd(0, 4 * kPi)).sup_norm() <= 1e-8);
  CHECK((poisson_bracket(x, y, fs) - z * cxd(0, 4 * kPi)).sup_norm() <= 1e-8);
  CHECK((poisson_bracket(y, z, fs) - x * cxd(0, 4 * kPi)).sup_norm() <= 1e-8);

  Grid t = Grid::torus(1, 32);
  MetricField g = metric_from_potential(MetricField::flat(t), random_potential(t, 4, 0.4, 2));
  for (std::uint64_t seed = 20; seed < 23; ++seed) {
    auto a = random_potential(t, seed, 1, 2), b = random_potential(t, seed + 10, 1, 2),
         c = random_potential(t, seed + 20, 1, 2);
    auto ab = poisson_bracket(a, b, g);
    double scale = ab.sup_norm();
    CHECK((ab + poisson_bracket(b, a, g)).sup_norm() <= 1e-12 * scale);
    auto jac = poisson_bracket(a, poisson_bracket(b, c, g), g) + poisson_bracket(b, poisson_bracket(c, a, g), g) +
               poisson_bracket(c, ab, g);
    CHECK(jac.sup_norm() <= 1e-8 * std::max(1.0, poisson_bracket(c, ab, g).sup_norm()));
  }
}

TEST_CASE("Bando character on cp1") {
  Grid s = Grid::cp1(32, 32);
  MetricField fs = MetricField::fubini_study(s);
  auto cfs = curvature(fs);
  auto phi = random_potential(s, 3, 0.3, 3);
  MetricField gt = metric_from_potential(fs, phi);
  auto cgt = curvature(gt);
  for (int a = 0; a < 3; ++a) {
    auto u = sphere_coord(s, a);
    auto ut = transported_potential(u, phi, fs);
    for (double t : {0.0, 0.2}) {
      CHECK(std::abs(bando_total(u, fs, cfs, t)) <= 1e-5);
      CHECK(std::abs(bando_total(ut, gt, cgt, t)) <= 1e-5);
    }
    auto X = gradient_field(u, fs), Xt = gradient_field(ut, gt);
    cxd f_fs = bando_f1_via_potential(X, fs, cfs), f_gt = bando_f1_via_potential(Xt, gt, cgt);
    cxd p_fs = bando_pairings(u, fs, cfs)[0], p_gt = bando_pairings(ut, gt, cgt)[0];
    for (cxd v : {f_fs, f_gt, p_fs, p_gt}) CHECK(std::abs(v) <= 1e-5);
    CHECK(std::abs(f_gt - p_gt) <= 1e-5);
    CHECK(std::abs(f_fs - f_gt) <= 1e-5);
  }

  // linearity on the span of the rotation potentials
  auto u = sphere_coord(s, 0), v = sphere_coord(s, 2);
  auto ut = transported_potential(u, phi, fs), vt = transported_potential(v, phi, fs);
  cxd lhs = bando_total(ut * cxd(2.0) + vt * cxd(-3.0), gt, cgt, 0.1);
  cxd rhs = 2.0 * bando_total(ut, gt, cgt, 0.1) - 3.0 * bando_total(vt, gt, cgt, 0.1);
  CHECK(std::abs(lhs - rhs) <= 1e-10);

  CHECK_THROWS_AS(bando_total(sphere_coord(s, 2) + ScalarField::constant(s, 1.0), fs, cfs, 0.0), InvalidInput);
  CHECK_THROWS_AS(bando_total(spherical_harmonic(s, 2, 0), fs, cfs, 0.0), InvalidInput);
}

TEST_CASE("f1 on tori") {
  Grid t = Grid::torus(1, 64);
  auto X = constant_field(t, {1.0});
  MetricField flat = MetricField::flat(t);
  CHECK(std::abs(bando_f1_via_potential(X, flat)) <= 1e-12);
  MetricField g = metric_from_potential(flat, random_potential(t, 8, 0.4, 3));
  CHECK(std::abs(bando_f1_via_potential(X, g)) <= 1e-6);
  CHECK_THROWS_AS(bando_f1_via_potential(X, MetricField::flat(Grid::torus(2, 8))), InvalidInput);
}

TEST_CASE("Mabuchi energy on the torus") {
  Grid t = Grid::torus(1, 32);
  MetricField flat = MetricField::flat(t);
  ScalarField zero(t, true);
  auto still = mabuchi_energy(KahlerPath::linear(flat, zero, zero), 0.0);
  CHECK(still.value == 0.0);
  CHECK(still.converged);

  auto target = random_potential(t, 5, 0.3, 2);
  auto loop = mabuchi_energy(KahlerPath::there_and_back(flat, target), 0.1);
  CHECK(loop.converged);
  CHECK(std::abs(loop.value) <= 1e-8);

  // second-order expansion: S linearizes to -Delta^2 phi = -pi^4 phi, so nu = pi^4 eps^2 / 2 (1 + O(eps^2))
  std::vector<double> ratio;
  for (double eps : {1e-2, 5e-3}) {
    double nu = mabuchi_energy(KahlerPath::linear(flat, zero, cos_x(t, eps)), 0.0).value;
    CHECK(nu > 0);
    ratio.push_back(nu / (0.5 * std::pow(kPi, 4) * eps * eps));
  }
  CHECK(std::abs(ratio[1] - 1) <= 1e-3);
  CHECK(std::abs((4 * ratio[1] - ratio[0]) / 3 - 1) <= 1e-5);

  MetricField g0 = metric_from_potential(flat, random_potential(t, 6, 0.3, 2));
  auto a = random_potential(t, 11, 0.2, 2), b = random_potential(t, 12, 0.2, 2), c = random_potential(t, 13, 0.2, 2);
  ScalarField z0(t, true);
  for (double tt : {0.0, 0.2}) {
    double lin = mabuchi_energy(KahlerPath::linear(g0, z0, a), tt).value;
    double cub = mabuchi_energy(KahlerPath::cubic(g0, z0, a, b), tt).value;
    CHECK(std::abs(lin - cub) <= 1e-7);
    CHECK(std::abs(mabuchi_cocycle(g0, a, b, c, tt)) <= 3e-7);
  }
}

TEST_CASE("Mabuchi derivative identity") {
  Grid s = Grid::cp1(32, 32);
  MetricField fs = MetricField::fubini_study(s);
  auto u = sphere_coord(s, 2);
  auto d0 = mabuchi_derivative_check(fs, ScalarField(s, true), 0.0);
  CHECK(d0.pass);
  CHECK(d0.lhs == 0.0);
  auto d = mabuchi_derivative_check(fs, u, 0.1);
  CHECK(d.pass);
  CHECK(std::abs(d.rhs) <= 1e-5);
  // axisymmetric phi keeps u~ real
  auto phi = ScalarField::sample(s, [](std::span<const cxd> z) {
    double r = std::norm(z[0]);
    return cxd(0.05 * (r * r - 1) / ((r + 1) * (r + 1)));
  }, true);
  MetricField gt = metric_from_potential(fs, phi);
  auto ut = transported_potential(u, phi, fs);
  REQUIRE(ut.is_real());
  auto dt = mabuchi_derivative_check(gt, ut, 0.1);
  MESSAGE("lhs " << dt.lhs << " rhs " << dt.rhs);
  CHECK(dt.pass);
}

}
