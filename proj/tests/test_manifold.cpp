#include <cmath>

#include "doctest.h"
#include "kahler/manifold.hpp"

using namespace kahler;

namespace {

double x_of(std::span<const cxd> z, int i = 0) { return z[i].real(); }

double max_diff(const ScalarField& a, const ScalarField& b) { return (a - b).sup_norm(); }

}  // namespace

TEST_SUITE("manifold") {

TEST_CASE("torus derivative of a plane wave") {
  Grid g = Grid::torus(1, 32);
  auto f = ScalarField::sample(g, [](std::span<const cxd> z) { return std::exp(2.0 * kPi * kI * z[0].real()); });
  // d/dz = (d_x - i d_y)/2 on exp(2 pi i x) gives pi i f
  CHECK(max_diff(d_holo(f, 0), f * (kPi * kI)) <= 1e-12);
  CHECK(max_diff(d_antiholo(f, 0), f * (kPi * kI)) <= 1e-12);
  auto h = ScalarField::sample(g, [](std::span<const cxd> z) { return std::exp(2.0 * kPi * kI * z[0].imag()); });
  // d_y-wave: d/dz = -i/2 * 2 pi i = pi, d/dzbar = -pi
  CHECK(max_diff(d_holo(h, 0), h * cxd(kPi)) <= 1e-12);
  CHECK(max_diff(d_antiholo(h, 0), h * cxd(-kPi)) <= 1e-12);
  CHECK(d_holo(ScalarField::constant(g, 3.0), 0).sup_norm() <= 1e-14);
}

TEST_CASE("torus mixed derivatives commute and match the Laplacian symbol") {
  Grid g = Grid::torus(2, 16);
  auto f = random_potential(g, 7, 0.1, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto a = d_antiholo(d_holo(f, i), j);
      auto b = d_holo(d_antiholo(f, j), i);
      CHECK(max_diff(a, b) <= 1e-12);
      CHECK(max_diff(ddbar(f, i, j), a) <= 1e-12);
    }
  Grid g1 = Grid::torus(1, 32);
  auto c = ScalarField::sample(g1, [](std::span<const cxd> z) { return std::cos(2 * kPi * x_of(z)); }, true);
  CHECK(max_diff(laplacian(c, MetricField::flat(g1)), c * cxd(-kPi * kPi)) <= 1e-11);
}

TEST_CASE("cp1 derivatives of |z|^2 on a truncated chart") {
  std::vector<double> err;
  for (int np : {48, 96, 192}) {
    Grid g = Grid::cp1(np, 32, 3.0);
    auto f = ScalarField::sample(g, [](std::span<const cxd> z) { return std::norm(z[0]); }, true);
    auto zb = ScalarField::sample(g, [](std::span<const cxd> z) { return std::conj(z[0]); });
    auto z = ScalarField::sample(g, [](std::span<const cxd> z) { return z[0]; });
    double e = max_diff(d_holo(f, 0), zb) / zb.sup_norm();
    CHECK(max_diff(d_antiholo(f, 0), z) / z.sup_norm() == doctest::Approx(e).epsilon(1e-6));
    err.push_back(e);
  }
  // fourth order: halving the spacing gains about 16 once asymptotic
  CHECK(err[0] / err[1] > 8.0);
  CHECK(err[1] / err[2] > 12.0);
  CHECK(err[2] <= 1e-4);
}

TEST_CASE("cp1 spectral derivatives on the full sphere") {
  Grid g = Grid::cp1(64, 64);
  // z/(1+|z|^2) is smooth on the sphere; oracle by the quotient rule
  auto f = ScalarField::sample(g, [](std::span<const cxd> z) { return z[0] / (1.0 + std::norm(z[0])); });
  auto df = ScalarField::sample(g, [](std::span<const cxd> z) {
    double r = 1.0 + std::norm(z[0]);
    return 1.0 / r - z[0] * std::conj(z[0]) / (r * r);
  });
  auto dbf = ScalarField::sample(g, [](std::span<const cxd> z) {
    double r = 1.0 + std::norm(z[0]);
    return -z[0] * z[0] / (r * r);
  });
  CHECK(max_diff(d_holo(f, 0), df) <= 1e-10);
  CHECK(max_diff(d_antiholo(f, 0), dbf) <= 1e-10);
}

TEST_CASE("metric from a potential") {
  Grid g = Grid::torus(1, 32);
  MetricField g0 = MetricField::flat(g);
  ScalarField zero(g, true);
  auto same = metric_from_potential(g0, zero);
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(std::abs(same.g(n, 0, 0) - 1.0) == 0.0);
  double eps = 0.05;
  auto phi = ScalarField::sample(g, [&](std::span<const cxd> z) { return eps * std::cos(2 * kPi * x_of(z)); }, true);
  auto gp = metric_from_potential(g0, phi);
  double err = 0;
  for (std::size_t n = 0; n < g.size(); ++n)
    err = std::max(err, std::abs(gp.g(n, 0, 0) - (1.0 - eps * kPi * kPi * std::cos(2 * kPi * g.coord(n, 0).real()))));
  CHECK(err <= 1e-12);
  auto big = ScalarField::sample(g, [](std::span<const cxd> z) { return 0.2 * std::cos(2 * kPi * x_of(z)); }, true);
  CHECK_THROWS_AS(metric_from_potential(g0, big), PositivityError);
  ScalarField cplx(g, std::vector<cxd>(g.size(), kI));
  CHECK_THROWS_AS(metric_from_potential(g0, cplx), InvalidInput);
}

TEST_CASE("integration") {
  Grid g = Grid::torus(1, 16);
  MetricField flat = MetricField::flat(g);
  // omega = i dz ^ dzbar = 2 dx dy
  CHECK(flat.volume() == doctest::Approx(2.0).epsilon(1e-14));
  std::vector<PQForm> w(g.size(), PQForm::kahler_form(flat.at(0)));
  CHECK(std::abs(integrate(w, g) - 2.0) <= 1e-13);
  std::vector<PQForm> bad(g.size(), PQForm(1, 1, 0));
  CHECK_THROWS_AS(integrate(bad, g), InvalidInput);

  Grid g2 = Grid::torus(2, 8);
  // omega^2 = 2! 2^2 dV on the flat 2-torus
  CHECK(MetricField::flat(g2).volume() == doctest::Approx(8.0).epsilon(1e-13));

  Grid s = Grid::cp1(64, 32);
  CHECK(MetricField::fubini_study(s).volume() == doctest::Approx(1.0).epsilon(1e-13));
  Grid c2 = Grid::cp2_analytic(24, 6);
  CHECK(MetricField::fubini_study(c2).volume() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("truncated chart quadrature improves with the radius") {
  double prev = 1.0;
  for (double R : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    Grid s = Grid::cp1(128, 16, R);
    double err = std::abs(MetricField::fubini_study(s).volume() - 1.0);
    // the tail mass 1/(1+R^2) dominates the error
    CHECK(err == doctest::Approx(1.0 / (1.0 + R * R)).epsilon(1e-4));
    CHECK(s.tail_mass() == doctest::Approx(1.0 / (1.0 + R * R)).epsilon(1e-12));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("Stokes and integration by parts on the torus") {
  Grid g = Grid::torus(1, 32);
  auto u = random_potential(g, 11, 0.3, 3);
  auto b = random_potential(g, 12, 0.3, 3);
  // int dbar(u) dz ^ dzbar-type exactness: integrals of derivatives vanish
  CHECK(std::abs(integrate(d_antiholo(u, 0))) <= 1e-12);
  // int (du) ^ beta = - int u d beta for beta = b dzbar
  cxd lhs = integrate(d_holo(u, 0) * b);
  cxd rhs = -integrate(u * d_holo(b, 0));
  CHECK(std::abs(lhs - rhs) <= 1e-10);
  Grid g2 = Grid::torus(2, 8);
  auto u2 = random_potential(g2, 3, 0.3, 2);
  auto b2 = random_potential(g2, 4, 0.3, 2);
  CHECK(std::abs(integrate(d_antiholo(u2, 1) * b2) + integrate(u2 * d_antiholo(b2, 1))) <= 1e-10);
}

TEST_CASE("Poisson solves") {
  Grid g = Grid::torus(1, 32);
  MetricField flat = MetricField::flat(g);
  CHECK(solve_poisson(ScalarField(g, true), flat).sup_norm() == 0.0);
  auto rhs = ScalarField::sample(g, [](std::span<const cxd> z) { return std::cos(2 * kPi * x_of(z)); }, true);
  CHECK(max_diff(solve_poisson(rhs, flat), rhs * cxd(-1.0 / (kPi * kPi))) <= 1e-12);
  CHECK_THROWS_AS(solve_poisson(ScalarField::constant(g, 1.0), flat), InvalidInput);

  // manufactured solutions on perturbed metrics
  for (int m : {1, 2}) {
    Grid gm = Grid::torus(m, m == 1 ? 32 : 16);
    MetricField gp = metric_from_potential(MetricField::flat(gm), random_potential(gm, 5, 0.4, 2));
    auto u0 = remove_mean(random_potential(gm, 9, 1.0, 2), gp);
    auto u = solve_poisson(laplacian(u0, gp), gp);
    CHECK(max_diff(u, u0) <= 1e-8 * u0.sup_norm());
  }

  Grid s = Grid::cp1(64, 32);
  MetricField fs = MetricField::fubini_study(s);
  MetricField sp = metric_from_potential(fs, random_potential(s, 3, 0.3, 3));
  auto u0 = remove_mean(spherical_harmonic(s, 2, 1) + spherical_harmonic(s, 3, -2), sp);
  auto u = solve_poisson(laplacian(u0, sp), sp);
  CHECK(max_diff(u, u0) <= 1e-8 * u0.sup_norm());
}

TEST_CASE("random potentials respect the amplitude bound") {
  Grid g = Grid::torus(2, 16);
  auto phi = random_potential(g, 1, 0.5, 2);
  double sup = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) sup = std::max(sup, ddbar(phi, i, j).sup_norm());
  CHECK(sup <= 0.5 + 1e-12);
  auto again = random_potential(g, 1, 0.5, 2);
  CHECK(max_diff(phi, again) == 0.0);
  CHECK(max_diff(phi, random_potential(g, 2, 0.5, 2)) > 0.0);
}

}  // TEST_SUITE
