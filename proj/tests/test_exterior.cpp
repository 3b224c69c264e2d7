#include <random>

#include "doctest.h"
#include "kahler/exterior.hpp"
#include "kahler/fields.hpp"

using namespace kahler;

namespace {

Eigen::MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cxd(N(rng), N(rng));
  return A;
}

PQForm random_form(int m, int p, int q, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  PQForm f(m, p, q);
  for (unsigned I : PQForm::masks(m, p))
    for (unsigned J : PQForm::masks(m, q)) f.set_mask(I, J, cxd(N(rng), N(rng)));
  return f;
}

MatrixPQForm random_matrix_form(int m, std::mt19937_64& rng) {
  MatrixPQForm M(m, 1, 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M.set(i, j, random_form(m, 1, 1, rng));
  return M;
}

double rel(cxd a, cxd b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double form_diff(const PQForm& a, const PQForm& b) { return (a - b).max_abs() / std::max(1.0, b.max_abs()); }

}  // namespace

TEST_SUITE("exterior") {

TEST_CASE("basis product and canonical signs") {
  PQForm a = PQForm::basis(2, {0}, {0});
  PQForm b = PQForm::basis(2, {1}, {1});
  PQForm ab = wedge(a, b);
  CHECK(ab.get({0, 1}, {0, 1}) == cxd(-1.0));  // dz1 dzb1 dz2 dzb2 = -dz1 dz2 dzb1 dzb2
  // Access with the product order of the basis element
  CHECK(ab.p() == 2);
  CHECK(ab.get({1, 0}, {0, 1}) == cxd(1.0));
  CHECK(ab.get({0, 0}, {0, 1}) == cxd(0.0));
}

TEST_CASE("odd forms square to zero") {
  std::mt19937_64 rng(1);
  for (int m = 1; m <= 3; ++m) {
    PQForm a = random_form(m, 1, 0, rng);
    CHECK(wedge(a, a).is_zero(1e-14));
    PQForm b = random_form(m, 0, 1, rng);
    CHECK(wedge(b, b).is_zero(1e-14));
  }
}

TEST_CASE("hand-expanded product of (1,1)-forms") {
  // a = 2 dz1 dzb1 + 3 dz1 dzb2, b = 5 dz2 dzb2: the dzb2 dzb2 term vanishes and
  // 10 dz1 dzb1 dz2 dzb2 = -10 dz1 dz2 dzb1 dzb2.
  PQForm a = PQForm::basis(2, {0}, {0}, 2.0) + PQForm::basis(2, {0}, {1}, 3.0);
  PQForm b = PQForm::basis(2, {1}, {1}, 5.0);
  PQForm ab = wedge(a, b);
  CHECK(std::abs(ab.top() - cxd(-10.0)) < 1e-15);
}

TEST_CASE("graded commutativity and associativity") {
  std::mt19937_64 rng(7);
  for (int m = 1; m <= 3; ++m)
    for (int trial = 0; trial < 20; ++trial) {
      int pa = rng() % 2, qa = rng() % 2, pb = rng() % 2, qb = rng() % 2, pc = rng() % 2, qc = rng() % 2;
      PQForm a = random_form(m, pa, qa, rng), b = random_form(m, pb, qb, rng), c = random_form(m, pc, qc, rng);
      double sgn = ((pa + qa) * (pb + qb)) % 2 ? -1.0 : 1.0;
      CHECK(form_diff(wedge(a, b), wedge(b, a) * sgn) <= 1e-12);
      CHECK(form_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) <= 1e-12);
    }
}

TEST_CASE("degree overflow gives the zero form") {
  PQForm a = PQForm::basis(1, {0}, {0});
  PQForm aa = wedge(a, a);
  CHECK(aa.p() == 2);
  CHECK(aa.is_zero());
  CHECK_THROWS_AS(wedge(PQForm(1, 0, 0), PQForm(2, 0, 0)), InvalidInput);
}

TEST_CASE("form determinant") {
  PQForm w1 = PQForm::kahler_form(Eigen::MatrixXcd::Identity(1, 1));
  CHECK(form_diff(form_det(MatrixPQForm::identity(w1, 1)), w1) == 0.0);

  std::mt19937_64 rng(3);
  PQForm al = random_form(2, 1, 1, rng), be = random_form(2, 1, 1, rng);
  MatrixPQForm D(2, 1, 1);
  D.set(0, 0, al);
  D.set(1, 1, be);
  CHECK(form_diff(form_det(D), wedge(al, be)) <= 1e-14);

  // omega ^ omega = 2 (i dz1 dzb1) ^ (i dz2 dzb2)
  PQForm w = PQForm::kahler_form(Eigen::MatrixXcd::Identity(2, 2));
  PQForm expect = wedge(PQForm::basis(2, {0}, {0}, kI), PQForm::basis(2, {1}, {1}, kI)) * 2.0;
  CHECK(form_diff(form_det(MatrixPQForm::identity(w, 2)), expect) <= 1e-15);
  CHECK(form_diff(wedge_power(w, 2), expect) <= 1e-15);

  MatrixPQForm bad(2, 1, 0);
  CHECK_THROWS_AS(form_det(bad), InvalidInput);
}

TEST_CASE("polarization of the determinant") {
  std::mt19937_64 rng(11);
  for (int m = 1; m <= 3; ++m)
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::MatrixXcd A = random_matrix(m, rng);
      std::vector<Eigen::MatrixXcd> args(m, A);
      CHECK(rel(mixed_cm(args), A.determinant()) <= 1e-12);
    }
  std::vector<Eigen::MatrixXcd> ab = {Eigen::Vector2cd(1, 2).asDiagonal(), Eigen::Vector2cd(3, 4).asDiagonal()};
  CHECK(std::abs(mixed_cm(ab) - cxd(5.0)) <= 1e-15);
  std::vector<Eigen::MatrixXcd> ii(2, Eigen::MatrixXcd::Identity(2, 2));
  CHECK(std::abs(mixed_cm(ii) - cxd(1.0)) <= 1e-15);
  std::vector<Eigen::MatrixXcd> wrong = {Eigen::MatrixXcd::Identity(3, 3), Eigen::MatrixXcd::Identity(3, 3)};
  CHECK_THROWS_AS(mixed_cm(wrong), InvalidInput);
}

TEST_CASE("mixed_cm symmetric and multilinear") {
  std::mt19937_64 rng(5);
  for (int m = 2; m <= 3; ++m) {
    std::vector<Eigen::MatrixXcd> A;
    for (int i = 0; i < m; ++i) A.push_back(random_matrix(m, rng));
    cxd base = mixed_cm(A);
    std::vector<Eigen::MatrixXcd> sw = A;
    std::swap(sw[0], sw[m - 1]);
    CHECK(rel(mixed_cm(sw), base) <= 1e-12);
    Eigen::MatrixXcd B = random_matrix(m, rng);
    cxd a(0.3, -1.2), b(2.0, 0.5);
    std::vector<Eigen::MatrixXcd> lin = A, onlyB = A;
    lin[0] = a * A[0] + b * B;
    onlyB[0] = B;
    CHECK(rel(mixed_cm(lin), a * base + b * mixed_cm(onlyB)) <= 1e-12);
    // form-valued symmetry
    std::vector<MatrixPQForm> F;
    for (int i = 0; i < m; ++i) F.push_back(random_matrix_form(m, rng));
    std::vector<MatrixPQForm> Fs = F;
    std::swap(Fs[0], Fs[1]);
    CHECK(form_diff(mixed_cm(F), mixed_cm(Fs)) <= 1e-12);
    std::vector<MatrixPQForm> Fd(m, F[0]);
    CHECK(form_diff(mixed_cm(Fd), form_det(F[0])) <= 1e-12);
  }
}

TEST_CASE("polarization identity reconstructs det(t1 A1 + t2 A2)") {
  std::mt19937_64 rng(17);
  for (int m = 2; m <= 3; ++m) {
    Eigen::MatrixXcd A1 = random_matrix(m, rng), A2 = random_matrix(m, rng);
    double t1 = 0.7, t2 = -1.3;
    cxd direct = (t1 * A1 + t2 * A2).determinant();
    cxd recon = 0;
    // det = sum_k C(m,k) t1^k t2^{m-k} c_m(A1 x k, A2 x (m-k))
    for (int k = 0; k <= m; ++k) {
      std::vector<Eigen::MatrixXcd> args;
      for (int i = 0; i < k; ++i) args.push_back(A1);
      for (int i = k; i < m; ++i) args.push_back(A2);
      double binom = (m == 2) ? (k == 1 ? 2 : 1) : (k == 1 || k == 2 ? 3 : 1);
      recon += binom * std::pow(t1, k) * std::pow(t2, m - k) * mixed_cm(args);
    }
    CHECK(rel(recon, direct) <= 1e-12);
  }
}

TEST_CASE("characteristic coefficients") {
  Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(3, 3);
  auto c0 = char_coefficients(Z);
  CHECK(c0[0] == cxd(1.0));
  CHECK(std::abs(c0[1]) + std::abs(c0[2]) + std::abs(c0[3]) == 0.0);
  Eigen::MatrixXcd D = Eigen::Vector2cd(cxd(2, 1), cxd(-3, 0.5)).asDiagonal();
  auto c = char_coefficients(D);
  CHECK(std::abs(c[1] - (D(0, 0) + D(1, 1))) < 1e-15);
  CHECK(std::abs(c[2] - D(0, 0) * D(1, 1)) < 1e-15);
  std::mt19937_64 rng(23);
  for (int m = 1; m <= 3; ++m) {
    MatrixPQForm F = random_matrix_form(m, rng);
    auto cf = char_coefficients(F);
    CHECK(form_diff(cf[m], form_det(F)) <= 1e-12);
    PQForm tr(m, 1, 1);
    for (int i = 0; i < m; ++i) tr += F(i, i);
    CHECK(form_diff(cf[1], tr) <= 1e-14);
  }
}

TEST_CASE("total Chern form of CP2 from the analytic curvature") {
  // c(CP^2) = (1 + omega)^3 pointwise for Fubini-Study.
  std::mt19937_64 rng(29);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 10; ++trial) {
    cxd z[2] = {cxd(N(rng), N(rng)), cxd(N(rng), N(rng))};
    Eigen::MatrixXcd G = fubini_study_metric(z);
    auto th = fubini_study_curvature(z);
    MatrixPQForm A(2, 1, 1);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        PQForm f(2, 1, 1);
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) f.set_mask(1u << k, 1u << l, th[((i * 2 + j) * 2 + k) * 2 + l] * kI / (2 * kPi));
        A.set(i, j, f);
      }
    auto c = char_coefficients(A);
    PQForm w = PQForm::kahler_form(G);
    CHECK(form_diff(c[1], w * 3.0) <= 1e-12);
    CHECK(form_diff(c[2], wedge(w, w) * 3.0) <= 1e-12);
  }
}

TEST_CASE("top basis volume convention") {
  // i dz ^ dzbar = 2 dx dy
  CHECK(std::abs(kI * top_basis_volume(1) - cxd(2.0)) < 1e-15);
  // omega^2 for the flat metric is 2! 2^2 dV
  PQForm w = PQForm::kahler_form(Eigen::MatrixXcd::Identity(2, 2));
  CHECK(std::abs(wedge(w, w).top() * top_basis_volume(2) - cxd(8.0)) < 1e-14);
}

}
