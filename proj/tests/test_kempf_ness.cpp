#include <cmath>

#include "doctest.h"
#include "kahler/kempf_ness.hpp"

using namespace kahler;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

LinearAction pair_action() {
  Eigen::MatrixXi w(1, 2);
  w << 1, -1;
  return LinearAction::torus(w);
}

VectorXcd vec(std::initializer_list<cxd> v) {
  VectorXcd x(v.size());
  int i = 0;
  for (cxd c : v) x[i++] = c;
  return x;
}

VectorXd unit(int k, std::uint64_t seed) {
  VectorXcd z = random_point(k, seed);
  VectorXd r = z.real();
  return r / r.norm();
}

}  // namespace

TEST_SUITE("kempf_ness") {

TEST_CASE("representation data") {
  for (auto act : {LinearAction::su2({1}), LinearAction::su2({2}), LinearAction::su2({1, 4, 0}), pair_action()}) {
    for (int a = 0; a < act.dim(); ++a) {
      CHECK((act.rho(a) + act.rho(a).adjoint()).norm() == 0.0);
      for (int b = 0; b < act.dim(); ++b) {
        VectorXcd ea = VectorXcd::Unit(act.dim(), a), eb = VectorXcd::Unit(act.dim(), b);
        MatrixXcd comm = act.rho(a) * act.rho(b) - act.rho(b) * act.rho(a);
        CHECK((comm - act.rho_c(act.bracket(ea, eb))).norm() <= 1e-13);
      }
    }
  }
  // spin 1/2: rho(xi_a) = -i sigma_a / 2
  auto s = LinearAction::su2({1});
  CHECK(std::abs(s.rho(2)(0, 0) - cxd(0, -0.5)) == 0.0);
  CHECK(std::abs(s.rho(0)(0, 1) - cxd(0, -0.5)) <= 1e-16);
  CHECK_THROWS_AS(LinearAction::su2({0, 0}), InvalidInput);
  CHECK_THROWS_AS(LinearAction::su2({}), InvalidInput);
}

TEST_CASE("moment map") {
  auto act = pair_action();
  CHECK(moment_map(act, VectorXcd::Zero(2)).norm() == 0.0);
  CHECK(moment_map(act, vec({1, 1}))[0] == 0.0);
  CHECK(moment_map(act, vec({1, 0}))[0] == 0.5);
  for (cxd lam : {cxd(0.1), cxd(3, -2), cxd(0, 7)}) {
    double m = moment_map(act, vec({lam, 0}))[0];
    CHECK(m == doctest::Approx(0.5 * std::norm(lam)).epsilon(1e-15));
    CHECK(m > 0);
  }
  // equivariance mu(k x) = Ad^*(k) mu(x)
  for (auto a : {LinearAction::su2({1}), LinearAction::su2({2, 3}), pair_action()}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      MatrixXcd k = random_compact_group(a, seed);
      CHECK((k.adjoint() * k - MatrixXcd::Identity(a.ambient(), a.ambient())).norm() <= 1e-13);
      VectorXcd x = random_point(a.ambient(), seed + 50);
      CHECK((moment_map(a, k * x) - coadjoint(a, k, moment_map(a, x))).norm() <= 1e-12);
    }
  }
}

TEST_CASE("gradient identity") {
  for (auto a : {LinearAction::su2({1}), LinearAction::su2({2, 3}), pair_action()})
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
      CHECK(gradient_identity_gap(a, random_point(a.ambient(), seed), unit(a.dim(), seed + 7)) <= 1e-10);
}

TEST_CASE("descent on the weight (1,-1) pair") {
  auto act = pair_action();
  auto bal = kempf_ness_descend(act, vec({1, 1}));
  CHECK(bal.verdict == Verdict::Polystable);
  CHECK((bal.state.x - vec({1, 1})).norm() <= 1e-10);
  CHECK(bal.state.steps.empty());

  // x1 x2 is invariant, so the minimizer has |x1| = |x2| = 1 when x1 x2 = 1
  auto sk = kempf_ness_descend(act, vec({2, 0.5}));
  REQUIRE(sk.verdict == Verdict::Polystable);
  CHECK(std::abs(std::abs(sk.state.x[0]) - 1) <= 1e-10);
  CHECK(std::abs(std::abs(sk.state.x[1]) - 1) <= 1e-10);
  CHECK(std::abs(moment_map(act, sk.state.x)[0]) <= 1e-10);
  CHECK(sk.state.h.back() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK((sk.state.gamma * vec({2, 0.5}) - sk.state.x).norm() <= 1e-12);
  CHECK(sk.monotone);
  for (std::size_t i = 1; i < sk.state.h.size(); ++i) CHECK(sk.state.h[i] < sk.state.h[i - 1]);

  // h = 2 log|lambda| along (lambda, 0)
  auto un = kempf_ness_descend(act, vec({1, 0}));
  CHECK(un.verdict == Verdict::Unstable);
  CHECK(un.escape.size() == 1);
  CHECK(un.escape[0] == doctest::Approx(-1.0));
  CHECK(un.state.h.back() < -50);
  for (std::size_t i = 1; i < un.state.h.size(); ++i) CHECK(un.state.h[i] < un.state.h[i - 1]);

  DescentOptions tiny;
  tiny.budget = 1;
  CHECK(kempf_ness_descend(act, vec({2, 0.5}), tiny).verdict == Verdict::Budget);
  CHECK_THROWS_AS(kempf_ness_descend(act, VectorXcd::Zero(2)), InvalidInput);
}

TEST_CASE("descent for SU(2)") {
  // C^2: mu(x) = |x|^2 / 4 in norm, never zero, so every point is unstable
  auto std2 = LinearAction::su2({1});
  auto r = kempf_ness_descend(std2, vec({1, 0}));
  CHECK(r.verdict == Verdict::Unstable);  // pinned
  CHECK(moment_map(std2, vec({1, 0})).norm() == 0.25);
  CHECK((r.escape - VectorXd::Unit(3, 2) * -1.0).norm() <= 1e-12);
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    CHECK(kempf_ness_descend(std2, random_point(2, seed)).verdict == Verdict::Unstable);

  // spin 1: the m = 0 vector has mu = 0
  auto s1 = LinearAction::su2({2});
  VectorXcd p = vec({0, 1, 0});
  CHECK(moment_map(s1, p).norm() == 0.0);
  CHECK(kempf_ness_descend(s1, p).verdict == Verdict::Polystable);
  // the highest weight vector has a closed orbit only through 0
  CHECK(kempf_ness_descend(s1, vec({1, 0, 0})).verdict == Verdict::Unstable);
}

TEST_CASE("minimizers in one orbit agree up to K") {
  auto pair = pair_action();
  auto s1 = LinearAction::su2({2});
  for (auto [act, p] : {std::pair{pair, vec({1, 1})}, std::pair{s1, vec({0, 1, 0})}}) {
    std::vector<VectorXcd> mins;
    std::vector<double> hs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      VectorXcd x0 = random_complex_group(act, seed) * p;
      auto r = kempf_ness_descend(act, x0);
      REQUIRE(r.verdict == Verdict::Polystable);
      CHECK(r.monotone);
      CHECK(moment_map(act, r.state.x).norm() <= 1e-10);
      mins.push_back(r.state.x);
      hs.push_back(r.state.h.back());
    }
    for (std::size_t i = 0; i < mins.size(); ++i)
      for (std::size_t j = i + 1; j < mins.size(); ++j) {
        CHECK(std::abs(hs[i] - hs[j]) <= 1e-9);
        CHECK(align_in_K(act, mins[i], mins[j]) <= 1e-8);
      }
    CHECK(std::abs(hs[0] - std::log(p.squaredNorm())) <= 1e-9);
  }
}

TEST_CASE("convexity probes") {
  auto act = pair_action();
  VectorXd one = VectorXd::Ones(1);
  auto p = convexity_probe(act, vec({1, 1}), one, 41);
  for (std::size_t i = 0; i < p.s.size(); ++i)
    CHECK(p.h[i] == doctest::Approx(std::log(std::exp(2 * p.s[i]) + std::exp(-2 * p.s[i]))).epsilon(1e-14));
  CHECK(p.second_diff[19] > 0);
  CHECK(p.min_second_diff >= -1e-10);

  auto affine = convexity_probe(act, vec({1, 0}), one, 41);
  for (double d : affine.second_diff) CHECK(std::abs(d) <= 1e-13);

  for (auto a : {LinearAction::su2({1}), LinearAction::su2({2}), LinearAction::su2({1, 3})})
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto q = convexity_probe(a, random_point(a.ambient(), seed), unit(3, seed + 100), 51, 5.0);
      CHECK(q.min_second_diff >= -1e-10);
    }
  CHECK_THROWS_AS(convexity_probe(act, vec({1, 1}), 2 * one, 11), InvalidInput);
}

TEST_CASE("stabilizer character") {
  // torus: rho(zeta) x in C x iff W^T zeta is constant on the support of x
  Eigen::MatrixXi w(2, 3);
  w << 1, -1, 0, 0, 1, -1;
  auto t2 = LinearAction::torus(w);
  auto st = stabilizer_character(t2, vec({1, 1, 0}));
  REQUIRE(st.basis.cols() == 1);
  VectorXcd b = st.basis.col(0) / st.basis(0, 0);
  CHECK(std::abs(b[1] - 2.0) <= 1e-12);
  CHECK(st.character_gap == 0.0);
  CHECK(st.closure_gap == 0.0);
  auto full = stabilizer_character(pair_action(), vec({1, 0}));
  CHECK(full.basis.cols() == 1);
  CHECK(std::abs(std::abs(full.f[0]) - 0.5) <= 1e-15);

  // C^2 at e1: upper triangular traceless, spanned by xi_3 and the raising element i xi_1 - xi_2
  auto std2 = LinearAction::su2({1});
  auto s = stabilizer_character(std2, vec({1, 0}));
  REQUIRE(s.basis.cols() == 2);
  VectorXcd cartan = VectorXcd::Unit(3, 2), raise = vec({cxd(0, 1), -1, 0});
  for (const VectorXcd& v : {cartan, raise})
    CHECK((v - s.basis * (s.basis.adjoint() * v)).norm() <= 1e-12);
  MatrixXcd E = std2.rho_c(raise);
  CHECK(std::abs(E(0, 1) - 1.0) <= 1e-15);
  CHECK(E.norm() == doctest::Approx(1.0));
  CHECK(character_value(std2, vec({1, 0}), cartan).real() == doctest::Approx(0.25));
  CHECK(std::abs(character_value(std2, vec({1, 0}), raise)) <= 1e-15);
  CHECK(s.character_gap <= 1e-10);
  CHECK(s.closure_gap <= 1e-12);

  for (auto a : {LinearAction::su2({1}), LinearAction::su2({2}), LinearAction::su2({1, 2}), t2}) {
    std::vector<MatrixXcd> gs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) gs.push_back(random_complex_group(a, seed));
    VectorXcd x = a.kind() == GroupKind::Torus ? vec({1, 1, 0}) : random_point(a.ambient(), 3);
    if (a.ambient() == 3 && a.kind() == GroupKind::SU2) x = vec({0, 1, 0});
    auto sc = stabilizer_character(a, x);
    CHECK(sc.character_gap <= 1e-10);
    CHECK(character_equivariance_gap(a, x, gs) <= 1e-8);
  }

  // a nearly degenerate point has no clean numerical rank
  CHECK_THROWS_AS(stabilizer_character(pair_action(), vec({1, 1e-8})), NumericalError);
}

TEST_CASE("extremal decomposition") {
  auto std2 = LinearAction::su2({1});
  auto e = extremal_decomposition(std2, vec({1, 0}));
  CHECK(e.is_extremal);
  REQUIRE(e.eigenvalues.size() == 2);
  CHECK(std::abs(e.eigenvalues[0]) <= 1e-12);
  CHECK(e.eigenvalues[1] == doctest::Approx(0.25).epsilon(1e-12));  // pinned
  CHECK(e.eigen_imag <= 1e-12);
  CHECK(e.center_gap <= 1e-12);
  CHECK(e.zero_dim == 1);
  CHECK(e.real_stabilizer_dim == 1);
  CHECK(e.zero_space_is_complexified);
  CHECK_FALSE(e.mu_zero);
  CHECK(e.equivalence_holds);

  // moment map zeros: ad(i mu) = 0 and the stabilizer is complexified
  auto s1 = LinearAction::su2({2});
  auto z = extremal_decomposition(s1, vec({0, 1, 0}));
  CHECK(z.mu_zero);
  CHECK(z.eigenvalues.size() == 1);
  CHECK(z.eigenvalues.norm() == 0.0);
  CHECK(z.real_stabilizer_dim == 1);
  CHECK(z.zero_space_is_complexified);
  CHECK(z.equivalence_holds);
  auto pz = extremal_decomposition(pair_action(), vec({1, 1}));
  CHECK(pz.mu_zero);
  CHECK(pz.eigenvalues.norm() == 0.0);
  CHECK(pz.equivalence_holds);

  // torus, mu != 0: ad vanishes and the stabilizer is still complexified, so only
  // the direction mu = 0 => (k_x)^c = (k^c)_x survives for abelian groups
  auto pt = extremal_decomposition(pair_action(), vec({1, 0}));
  CHECK(pt.is_extremal);
  CHECK(pt.eigenvalues.norm() == 0.0);
  CHECK(pt.zero_space_is_complexified);
  CHECK_FALSE(pt.mu_zero);
  CHECK_FALSE(pt.equivalence_holds);

  // highest weight vectors of spin 1 are extremal with eigenvalues {0, 1/2}
  auto hw = extremal_decomposition(s1, vec({1, 0, 0}));
  REQUIRE(hw.eigenvalues.size() == 2);
  CHECK(hw.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(extremal_decomposition(s1, vec({1, 1, 0})), InvalidInput);
}

}
