#include "kahler/lichnerowicz.hpp"

#include <algorithm>
#include <cmath>

#include "grid_impl.hpp"
#include "kahler/invariants.hpp"
#include "kahler/manifold.hpp"
#include "kahler/parallel.hpp"
#include "kahler/sphere.hpp"

namespace kahler {

namespace {

void require_same(const ScalarField& f, const MetricField& g) {
  if (!(f.grid() == g.grid())) throw InvalidInput("field and metric live on different grids");
}

// cp1: L = (2pi/rho)(edth + cot)(2pi/rho)(edth + 2 cot)(edthbar - cot - edthbar log rho) edthbar.
ScalarField apply_L_cp1(const ScalarField& u, const MetricField& g) {
  const Grid& grid = g.grid();
  const auto& G = grid.impl();
  const auto& rho = g.rho();
  std::size_t N = grid.size();
  std::vector<cxd> lr(N);
  for (std::size_t n = 0; n < N; ++n) lr[n] = std::log(rho[n]);
  auto dlr = g.analytic_fs() ? std::vector<cxd>(N, 0.0) : sphere::edth_bar(grid, lr, +1);
  auto cot = [&](std::size_t n) { return G.cot[n / G.naz]; };

  auto q = sphere::edth_bar(grid, u.values(), +1);
  auto B = sphere::edth_bar(grid, q, -1);
  for (std::size_t n = 0; n < N; ++n) B[n] -= (cot(n) + dlr[n]) * q[n];
  auto W = sphere::edth(grid, B, +1);
  for (std::size_t n = 0; n < N; ++n) W[n] = 2 * kPi / rho[n] * (W[n] + 2 * cot(n) * B[n]);
  auto L = sphere::edth(grid, W, -1);
  for (std::size_t n = 0; n < N; ++n) L[n] = 2 * kPi / rho[n] * (L[n] + cot(n) * W[n]);
  return ScalarField(grid, std::move(L));
}

// torus: with Y^i_k = dbar_k (g^{i jbar} dbar_j u) and V = det g,
// D*Y = V^{-1} d_q ( g^{q jbar} d_l ( V g^{l kbar} g_{i jbar} Y^i_k ) ).
ScalarField apply_L_torus(const ScalarField& u, const MetricField& g) {
  const Grid& grid = g.grid();
  int m = grid.dim();
  std::size_t N = grid.size();
  auto ub = d_antiholo(u);
  std::vector<ScalarField> Y;  // index i*m+k
  for (int i = 0; i < m; ++i) {
    ScalarField Xi(grid);
    for (int j = 0; j < m; ++j)
      for (std::size_t n = 0; n < N; ++n) Xi[n] += g.ginv(n, j, i) * ub[j][n];
    for (int k = 0; k < m; ++k) Y.push_back(d_antiholo(Xi, k));
  }
  std::vector<ScalarField> P(m, ScalarField(grid));
  for (int l = 0; l < m; ++l)
    for (int j = 0; j < m; ++j) {
      ScalarField T(grid);
      for (std::size_t n = 0; n < N; ++n) {
        cxd s = 0;
        for (int i = 0; i < m; ++i)
          for (int k = 0; k < m; ++k) s += g.ginv(n, k, l) * g.g(n, i, j) * Y[i * m + k][n];
        T[n] = g.det(n) * s;
      }
      P[j] += d_holo(T, l);
    }
  ScalarField Q(grid);
  for (int q = 0; q < m; ++q) {
    ScalarField R(grid);
    for (int j = 0; j < m; ++j)
      for (std::size_t n = 0; n < N; ++n) R[n] += g.ginv(n, j, q) * P[j][n];
    Q += d_holo(R, q);
  }
  for (std::size_t n = 0; n < N; ++n) Q[n] /= g.det(n);
  return Q;
}

std::vector<ScalarField> trial_space(const Grid& g, int max_mode) {
  std::vector<ScalarField> fs;
  if (g.kind() == ManifoldKind::CP1) {
    for (int l = 1; l <= max_mode; ++l)
      for (int mm = -l; mm <= l; ++mm) fs.push_back(spherical_harmonic(g, l, mm));
    return fs;
  }
  int m = g.dim(), dims = 2 * m, side = 2 * max_mode + 1;
  int total = 1;
  for (int a = 0; a < dims; ++a) total *= side;
  for (int idx = 0; idx < total; ++idx) {
    std::vector<int> k(dims);
    int r = idx;
    for (int a = dims - 1; a >= 0; --a) {
      k[a] = r % side - max_mode;
      r /= side;
    }
    int first = 0;
    while (first < dims && k[first] == 0) ++first;
    if (first == dims || k[first] < 0) continue;
    for (int trig = 0; trig < 2; ++trig)
      fs.push_back(ScalarField::sample(g, [&](std::span<const cxd> z) {
        double ph = 0;
        for (int i = 0; i < m; ++i) ph += k[2 * i] * z[i].real() + k[2 * i + 1] * z[i].imag();
        ph *= 2 * kPi;
        return cxd(trig == 0 ? std::cos(ph) : std::sin(ph));
      }, true));
  }
  return fs;
}

int default_max_mode(const Grid& g) {
  if (g.kind() == ManifoldKind::CP1) return 6;
  return g.dim() == 1 ? 3 : 1;
}

}  // namespace

ScalarField apply_L(const ScalarField& u, const MetricField& g) {
  require_same(u, g);
  switch (g.grid().kind()) {
    case ManifoldKind::CP1: return apply_L_cp1(u, g);
    case ManifoldKind::Torus: return apply_L_torus(u, g);
    case ManifoldKind::CP2: break;
  }
  throw InvalidInput("the Lichnerowicz operator needs a torus or cp1 grid");
}

cxd l2_inner(const ScalarField& f, const ScalarField& h, const MetricField& g) {
  return integrate_volume(f * h.conj(), g);
}

double default_kernel_tolerance(const Grid& g) {
  // first non-kernel eigenvalue: pi^4 on the flat unit torus, (2 pi)^2 * 24 for l = 2 on Fubini-Study
  double first = g.kind() == ManifoldKind::CP1 ? 4 * kPi * kPi * 24 : std::pow(kPi, 4);
  return 1e-4 * first;
}

PotentialBasis orthonormalize(const std::vector<ScalarField>& fs, const MetricField& g) {
  PotentialBasis b;
  b.functions.push_back(ScalarField::constant(g.grid(), 1.0 / std::sqrt(g.volume())));
  for (const auto& f0 : fs) {
    ScalarField f = f0;
    // two passes of modified Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : b.functions) f -= e * l2_inner(f, e, g);
    double nrm = std::sqrt(l2_inner(f, f, g).real());
    if (nrm <= 1e-10 * std::max(1.0, std::sqrt(l2_inner(f0, f0, g).real())))
      throw NumericalError("linearly dependent potential basis");
    b.functions.push_back(f * cxd(1.0 / nrm));
  }
  double gr = 0;
  for (std::size_t i = 0; i < b.functions.size(); ++i)
    for (std::size_t j = 0; j < b.functions.size(); ++j)
      gr = std::max(gr, std::abs(l2_inner(b.functions[i], b.functions[j], g) - (i == j ? 1.0 : 0.0)));
  b.gram_residual = gr;
  return b;
}

KernelReport kernel_basis(const MetricField& g, const KernelOptions& opt) {
  const Grid& grid = g.grid();
  if (grid.kind() == ManifoldKind::CP2) throw InvalidInput("kernel computation needs a torus or cp1 grid");
  KernelReport rep;
  rep.tol = opt.tol < 0 ? default_kernel_tolerance(grid) : opt.tol;
  auto trial = trial_space(grid, opt.max_mode < 0 ? default_max_mode(grid) : opt.max_mode);
  for (auto& f : trial) f = remove_mean(f, g);
  int n = int(trial.size());
  std::vector<ScalarField> Lf;
  for (const auto& f : trial) Lf.push_back(apply_L(f, g));
  std::size_t N = grid.size();
  Eigen::MatrixXcd F(N, n), LF(N, n);
  for (int j = 0; j < n; ++j)
    for (std::size_t p = 0; p < N; ++p) {
      double w = g.volume_density(p) * grid.weight(p);
      F(p, j) = trial[j][p];
      LF(p, j) = w * Lf[j][p];
    }
  Eigen::MatrixXcd A = F.adjoint() * LF;
  for (int j = 0; j < n; ++j)
    for (std::size_t p = 0; p < N; ++p) LF(p, j) = g.volume_density(p) * grid.weight(p) * trial[j][p];
  Eigen::MatrixXcd M = F.adjoint() * LF;
  A = 0.5 * (A + A.adjoint()).eval();
  M = 0.5 * (M + M.adjoint()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, M);
  if (es.info() != Eigen::Success) throw ConvergenceError("generalized eigensolver failed", {});
  std::vector<ScalarField> kernel;
  for (int c = 0; c < n; ++c) {
    double lam = es.eigenvalues()(c);
    rep.spectrum.push_back(lam);
    if (lam >= rep.tol) continue;
    ScalarField u(grid);
    for (int j = 0; j < n; ++j) u += trial[j] * es.eigenvectors()(j, c);
    kernel.push_back(u);
    rep.basis.eigenvalues.push_back(lam);
  }
  PotentialBasis b = orthonormalize(kernel, g);
  b.eigenvalues = rep.basis.eigenvalues;
  for (int i = 1; i <= b.dim(); ++i) {
    ScalarField Lu = apply_L(b.functions[i], g);
    b.residuals.push_back(std::sqrt(l2_inner(Lu, Lu, g).real()));
  }
  rep.basis = std::move(b);
  return rep;
}

ScalarField transported_potential(const ScalarField& u, const ScalarField& phi, const MetricField& g) {
  require_same(u, g);
  require_same(phi, g);
  metric_from_potential(g, phi);  // positivity of g + i d dbar phi
  ScalarField r = u + gradient_field(u, g).apply(phi);
  if (u.is_real() && r.imag_defect() <= 1e-10) r.make_real();
  return r;
}

ScalarField project_Pi(const ScalarField& f, const PotentialBasis& basis, const MetricField& g) {
  require_same(f, g);
  ScalarField r(f.grid());
  for (const auto& e : basis.functions) r += e * l2_inner(f, e, g);
  return r;
}

std::vector<double> principal_angles(const PotentialBasis& a, const PotentialBasis& b, const MetricField& g) {
  int da = a.dim(), db = b.dim();
  if (da == 0 || db == 0) return {};
  // sines from the residual of projecting a's span onto b's span
  std::vector<ScalarField> r;
  for (int i = 1; i <= da; ++i) {
    ScalarField v = a.functions[i];
    for (int j = 1; j <= db; ++j) v -= b.functions[j] * l2_inner(v, b.functions[j], g);
    r.push_back(v);
  }
  Eigen::MatrixXcd R(da, da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) R(i, j) = l2_inner(r[j], r[i], g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (R + R.adjoint()), Eigen::EigenvaluesOnly);
  std::vector<double> ang;
  for (int i = 0; i < da; ++i) ang.push_back(std::asin(std::min(1.0, std::sqrt(std::max(0.0, es.eigenvalues()(i))))));
  std::sort(ang.begin(), ang.end());
  return ang;
}

}  // namespace kahler
