#include "kahler/curvature.hpp"

#include <cmath>

#include "grid_impl.hpp"
#include "kahler/manifold.hpp"
#include "kahler/parallel.hpp"
#include "kahler/sphere.hpp"

namespace kahler {

namespace {

PQForm omega_at(const MetricField& g, std::size_t n) { return PQForm::kahler_form(g.at(n)); }

void fill_chern(CurvatureData& c) {
  std::size_t N = c.grid.size();
  int m = c.m;
  c.chern.assign(m, std::vector<PQForm>(N));
  parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) {
      MatrixPQForm A = c.theta_at(n);
      A *= kI / (2.0 * kPi);
      auto ck = char_coefficients(A);
      for (int k = 1; k <= m; ++k) c.chern[k - 1][n] = ck[k];
    }
  });
}

void fill_ricci(CurvatureData& c) {
  int m = c.m;
  c.ricci.assign(m * m, ScalarField(c.grid));
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l)
      for (int i = 0; i < m; ++i) c.ricci[k * m + l] += c.theta[((i * m + i) * m + k) * m + l];
}

}  // namespace

MatrixPQForm CurvatureData::theta_at(std::size_t node) const {
  MatrixPQForm M(m, m, 1, 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      PQForm f(m, 1, 1);
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) f.set_mask(1u << k, 1u << l, theta[((i * m + j) * m + k) * m + l][node]);
      M.set(i, j, f);
    }
  return M;
}

PQForm CurvatureData::ricci_form_at(std::size_t node) const {
  PQForm f(m, 1, 1);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) f.set_mask(1u << k, 1u << l, kI * ricci[k * m + l][node]);
  return f;
}

CurvatureData curvature(const MetricField& g) {
  CurvatureData c{g.grid()};
  int m = c.m = g.dim();
  const Grid& grid = c.grid;
  std::size_t N = grid.size();
  c.connection.assign(m * m * m, ScalarField(grid));
  c.theta.assign(m * m * m * m, ScalarField(grid));

  if (grid.kind() == ManifoldKind::CP2) {
    if (!g.analytic_fs()) throw InvalidInput("cp2 curvature is available only for Fubini-Study");
    parallel_for(N, [&](std::size_t b, std::size_t e) {
      for (std::size_t n = b; n < e; ++n) {
        cxd z[2] = {grid.coord(n, 0), grid.coord(n, 1)};
        Eigen::MatrixXcd GiT = fubini_study_metric(z).inverse().transpose();
        for (int k = 0; k < m; ++k) {
          Eigen::MatrixXcd A = GiT * fubini_study_dmetric(z, k).transpose();
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) c.connection[(i * m + j) * m + k][n] = A(i, j);
        }
        auto th = fubini_study_curvature(z);
        for (std::size_t q = 0; q < th.size(); ++q) c.theta[q][n] = th[q];
      }
    });
  } else if (grid.kind() == ManifoldKind::CP1) {
    const auto& G = grid.impl();
    const auto& rho = g.rho();
    std::vector<cxd> logrho(N);
    for (std::size_t n = 0; n < N; ++n) logrho[n] = std::log(rho[n]);
    bool unit = g.analytic_fs();
    std::vector<cxd> lap = unit ? std::vector<cxd>(N, 0.0) : sphere::laplacian(grid, logrho);
    std::vector<cxd> dlog = unit ? std::vector<cxd>(N, 0.0) : sphere::edth(grid, logrho, +1);
    for (int j = 0; j < G.npol; ++j)
      for (int k = 0; k < G.naz; ++k) {
        std::size_t n = std::size_t(j) * G.naz + k;
        double c2 = G.c2[j];
        cxd z = grid.coord(n, 0);
        // d log g_FS / dz = -2 zbar / (1 + |z|^2)
        c.connection[0][n] = -2.0 * std::conj(z) * c2 + std::polar(c2, -G.theta[k]) * dlog[n];
        c.theta[0][n] = c2 * c2 * (2.0 - lap[n].real());
      }
  } else {
    // torus: with Gh = G^T, A_k = Gh^{-1} d_k Gh and
    // Theta_{kl} = Gh^{-1} (dbar_l Gh) Gh^{-1} (d_k Gh) - Gh^{-1} d_k dbar_l Gh,
    // evaluated pointwise from exact spectral derivatives of the band-limited metric.
    std::vector<ScalarField> dG, ddG;  // dG[(i*m+j)*m+k] = d_k g_ij, ddG[((i*m+j)*m+k)*m+l]
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        std::vector<cxd> v(N);
        for (std::size_t n = 0; n < N; ++n) v[n] = g.g(n, i, j);
        ScalarField gij(grid, std::move(v));
        for (int k = 0; k < m; ++k) dG.push_back(d_holo(gij, k));
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) ddG.push_back(ddbar(gij, k, l));
      }
    parallel_for(N, [&](std::size_t b, std::size_t e) {
      Eigen::MatrixXcd Gi(m, m);
      std::vector<Eigen::MatrixXcd> D(m, Eigen::MatrixXcd(m, m)), Db(m, Eigen::MatrixXcd(m, m));
      for (std::size_t n = b; n < e; ++n) {
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            Gi(i, j) = g.ginv(n, j, i);  // (G^T)^{-1}
            for (int k = 0; k < m; ++k) {
              D[k](i, j) = dG[(j * m + i) * m + k][n];
              // dbar_k g_ji = conj(d_k g_ij) by hermiticity
              Db[k](i, j) = std::conj(dG[(i * m + j) * m + k][n]);
            }
          }
        for (int k = 0; k < m; ++k) {
          Eigen::MatrixXcd A = Gi * D[k];
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) c.connection[(i * m + j) * m + k][n] = A(i, j);
          for (int l = 0; l < m; ++l) {
            Eigen::MatrixXcd H(m, m);
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j) H(i, j) = ddG[((j * m + i) * m + k) * m + l][n];
            Eigen::MatrixXcd T = Gi * Db[l] * A - Gi * H;
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j) c.theta[((i * m + j) * m + k) * m + l][n] = T(i, j);
          }
        }
      }
    });
  }
  fill_ricci(c);
  fill_chern(c);
  return c;
}

std::vector<double> chern_numbers(const MetricField& g, const CurvatureData& curv) {
  int m = g.dim();
  std::size_t N = g.size();
  std::vector<double> out;
  for (int k = 1; k <= m; ++k) {
    std::vector<cxd> top(N);
    parallel_for(N, [&](std::size_t b, std::size_t e) {
      for (std::size_t n = b; n < e; ++n)
        top[n] = wedge(curv.chern_at(k, n), wedge_power(omega_at(g, n), m - k)).top();
    });
    out.push_back(integrate(ScalarField(g.grid(), std::move(top))).real());
  }
  return out;
}

double sigma(const MetricField& g, const CurvatureData& curv, double t) {
  auto nums = chern_numbers(g, curv);
  double s = 0, tp = 1;
  for (double v : nums) {
    s += tp * v;
    tp *= t;
  }
  return s / g.volume();
}

double sigma(const MetricField& g, double t) { return sigma(g, curvature(g), t); }

ScalarField scalar_chern_route(const MetricField& g, const CurvatureData& curv, double t) {
  int m = g.dim();
  std::size_t N = g.size();
  std::vector<cxd> S(N);
  std::vector<std::size_t> bad;
  parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) {
      PQForm w = omega_at(g, n);
      cxd vol = wedge_power(w, m).top();
      cxd num = 0, tp = 1;
      for (int k = 1; k <= m; ++k) {
        num += tp * wedge(curv.chern_at(k, n), wedge_power(w, m - k)).top();
        tp *= t;
      }
      S[n] = vol == 0.0 ? cxd(std::nan("")) : 2.0 * m * kPi * num / vol;
    }
  });
  for (std::size_t n = 0; n < N; ++n)
    if (std::isnan(S[n].real())) throw NumericalError("omega^m vanishes at node " + std::to_string(n));
  return ScalarField(g.grid(), std::move(S)).make_real(1e-8);
}

ScalarField scalar_determinant_route(const MetricField& g, const CurvatureData& curv, double t) {
  int m = g.dim();
  std::size_t N = g.size();
  std::vector<cxd> S(N);
  parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) {
      PQForm w = omega_at(g, n);
      cxd vol = wedge_power(w, m).top();
      MatrixPQForm T = curv.theta_at(n);
      T *= kI / (2.0 * kPi);
      MatrixPQForm W = MatrixPQForm::identity(w, m);
      if (t == 0.0) {
        std::vector<MatrixPQForm> args(m, W);
        args[0] = T;
        S[n] = 2.0 * m * kPi * double(m) * mixed_cm(args).top() / vol;
      } else {
        MatrixPQForm M = W;
        T *= t;
        M += T;
        S[n] = 2.0 * m * kPi * (form_det(M).top() - vol) / (t * vol);
      }
    }
  });
  return ScalarField(g.grid(), std::move(S)).make_real(1e-8);
}

Eigen::MatrixXcd admissibility_matrix(const MetricField& g, const CurvatureData& curv, double t, std::size_t n) {
  int m = g.dim();
  PQForm w = omega_at(g, n);
  cxd vol = wedge_power(w, m).top();
  MatrixPQForm W = MatrixPQForm::identity(w, m);
  if (t != 0.0) {
    MatrixPQForm T = curv.theta_at(n);
    T *= t * kI / (2.0 * kPi);
    W += T;
  }
  Eigen::MatrixXcd G = g.at(n);
  Eigen::MatrixXcd H(m * m, m * m);
  std::vector<MatrixPQForm> args(m, W);
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c)
      for (int b = 0; b < m; ++b)
        for (int d = 0; d < m; ++d) {
          // B^i_j = delta_{ib} g_{j abar} (i/2pi) dz^c ^ dzbar^d
          MatrixPQForm B(m, m, 1, 1);
          for (int j = 0; j < m; ++j)
            B.set(b, j, PQForm::basis(m, {c}, {d}, G(j, a) * kI / (2.0 * kPi)));
          args[0] = B;
          H(a * m + c, b * m + d) = double(m) * mixed_cm(args).top() / vol;
        }
  return H;
}

AdmissibilityReport admissible_t(const MetricField& g, const CurvatureData& curv, double t) {
  std::size_t N = g.size();
  std::vector<double> margin(N);
  parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) {
      Eigen::MatrixXcd H = admissibility_matrix(g, curv, t, n);
      Eigen::MatrixXcd Hh = 0.5 * (H + H.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hh, Eigen::EigenvaluesOnly);
      margin[n] = es.eigenvalues()(0);
    }
  });
  AdmissibilityReport r;
  for (std::size_t n = 0; n < N; ++n)
    if (margin[n] < margin[r.worst_node]) r.worst_node = n;
  r.margin = margin[r.worst_node];
  r.ok = r.margin > 0;
  return r;
}

AdmissibilityReport admissible_t(const MetricField& g, double t) { return admissible_t(g, curvature(g), t); }

PerturbedScalar perturbed_scalar(const MetricField& g, const CurvatureData& curv, double t, bool check_admissible) {
  PerturbedScalar r{t, scalar_chern_route(g, curv, t)};
  r.sigma = sigma(g, curv, t);
  ScalarField S2 = r.S * r.S;
  r.calabi_energy = integrate_volume(S2, g).real();
  r.mean_S = volume_mean(r.S, g).real();
  if (check_admissible) {
    auto a = admissible_t(g, curv, t);
    r.margin = a.margin;
    if (!a.ok) r.warning = "t outside the admissible range (margin " + std::to_string(a.margin) + ")";
  }
  return r;
}

PerturbedScalar perturbed_scalar(const MetricField& g, double t) { return perturbed_scalar(g, curvature(g), t); }

}  // namespace kahler
