#include "kahler/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grid_impl.hpp"
#include "kahler/parallel.hpp"

namespace kahler {

ScalarField::ScalarField(Grid g, bool real) : grid_(std::move(g)), v_(grid_.size(), 0.0), real_(real) {}

ScalarField::ScalarField(Grid g, std::vector<cxd> values, bool real)
    : grid_(std::move(g)), v_(std::move(values)), real_(real) {
  if (v_.size() != grid_.size()) throw InvalidInput("field size does not match grid");
  if (real_) make_real();
}

ScalarField ScalarField::constant(const Grid& g, cxd c) {
  return ScalarField(g, std::vector<cxd>(g.size(), c), c.imag() == 0.0);
}

ScalarField ScalarField::sample(const Grid& g, const std::function<cxd(std::span<const cxd>)>& f,
                                bool real) {
  ScalarField out(g);
  int m = g.dim();
  const auto& c = g.impl().coords;
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out.v_[i] = f(std::span<const cxd>(c.data() + i * m, m));
  });
  if (real) out.make_real();
  return out;
}

double ScalarField::sup_norm() const {
  double r = 0;
  for (const auto& x : v_) r = std::max(r, std::abs(x));
  return r;
}

double ScalarField::imag_defect() const {
  double im = 0, sup = 0;
  for (const auto& x : v_) {
    im = std::max(im, std::abs(x.imag()));
    sup = std::max(sup, std::abs(x));
  }
  return sup > 0 ? im / sup : 0.0;
}

ScalarField& ScalarField::make_real(double tol) {
  double d = imag_defect();
  if (d > tol) throw NumericalError("field flagged real has relative imaginary part " + std::to_string(d));
  for (auto& x : v_) x = x.real();
  real_ = true;
  return *this;
}

std::vector<double> ScalarField::real_values() const {
  std::vector<double> r(v_.size());
  for (std::size_t i = 0; i < v_.size(); ++i) r[i] = v_[i].real();
  return r;
}

void ScalarField::require_same(const ScalarField& o) const {
  if (!(grid_ == o.grid_) || v_.size() != o.v_.size()) throw InvalidInput("fields live on different grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same(o);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  real_ = real_ && o.real_;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same(o);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  real_ = real_ && o.real_;
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
  require_same(o);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] *= o.v_[i];
  real_ = real_ && o.real_;
  return *this;
}

ScalarField& ScalarField::operator*=(cxd s) {
  for (auto& x : v_) x *= s;
  real_ = real_ && s.imag() == 0.0;
  return *this;
}

ScalarField& ScalarField::operator+=(cxd s) {
  for (auto& x : v_) x += s;
  real_ = real_ && s.imag() == 0.0;
  return *this;
}

ScalarField ScalarField::conj() const {
  ScalarField r(*this);
  for (auto& x : r.v_) x = std::conj(x);
  return r;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd fubini_study_metric(std::span<const cxd> z) {
  int m = static_cast<int>(z.size());
  double s = 1.0;
  for (auto zi : z) s += std::norm(zi);
  Eigen::MatrixXcd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      G(i, j) = ((i == j ? 1.0 : 0.0) / s - std::conj(z[i]) * z[j] / (s * s)) / (2.0 * kPi);
  return G;
}

Eigen::MatrixXcd fubini_study_dmetric(std::span<const cxd> z, int k) {
  int m = static_cast<int>(z.size());
  double s = 1.0;
  for (auto zi : z) s += std::norm(zi);
  Eigen::MatrixXcd D(m, m);
  cxd zbk = std::conj(z[k]);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      cxd v = -(i == j ? 1.0 : 0.0) * zbk / (s * s) - std::conj(z[i]) * (j == k ? 1.0 : 0.0) / (s * s) +
              2.0 * std::conj(z[i]) * z[j] * zbk / (s * s * s);
      D(i, j) = v / (2.0 * kPi);
    }
  return D;
}

// Constant holomorphic sectional curvature: Theta^i_{j k lbar} = 2 pi (delta_ij g_{k lbar} + delta_ik g_{j lbar}).
// The closed form avoids the cancellation of the quotient-rule expression far out in the chart.
std::vector<cxd> fubini_study_curvature(std::span<const cxd> z) {
  int m = static_cast<int>(z.size());
  Eigen::MatrixXcd G = fubini_study_metric(z);
  std::vector<cxd> theta(std::size_t(m * m * m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          theta[((i * m + j) * m + k) * m + l] =
              2.0 * kPi * ((i == j ? G(k, l) : 0.0) + (i == k ? G(j, l) : 0.0));
  return theta;
}

// ---------------------------------------------------------------------------

MetricField::MetricField(Grid g, std::vector<cxd> entries) : grid_(std::move(g)), m_(grid_.dim()), e_(std::move(entries)) {
  if (e_.size() != grid_.size() * m_ * m_) throw InvalidInput("metric entry count does not match grid");
  if (grid_.kind() == ManifoldKind::CP2)
    throw InvalidInput("cp2 supports only the analytic Fubini-Study metric");
  if (grid_.kind() == ManifoldKind::CP1) {
    const auto& G = grid_.impl();
    rho_.resize(grid_.size());
    for (int j = 0; j < G.npol; ++j) {
      double gfs = G.c2[j] * G.c2[j] / (2.0 * kPi);
      for (int k = 0; k < G.naz; ++k) {
        std::size_t n = std::size_t(j) * G.naz + k;
        rho_[n] = e_[n].real() / gfs;
      }
    }
  }
  finalize();
}

MetricField MetricField::flat(const Grid& g) {
  if (g.kind() != ManifoldKind::Torus) throw InvalidInput("flat metric exists only on the torus");
  int m = g.dim();
  std::vector<cxd> e(g.size() * m * m, 0.0);
  for (std::size_t n = 0; n < g.size(); ++n)
    for (int i = 0; i < m; ++i) e[(n * m + i) * m + i] = 1.0;
  return MetricField(g, std::move(e));
}

MetricField MetricField::cp1_conformal(const Grid& g, std::vector<double> rho) {
  if (g.kind() != ManifoldKind::CP1) throw InvalidInput("conformal factor metric needs a cp1 grid");
  if (rho.size() != g.size()) throw InvalidInput("conformal factor size does not match grid");
  const auto& G = g.impl();
  std::vector<cxd> e(g.size());
  for (int j = 0; j < G.npol; ++j)
    for (int k = 0; k < G.naz; ++k) {
      std::size_t n = std::size_t(j) * G.naz + k;
      e[n] = rho[n] * G.c2[j] * G.c2[j] / (2.0 * kPi);
    }
  bool unit = std::all_of(rho.begin(), rho.end(), [](double r) { return r == 1.0; });
  return MetricField(g, std::move(e), std::move(rho), unit);
}

MetricField MetricField::fubini_study(const Grid& g) {
  switch (g.kind()) {
    case ManifoldKind::Torus: throw InvalidInput("Fubini-Study metric needs a projective grid");
    case ManifoldKind::CP1: return cp1_conformal(g, std::vector<double>(g.size(), 1.0));
    case ManifoldKind::CP2: break;
  }
  std::vector<cxd> e(g.size() * 4, 0.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    cxd z[2] = {g.coord(n, 0), g.coord(n, 1)};
    Eigen::MatrixXcd G = fubini_study_metric(z);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) e[(n * 2 + i) * 2 + j] = G(i, j);
  }
  return MetricField(g, std::move(e), {}, true);
}

MetricField::MetricField(Grid g, std::vector<cxd> entries, std::vector<double> rho, bool fs)
    : grid_(std::move(g)), m_(grid_.dim()), e_(std::move(entries)), rho_(std::move(rho)), fs_(fs) {
  finalize();
}

void MetricField::finalize() {
  std::size_t N = grid_.size();
  int m = m_;
  inv_.assign(e_.size(), 0.0);
  det_.assign(N, 0.0);
  std::vector<double> min_eig(N, 0.0);
  std::vector<double> herm(N, 0.0);
  parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) {
      Eigen::MatrixXcd G = at(n);
      double scale = G.cwiseAbs().maxCoeff();
      herm[n] = scale > 0 ? (G - G.adjoint()).cwiseAbs().maxCoeff() / scale : 0.0;
      Eigen::MatrixXcd H = 0.5 * (G + G.adjoint());
      if (m == 1) {
        min_eig[n] = H(0, 0).real();
        det_[n] = H(0, 0).real();
        inv_[n] = 1.0 / H(0, 0).real();
        continue;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
      min_eig[n] = es.eigenvalues()(0);
      det_[n] = H.determinant().real();
      Eigen::MatrixXcd Gi = H.inverse();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) inv_[(n * m + i) * m + j] = Gi(i, j);
    }
  });
  for (std::size_t n = 0; n < N; ++n)
    if (herm[n] > 1e-12) throw InvalidInput("metric not Hermitian at node " + std::to_string(n));
  std::size_t worst = 0;
  for (std::size_t n = 1; n < N; ++n)
    if (min_eig[n] < min_eig[worst]) worst = n;
  if (!(min_eig[worst] > 0.0)) throw PositivityError(worst, min_eig[worst]);
}

Eigen::MatrixXcd MetricField::at(std::size_t node) const {
  Eigen::MatrixXcd G(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) G(i, j) = g(node, i, j);
  return G;
}

double MetricField::volume_density(std::size_t node) const {
  double f = (m_ == 1) ? 2.0 : (m_ == 2 ? 8.0 : 48.0);  // m! 2^m
  return f * det_[node];
}

double MetricField::volume() const {
  std::vector<double> t(size());
  for (std::size_t n = 0; n < size(); ++n) t[n] = volume_density(n) * grid_.weight(n);
  return pairwise_sum(t);
}

const std::vector<double>& MetricField::rho() const {
  if (grid_.kind() != ManifoldKind::CP1) throw InvalidInput("conformal factor defined only on cp1");
  return rho_;
}

}  // namespace kahler
