#include "kahler/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "grid_impl.hpp"
#include "kahler/parallel.hpp"

namespace kahler::sphere {

namespace {

using detail::GridImpl;

const GridImpl& cp1_impl(const Grid& g) {
  if (g.kind() != ManifoldKind::CP1) throw InvalidInput("sphere operator needs a cp1 grid");
  return g.impl();
}

std::vector<cxd> az_transform(const GridImpl& G, const std::vector<cxd>& f, bool forward) {
  std::vector<cxd> out(f.size());
  fftw_execute_dft(forward ? G.az_fwd : G.az_bwd,
                   reinterpret_cast<fftw_complex*>(const_cast<cxd*>(f.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  if (!forward)
    for (auto& x : out) x /= double(G.naz);
  return out;
}

// Applies op(kk, k, column) to every azimuthal mode column of the transform.
template <class Op>
std::vector<cxd> per_mode(const GridImpl& G, const std::vector<cxd>& f, Op op) {
  std::vector<cxd> hat = az_transform(G, f, true);
  int n = G.npol, na = G.naz;
  double top = 0;
  for (const auto& x : hat) top = std::max(top, std::abs(x));
  parallel_for(std::size_t(na), [&](std::size_t b, std::size_t e) {
    Eigen::VectorXcd col(n);
    for (std::size_t kk = b; kk < e; ++kk) {
      for (int j = 0; j < n; ++j) col(j) = hat[std::size_t(j) * na + kk];
      // azimuthal modes at transform roundoff carry no data; dropping them keeps
      // the 1/sin factors near the poles from amplifying the noise
      if (col.cwiseAbs().maxCoeff() <= 1e-14 * top) col.setZero();
      col = op(int(kk), G.mode_k(int(kk)), col);
      for (int j = 0; j < n; ++j) hat[std::size_t(j) * na + kk] = col(j);
    }
  });
  return az_transform(G, hat, false);
}

int mode_parity_index(int parity, int k) {
  int p = (k % 2 == 0) ? parity : -parity;
  return p > 0 ? 0 : 1;
}

std::vector<cxd> fd_vartheta(const GridImpl& G, const std::vector<cxd>& f, int parity) {
  int n = G.npol, na = G.naz;
  double h = G.dvartheta_step;
  std::vector<cxd> out(f.size());
  auto at = [&](int j, int k) -> cxd {
    if (j >= 0) return f[std::size_t(j) * na + k];
    return double(parity) * f[std::size_t(-j - 1) * na + (k + na / 2) % na];
  };
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < na; ++k) {
      cxd d;
      if (j <= n - 3)
        d = (at(j - 2, k) - 8.0 * at(j - 1, k) + 8.0 * at(j + 1, k) - at(j + 2, k)) / (12.0 * h);
      else if (j == n - 2)
        d = (3.0 * at(j + 1, k) + 10.0 * at(j, k) - 18.0 * at(j - 1, k) + 6.0 * at(j - 2, k) - at(j - 3, k)) /
            (12.0 * h);
      else
        d = (25.0 * at(j, k) - 48.0 * at(j - 1, k) + 36.0 * at(j - 2, k) - 16.0 * at(j - 3, k) +
             3.0 * at(j - 4, k)) /
            (12.0 * h);
      out[std::size_t(j) * na + k] = d;
    }
  return out;
}

std::vector<cxd> fd_theta(const GridImpl& G, const std::vector<cxd>& f) {
  int n = G.npol, na = G.naz;
  double h = 2.0 * kPi / na;
  std::vector<cxd> out(f.size());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < na; ++k) {
      auto at = [&](int o) { return f[std::size_t(j) * na + (k + o + na) % na]; };
      out[std::size_t(j) * na + k] = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
    }
  return out;
}

}  // namespace

std::vector<cxd> d_vartheta(const Grid& g, const std::vector<cxd>& f, int parity) {
  const GridImpl& G = cp1_impl(g);
  if (!G.full) return fd_vartheta(G, f, parity);
  return per_mode(G, f, [&](int, int k, const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
    return G.D[mode_parity_index(parity, k)] * c;
  });
}

std::vector<cxd> d_theta(const Grid& g, const std::vector<cxd>& f) {
  const GridImpl& G = cp1_impl(g);
  if (!G.full) return fd_theta(G, f);
  return per_mode(G, f, [&](int kk, int k, const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
    if (2 * kk == G.naz) return Eigen::VectorXcd::Zero(c.size());
    return cxd(0.0, double(k)) * c;
  });
}

std::vector<cxd> edth_bar(const Grid& g, const std::vector<cxd>& f, int parity) {
  const GridImpl& G = cp1_impl(g);
  auto a = d_vartheta(g, f, parity);
  auto b = d_theta(g, f);
  for (int j = 0; j < G.npol; ++j)
    for (int k = 0; k < G.naz; ++k) {
      std::size_t n = std::size_t(j) * G.naz + k;
      a[n] += kI * b[n] / G.sinv[j];
    }
  return a;
}

std::vector<cxd> edth(const Grid& g, const std::vector<cxd>& f, int parity) {
  const GridImpl& G = cp1_impl(g);
  auto a = d_vartheta(g, f, parity);
  auto b = d_theta(g, f);
  for (int j = 0; j < G.npol; ++j)
    for (int k = 0; k < G.naz; ++k) {
      std::size_t n = std::size_t(j) * G.naz + k;
      a[n] -= kI * b[n] / G.sinv[j];
    }
  return a;
}

std::vector<cxd> laplacian(const Grid& g, const std::vector<cxd>& f) {
  const GridImpl& G = cp1_impl(g);
  if (G.full) {
    return per_mode(G, f, [&](int, int k, const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
      int par = (k % 2 == 0) ? 0 : 1;
      Eigen::VectorXcd d1 = G.D[par] * c;
      Eigen::VectorXcd d2 = G.D[1 - par] * d1;
      for (int j = 0; j < G.npol; ++j)
        d2(j) += G.cot[j] * d1(j) - double(k) * k / (G.sinv[j] * G.sinv[j]) * c(j);
      return d2;
    });
  }
  auto d1 = fd_vartheta(G, f, +1);
  auto d2 = fd_vartheta(G, d1, -1);
  auto t2 = fd_theta(G, fd_theta(G, f));
  for (int j = 0; j < G.npol; ++j)
    for (int k = 0; k < G.naz; ++k) {
      std::size_t n = std::size_t(j) * G.naz + k;
      d2[n] += G.cot[j] * d1[n] + t2[n] / (G.sinv[j] * G.sinv[j]);
    }
  return d2;
}

cxd area_integral(const Grid& g, const std::vector<cxd>& f) {
  const GridImpl& G = cp1_impl(g);
  std::vector<cxd> t(f.size());
  for (int j = 0; j < G.npol; ++j)
    for (int k = 0; k < G.naz; ++k) {
      std::size_t n = std::size_t(j) * G.naz + k;
      t[n] = f[n] * G.polar_weight[j] * (2.0 * kPi / G.naz);
    }
  return pairwise_sum(t);
}

std::vector<cxd> solve_laplacian(const Grid& g, const std::vector<cxd>& h) {
  const GridImpl& G = cp1_impl(g);
  if (!G.full) throw InvalidInput("sphere Poisson solve needs the full-sphere grid");
  int n = G.npol;
  {
    std::lock_guard<std::mutex> lk(G.cache_mu);
    if (G.lap_lu.empty()) {
      G.lap_lu.resize(G.naz / 2 + 1);
      for (int k = 1; k <= G.naz / 2; ++k)
        G.lap_lu[k] = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(G.laplace_mode(k));
      Eigen::MatrixXd A(n + 1, n);
      A.topRows(n) = G.laplace_mode(0);
      for (int j = 0; j < n; ++j) A(n, j) = G.polar_weight[j];
      G.lap0_qr = std::make_unique<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>>(A);
    }
  }
  return per_mode(G, h, [&](int, int k, const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
    if (k == 0) {
      Eigen::VectorXd rhs(n + 1);
      Eigen::VectorXcd out(n);
      rhs.head(n) = c.real();
      rhs(n) = 0;
      out.real() = G.lap0_qr->solve(rhs);
      rhs.head(n) = c.imag();
      out.imag() = G.lap0_qr->solve(rhs);
      return out;
    }
    const auto& lu = *G.lap_lu[std::abs(k)];
    Eigen::VectorXcd out(n);
    out.real() = lu.solve(Eigen::VectorXd(c.real()));
    out.imag() = lu.solve(Eigen::VectorXd(c.imag()));
    return out;
  });
}

DampedBiharmonic::DampedBiharmonic(const Grid& g, double h, double s) : grid_(g), h_(h) {
  const GridImpl& G = cp1_impl(g);
  if (!G.full) throw InvalidInput("damped biharmonic solve needs the full-sphere grid");
  int n = G.npol;
  lu_.resize(G.naz / 2 + 1);
  for (int k = 0; k <= G.naz / 2; ++k) {
    Eigen::MatrixXd L = G.laplace_mode(k);
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + h * s * s * (L * L);
    lu_[k].compute(M);
  }
}

std::vector<cxd> DampedBiharmonic::solve(const std::vector<cxd>& rhs) const {
  const GridImpl& G = grid_.impl();
  int n = G.npol;
  return per_mode(G, rhs, [&](int, int k, const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
    const auto& lu = lu_[std::abs(k)];
    Eigen::VectorXcd out(n);
    out.real() = lu.solve(Eigen::VectorXd(c.real()));
    out.imag() = lu.solve(Eigen::VectorXd(c.imag()));
    return out;
  });
}

}  // namespace kahler::sphere
