#include "grid_impl.hpp"

#include <cmath>
#include <sstream>

namespace kahler {

namespace detail {

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

GridImpl::~GridImpl() {
  std::lock_guard<std::mutex> lk(fftw_planner_mutex());
  for (fftw_plan p : {fwd, bwd, az_fwd, az_bwd})
    if (p) fftw_destroy_plan(p);
}

Eigen::MatrixXd GridImpl::laplace_mode(int k) const {
  int par = (k % 2 == 0) ? 0 : 1;
  const Eigen::MatrixXd& Dp = D[par];
  const Eigen::MatrixXd& Dq = D[1 - par];
  Eigen::MatrixXd L = Dq * Dp;
  for (int j = 0; j < npol; ++j) {
    L.row(j) += cot[j] * Dp.row(j);
    L(j, j) -= double(k) * k / (sinv[j] * sinv[j]);
  }
  return L;
}

}  // namespace detail

namespace {

using detail::GridImpl;

std::vector<double> axis_wavenumbers(int n) {
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = (i < n / 2) ? i : i - n;
  return k;
}

// Spectral derivative on 2n equispaced points of the circle, folded onto the
// n points of (0, pi) for an even (parity +1) or odd (-1) extension.
Eigen::MatrixXd folded_derivative(int n, int parity) {
  double h = kPi / n;
  auto d = [&](int diff) {
    if (diff == 0) return 0.0;
    double s = (diff % 2 == 0) ? 0.5 : -0.5;
    return s / std::tan(diff * h / 2.0);
  };
  Eigen::MatrixXd D(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) D(j, l) = d(j - l) + parity * d(j - (2 * n - 1 - l));
  return D;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double beta = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    x[i] = 0.5 * (b - a) * t + 0.5 * (b + a);
    w[i] = (b - a) * v * v;
  }
}

}  // namespace

Grid Grid::torus(int m, int n) {
  if (m != 1 && m != 2) throw InvalidInput("torus dimension must be 1 or 2");
  if (n < 4 || (n & (n - 1)) != 0) throw InvalidInput("torus points per axis must be a power of two >= 4");
  auto g = std::make_shared<GridImpl>();
  g->kind = ManifoldKind::Torus;
  g->m = m;
  g->n = n;
  std::size_t count = 1;
  for (int a = 0; a < 2 * m; ++a) count *= n;
  g->count = count;
  g->wavenumber = axis_wavenumbers(n);
  g->coords.resize(count * m);
  g->weights.assign(count, 1.0 / double(count));
  for (std::size_t node = 0; node < count; ++node) {
    std::size_t r = node;
    int idx[4];
    for (int a = 2 * m - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(r % n);
      r /= n;
    }
    for (int i = 0; i < m; ++i) g->coords[node * m + i] = cxd(double(idx[2 * i]) / n, double(idx[2 * i + 1]) / n);
  }
  std::vector<int> dims(2 * m, n);
  {
    std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
    auto* a = fftw_alloc_complex(count);
    auto* b = fftw_alloc_complex(count);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    g->fwd = fftw_plan_dft(2 * m, dims.data(), a, b, FFTW_FORWARD, flags);
    g->bwd = fftw_plan_dft(2 * m, dims.data(), a, b, FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
  }
  return Grid(g);
}

Grid Grid::cp1(int n_polar, int n_azimuth, double radius) {
  if (n_polar < 8 || n_polar % 2 != 0) throw InvalidInput("cp1 polar node count must be even and >= 8");
  if (n_azimuth < 8 || n_azimuth % 2 != 0) throw InvalidInput("cp1 azimuthal node count must be even and >= 8");
  if (!(radius > 0)) throw InvalidInput("cp1 chart radius must be positive");
  auto g = std::make_shared<GridImpl>();
  g->kind = ManifoldKind::CP1;
  g->m = 1;
  g->npol = n_polar;
  g->naz = n_azimuth;
  g->radius = radius;
  g->full = std::isinf(radius);
  g->count = std::size_t(n_polar) * n_azimuth;
  double vt_max = g->full ? kPi : 2.0 * std::atan(radius);
  double h = vt_max / n_polar;
  g->dvartheta_step = h;
  for (int j = 0; j < n_polar; ++j) {
    double vt = (j + 0.5) * h;
    g->vartheta.push_back(vt);
    g->sinv.push_back(std::sin(vt));
    g->cosv.push_back(std::cos(vt));
    g->cot.push_back(std::cos(vt) / std::sin(vt));
    double c = std::cos(vt / 2.0);
    g->c2.push_back(c * c);
    double w;
    if (g->full) {
      double s = 0;
      for (int k = 1; k <= n_polar / 2; ++k) s += std::cos(2.0 * k * vt) / (4.0 * k * k - 1.0);
      w = (2.0 / n_polar) * (1.0 - 2.0 * s);
    } else {
      w = std::sin(vt) * h;
    }
    g->polar_weight.push_back(w);
  }
  for (int k = 0; k < n_azimuth; ++k) g->theta.push_back(2.0 * kPi * k / n_azimuth);
  g->coords.resize(g->count);
  g->weights.resize(g->count);
  for (int j = 0; j < n_polar; ++j) {
    double r = std::tan(g->vartheta[j] / 2.0);
    double c4 = g->c2[j] * g->c2[j];
    for (int k = 0; k < n_azimuth; ++k) {
      std::size_t node = std::size_t(j) * n_azimuth + k;
      g->coords[node] = std::polar(r, g->theta[k]);
      g->weights[node] = g->polar_weight[j] * (2.0 * kPi / n_azimuth) / (4.0 * c4);
    }
  }
  if (g->full) {
    g->D[0] = folded_derivative(n_polar, +1);
    g->D[1] = folded_derivative(n_polar, -1);
  }
  {
    std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
    auto* a = fftw_alloc_complex(g->count);
    auto* b = fftw_alloc_complex(g->count);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    int nn[1] = {n_azimuth};
    g->az_fwd = fftw_plan_many_dft(1, nn, n_polar, a, nullptr, 1, n_azimuth, b, nullptr, 1, n_azimuth,
                                   FFTW_FORWARD, flags);
    g->az_bwd = fftw_plan_many_dft(1, nn, n_polar, a, nullptr, 1, n_azimuth, b, nullptr, 1, n_azimuth,
                                   FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
  }
  return Grid(g);
}

Grid Grid::cp2_analytic(int n_polar, int n_angle) {
  if (n_polar < 2 || n_angle < 1) throw InvalidInput("cp2 node counts must be positive");
  auto g = std::make_shared<GridImpl>();
  g->kind = ManifoldKind::CP2;
  g->m = 2;
  g->npol = n_polar;
  g->naz = n_angle;
  std::vector<double> xv, wv, xa, wa;
  // z1 = tan(v) cos(a) e^{i t1}, z2 = tan(v) sin(a) e^{i t2}
  gauss_legendre(n_polar, 0.0, kPi / 2, xv, wv);
  gauss_legendre(n_polar, 0.0, kPi / 2, xa, wa);
  double dt = 2.0 * kPi / n_angle;
  for (int i = 0; i < n_polar; ++i) {
    double r = std::tan(xv[i]);
    double sec2 = 1.0 / (std::cos(xv[i]) * std::cos(xv[i]));
    for (int a = 0; a < n_polar; ++a) {
      double ca = std::cos(xa[a]), sa = std::sin(xa[a]);
      for (int t1 = 0; t1 < n_angle; ++t1)
        for (int t2 = 0; t2 < n_angle; ++t2) {
          double th1 = (t1 + 0.25) * dt, th2 = (t2 + 0.75) * dt;
          g->coords.push_back(std::polar(r * ca, th1));
          g->coords.push_back(std::polar(r * sa, th2));
          g->weights.push_back(wv[i] * wa[a] * dt * dt * r * r * r * sec2 * ca * sa);
        }
    }
  }
  g->count = g->weights.size();
  return Grid(g);
}

ManifoldKind Grid::kind() const { return impl_->kind; }

std::string Grid::tag() const {
  switch (impl_->kind) {
    case ManifoldKind::Torus: return "torus";
    case ManifoldKind::CP1: return "cp1";
    case ManifoldKind::CP2: return "cp2-analytic";
  }
  return "unknown";
}

int Grid::dim() const { return impl_->m; }
std::size_t Grid::size() const { return impl_->count; }

std::vector<std::size_t> Grid::shape() const {
  switch (impl_->kind) {
    case ManifoldKind::Torus: return std::vector<std::size_t>(2 * impl_->m, impl_->n);
    case ManifoldKind::CP1: return {std::size_t(impl_->npol), std::size_t(impl_->naz)};
    case ManifoldKind::CP2:
      return {std::size_t(impl_->npol), std::size_t(impl_->npol), std::size_t(impl_->naz),
              std::size_t(impl_->naz)};
  }
  return {};
}

cxd Grid::coord(std::size_t node, int i) const { return impl_->coords[node * impl_->m + i]; }
double Grid::weight(std::size_t node) const { return impl_->weights[node]; }
int Grid::n() const { return impl_->n; }
int Grid::n_polar() const { return impl_->npol; }
int Grid::n_azimuth() const { return impl_->naz; }
double Grid::radius() const { return impl_->radius; }
bool Grid::full_sphere() const { return impl_->full; }
double Grid::polar(int j) const { return impl_->vartheta.at(j); }
double Grid::azimuth(int k) const { return impl_->theta.at(k); }

double Grid::tail_mass() const {
  if (impl_->kind != ManifoldKind::CP1 || impl_->full) return 0.0;
  return 1.0 / (1.0 + impl_->radius * impl_->radius);
}

bool Grid::operator==(const Grid& o) const {
  if (impl_ == o.impl_) return true;
  return kind() == o.kind() && dim() == o.dim() && shape() == o.shape() &&
         (kind() != ManifoldKind::CP1 || radius() == o.radius() ||
          (full_sphere() && o.full_sphere()));
}

}  // namespace kahler
