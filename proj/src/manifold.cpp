#include "kahler/manifold.hpp"

#include <cmath>

#include "grid_impl.hpp"
#include "kahler/parallel.hpp"
#include "kahler/sphere.hpp"

namespace kahler {

namespace {

using detail::GridImpl;

std::vector<cxd> torus_fft(const GridImpl& G, const std::vector<cxd>& f, bool forward) {
  std::vector<cxd> out(f.size());
  fftw_execute_dft(forward ? G.fwd : G.bwd, reinterpret_cast<fftw_complex*>(const_cast<cxd*>(f.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  if (!forward) {
    double s = 1.0 / double(G.count);
    for (auto& x : out) x *= s;
  }
  return out;
}

// Multiplies the Fourier coefficients by sym(k) where k holds the 2m integer
// wavenumbers (Nyquist reported as -n/2).
template <class Sym>
std::vector<cxd> torus_symbol(const GridImpl& G, const std::vector<cxd>& f, Sym sym) {
  std::vector<cxd> hat = torus_fft(G, f, true);
  int dims = 2 * G.m, n = G.n;
  parallel_for(hat.size(), [&](std::size_t b, std::size_t e) {
    double k[4];
    for (std::size_t node = b; node < e; ++node) {
      std::size_t r = node;
      for (int a = dims - 1; a >= 0; --a) {
        k[a] = G.wavenumber[r % n];
        r /= n;
      }
      hat[node] *= sym(k);
    }
  });
  return torus_fft(G, hat, false);
}

// Symbols of d/dz_i and d/dzbar_i on a unit-period torus.
struct TorusSymbols {
  double nyq;
  cxd dz(const double* k, int i) const {
    double kx = std::abs(k[2 * i]) == nyq ? 0.0 : k[2 * i];
    double ky = std::abs(k[2 * i + 1]) == nyq ? 0.0 : k[2 * i + 1];
    return kPi * cxd(ky, kx);
  }
  cxd dzb(const double* k, int i) const {
    double kx = std::abs(k[2 * i]) == nyq ? 0.0 : k[2 * i];
    double ky = std::abs(k[2 * i + 1]) == nyq ? 0.0 : k[2 * i + 1];
    return kPi * cxd(-ky, kx);
  }
  cxd ddb(const double* k, int i, int j) const {
    if (i == j) return -kPi * kPi * (k[2 * i] * k[2 * i] + k[2 * i + 1] * k[2 * i + 1]);
    return dz(k, i) * dzb(k, j);
  }
};

void require_torus_or_cp1(const Grid& g) {
  if (g.kind() == ManifoldKind::CP2)
    throw InvalidInput("cp2 is supported only through analytic Fubini-Study data");
}

std::vector<cxd> cp1_phase_scale(const GridImpl& G, std::vector<cxd> f, int phase) {
  for (int j = 0; j < G.npol; ++j)
    for (int k = 0; k < G.naz; ++k) {
      std::size_t n = std::size_t(j) * G.naz + k;
      f[n] *= std::polar(G.c2[j], phase * G.theta[k]);
    }
  return f;
}

}  // namespace

ScalarField d_holo(const ScalarField& f, int i) {
  const Grid& g = f.grid();
  require_torus_or_cp1(g);
  if (i < 0 || i >= g.dim()) throw InvalidInput("derivative index out of range");
  const GridImpl& G = g.impl();
  if (g.kind() == ManifoldKind::Torus) {
    TorusSymbols s{G.n / 2.0};
    return ScalarField(g, torus_symbol(G, f.values(), [&](const double* k) { return s.dz(k, i); }));
  }
  return ScalarField(g, cp1_phase_scale(G, sphere::edth(g, f.values(), +1), -1));
}

ScalarField d_antiholo(const ScalarField& f, int i) {
  const Grid& g = f.grid();
  require_torus_or_cp1(g);
  if (i < 0 || i >= g.dim()) throw InvalidInput("derivative index out of range");
  const GridImpl& G = g.impl();
  if (g.kind() == ManifoldKind::Torus) {
    TorusSymbols s{G.n / 2.0};
    return ScalarField(g, torus_symbol(G, f.values(), [&](const double* k) { return s.dzb(k, i); }));
  }
  return ScalarField(g, cp1_phase_scale(G, sphere::edth_bar(g, f.values(), +1), +1));
}

std::vector<ScalarField> d_holo(const ScalarField& f) {
  std::vector<ScalarField> r;
  for (int i = 0; i < f.grid().dim(); ++i) r.push_back(d_holo(f, i));
  return r;
}

std::vector<ScalarField> d_antiholo(const ScalarField& f) {
  std::vector<ScalarField> r;
  for (int i = 0; i < f.grid().dim(); ++i) r.push_back(d_antiholo(f, i));
  return r;
}

ScalarField ddbar(const ScalarField& f, int i, int j) {
  const Grid& g = f.grid();
  require_torus_or_cp1(g);
  if (i < 0 || j < 0 || i >= g.dim() || j >= g.dim()) throw InvalidInput("derivative index out of range");
  const GridImpl& G = g.impl();
  if (g.kind() == ManifoldKind::Torus) {
    TorusSymbols s{G.n / 2.0};
    ScalarField r(g, torus_symbol(G, f.values(), [&](const double* k) { return s.ddb(k, i, j); }));
    if (f.is_real() && i == j) r.make_real();
    return r;
  }
  auto lap = sphere::laplacian(g, f.values());
  for (int jj = 0; jj < G.npol; ++jj)
    for (int k = 0; k < G.naz; ++k) lap[std::size_t(jj) * G.naz + k] *= G.c2[jj] * G.c2[jj];
  ScalarField r(g, std::move(lap));
  if (f.is_real()) r.make_real();
  return r;
}

ScalarField laplacian(const ScalarField& f, const MetricField& g) {
  const Grid& grid = f.grid();
  require_torus_or_cp1(grid);
  if (!(grid == g.grid())) throw InvalidInput("field and metric live on different grids");
  if (grid.kind() == ManifoldKind::CP1) {
    auto lap = sphere::laplacian(grid, f.values());
    const auto& rho = g.rho();
    for (std::size_t n = 0; n < lap.size(); ++n) lap[n] *= 2.0 * kPi / rho[n];
    ScalarField r(grid, std::move(lap));
    if (f.is_real()) r.make_real();
    return r;
  }
  int m = grid.dim();
  ScalarField out(grid);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      ScalarField d = ddbar(f, i, j);
      for (std::size_t n = 0; n < out.size(); ++n) out[n] += g.ginv(n, j, i) * d[n];
    }
  if (f.is_real()) out.make_real();
  return out;
}

MetricField metric_from_potential(const MetricField& g0, const ScalarField& phi) {
  const Grid& grid = g0.grid();
  require_torus_or_cp1(grid);
  if (!(grid == phi.grid())) throw InvalidInput("potential and metric live on different grids");
  if (phi.imag_defect() > 1e-10) throw InvalidInput("Kahler potential must be real");
  if (grid.kind() == ManifoldKind::CP1) {
    auto lap = sphere::laplacian(grid, phi.values());
    std::vector<double> rho(g0.rho());
    for (std::size_t n = 0; n < rho.size(); ++n) rho[n] += 2.0 * kPi * lap[n].real();
    return MetricField::cp1_conformal(grid, std::move(rho));
  }
  int m = grid.dim();
  std::vector<cxd> e(g0.entries());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (j < i) continue;
      ScalarField d = ddbar(phi, i, j);
      for (std::size_t n = 0; n < grid.size(); ++n) {
        e[(n * m + i) * m + j] += d[n];
        if (j != i) e[(n * m + j) * m + i] += std::conj(d[n]);
      }
    }
  if (m == 1)
    for (auto& x : e) x = x.real();
  return MetricField(grid, std::move(e));
}

cxd integrate(const ScalarField& top) {
  const Grid& g = top.grid();
  cxd K = top_basis_volume(g.dim());
  std::vector<cxd> t(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) t[n] = top[n] * K * g.weight(n);
  return pairwise_sum(t);
}

cxd integrate(std::span<const PQForm> top, const Grid& grid) {
  if (top.size() != grid.size()) throw InvalidInput("form field size does not match grid");
  int m = grid.dim();
  std::vector<cxd> c(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (top[n].dim() != m || top[n].p() != m || top[n].q() != m)
      throw InvalidInput("integrand must have degree (m,m)");
    c[n] = top[n].top();
  }
  return integrate(ScalarField(grid, std::move(c)));
}

cxd integrate_volume(const ScalarField& f, const MetricField& g) {
  if (!(f.grid() == g.grid())) throw InvalidInput("field and metric live on different grids");
  const Grid& grid = g.grid();
  std::vector<cxd> t(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) t[n] = f[n] * g.volume_density(n) * grid.weight(n);
  return pairwise_sum(t);
}

cxd volume_mean(const ScalarField& f, const MetricField& g) { return integrate_volume(f, g) / g.volume(); }

ScalarField remove_mean(const ScalarField& f, const MetricField& g) {
  ScalarField r(f);
  cxd mu = volume_mean(f, g);
  if (f.is_real()) mu = mu.real();
  r += -mu;
  return r;
}

ScalarField solve_poisson(const ScalarField& rhs, const MetricField& g, const PoissonOptions& opt) {
  const Grid& grid = g.grid();
  require_torus_or_cp1(grid);
  if (!(grid == rhs.grid())) throw InvalidInput("rhs and metric live on different grids");
  double scale = rhs.sup_norm();
  if (scale == 0.0) return ScalarField(grid, rhs.is_real());
  cxd mean = integrate_volume(rhs, g);
  if (std::abs(mean) > opt.solvability_tol * scale * g.volume())
    throw InvalidInput("Poisson right-hand side has nonzero mean " + std::to_string(std::abs(mean)));
  ScalarField u(grid);
  const GridImpl& G = grid.impl();
  if (grid.kind() == ManifoldKind::CP1) {
    std::vector<cxd> h(rhs.values());
    const auto& rho = g.rho();
    for (std::size_t n = 0; n < h.size(); ++n) h[n] *= rho[n] / (2.0 * kPi);
    // remove the O(roundoff) area mean left by quadrature
    cxd am = sphere::area_integral(grid, h) / (4.0 * kPi);
    for (auto& x : h) x -= am;
    u = ScalarField(grid, sphere::solve_laplacian(grid, h));
  } else if (grid.dim() == 1) {
    std::vector<cxd> h(rhs.values());
    for (std::size_t n = 0; n < h.size(); ++n) h[n] *= g.g(n, 0, 0);
    u = ScalarField(grid, torus_symbol(G, h, [](const double* k) -> cxd {
      double s = k[0] * k[0] + k[1] * k[1];
      return s == 0.0 ? 0.0 : -1.0 / (kPi * kPi * s);
    }));
  } else {
    int m = grid.dim();
    Eigen::MatrixXcd Gbar = Eigen::MatrixXcd::Zero(m, m);
    for (std::size_t n = 0; n < grid.size(); ++n) Gbar += g.at(n);
    Gbar /= double(grid.size());
    Eigen::MatrixXcd Ghat = Gbar.inverse().transpose();  // g^{i jbar}
    auto precond = [&](const double* k) -> cxd {
      Eigen::VectorXcd kap(m);
      for (int i = 0; i < m; ++i) kap(i) = cxd(k[2 * i], k[2 * i + 1]);
      cxd s = -kPi * kPi * (kap.adjoint() * Ghat * kap)(0, 0);
      return std::abs(s) == 0.0 ? 0.0 : 1.0 / s;
    };
    std::vector<double> history;
    bool ok = false;
    for (int it = 0; it < opt.max_iter; ++it) {
      ScalarField r = rhs - laplacian(u, g);
      double res = r.sup_norm() / scale;
      history.push_back(res);
      if (res <= opt.tol) {
        ok = true;
        break;
      }
      if (it > 10 && res > 10.0 * history.front())
        throw ConvergenceError("Poisson fixed point diverged", history);
      u += ScalarField(grid, torus_symbol(G, r.values(), precond));
    }
    if (!ok) throw ConvergenceError("Poisson fixed point did not converge", history);
  }
  if (rhs.is_real()) u.make_real(1e-8);
  return remove_mean(u, g);
}

ScalarField solve_damped_biharmonic(const ScalarField& rhs, double h, double a) {
  const Grid& grid = rhs.grid();
  require_torus_or_cp1(grid);
  if (!(h >= 0)) throw InvalidInput("damping step must be non-negative");
  const GridImpl& G = grid.impl();
  int m = grid.dim();
  ScalarField u = grid.kind() == ManifoldKind::CP1
                      ? ScalarField(grid, sphere::DampedBiharmonic(grid, h, 2.0 * kPi * a).solve(rhs.values()))
                      : ScalarField(grid, torus_symbol(G, rhs.values(), [&](const double* k) -> cxd {
                          double s = 0;
                          for (int a = 0; a < 2 * m; ++a) s += k[a] * k[a];
                          s *= kPi * kPi * a;
                          return 1.0 / (1.0 + h * s * s);
                        }));
  if (rhs.is_real()) u.make_real(1e-8);
  return u;
}

ScalarField spherical_harmonic(const Grid& g, int l, int mm) {
  if (g.kind() != ManifoldKind::CP1) throw InvalidInput("spherical harmonics need a cp1 grid");
  if (l < 0 || std::abs(mm) > l) throw InvalidInput("invalid spherical harmonic indices");
  const GridImpl& G = g.impl();
  std::vector<cxd> v(g.size());
  int am = std::abs(mm);
  for (int j = 0; j < G.npol; ++j) {
    double p = std::sph_legendre(l, am, G.vartheta[j]);
    for (int k = 0; k < G.naz; ++k) {
      double a = G.theta[k];
      double val = mm == 0 ? p : (mm > 0 ? std::sqrt(2.0) * p * std::cos(am * a) : std::sqrt(2.0) * p * std::sin(am * a));
      v[std::size_t(j) * G.naz + k] = val;
    }
  }
  return ScalarField(g, std::move(v), true);
}

ScalarField random_potential(const Grid& g, std::uint64_t seed, double amplitude, int max_mode) {
  require_torus_or_cp1(g);
  if (max_mode < 1) throw InvalidInput("random potential needs max_mode >= 1");
  CounterRng rng(seed, 0x9d7a);
  if (g.kind() == ManifoldKind::CP1) {
    ScalarField phi(g, true);
    double bound = 0;
    for (int l = 1; l <= max_mode; ++l)
      for (int mm = -l; mm <= l; ++mm) {
        double c = rng.uniform(-1.0, 1.0);
        ScalarField y = spherical_harmonic(g, l, mm);
        bound += std::abs(c) * 2.0 * kPi * l * (l + 1) * y.sup_norm();
        phi += y * c;
      }
    phi *= amplitude / bound;
    return phi;
  }
  int m = g.dim();
  int dims = 2 * m;
  int side = 2 * max_mode + 1;
  int total = 1;
  for (int a = 0; a < dims; ++a) total *= side;
  struct Mode {
    std::vector<int> k;
    double a, b;
  };
  std::vector<Mode> modes;
  double bound = 0;
  for (int idx = 0; idx < total; ++idx) {
    std::vector<int> k(dims);
    int r = idx;
    for (int a = dims - 1; a >= 0; --a) {
      k[a] = r % side - max_mode;
      r /= side;
    }
    // keep one representative of each +-k pair
    int first = 0;
    while (first < dims && k[first] == 0) ++first;
    if (first == dims || k[first] < 0) continue;
    double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
    double k2 = 0;
    for (int v : k) k2 += double(v) * v;
    bound += (std::abs(a) + std::abs(b)) * kPi * kPi * k2;
    modes.push_back({k, a, b});
  }
  double s = amplitude / bound;
  ScalarField phi(g, true);
  const auto& C = g.impl().coords;
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) {
      double x[4];
      for (int i = 0; i < m; ++i) {
        x[2 * i] = C[n * m + i].real();
        x[2 * i + 1] = C[n * m + i].imag();
      }
      double v = 0;
      for (const auto& md : modes) {
        double ph = 0;
        for (int a = 0; a < dims; ++a) ph += md.k[a] * x[a];
        ph *= 2.0 * kPi;
        v += md.a * std::cos(ph) + md.b * std::sin(ph);
      }
      phi[n] = v * s;
    }
  });
  return phi;
}

std::vector<ScalarField> cp1_coordinate_functions(const Grid& g) {
  if (g.kind() != ManifoldKind::CP1) throw InvalidInput("sphere coordinates need a cp1 grid");
  std::vector<ScalarField> out;
  for (int a = 0; a < 3; ++a)
    out.push_back(ScalarField::sample(g, [a](std::span<const cxd> z) {
      double r = std::norm(z[0]);
      if (a == 0) return cxd(2 * z[0].real() / (1 + r));
      if (a == 1) return cxd(2 * z[0].imag() / (1 + r));
      return cxd((r - 1) / (r + 1));
    }, true));
  return out;
}

}  // namespace kahler
