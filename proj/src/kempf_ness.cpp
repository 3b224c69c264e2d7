#include "kahler/kempf_ness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "kahler/rng.hpp"

namespace kahler {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

// exp(H) for Hermitian H
MatrixXcd exp_hermitian(const MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
  VectorXcd e = es.eigenvalues().array().exp().cast<cxd>();
  return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint();
}

double log_norm2(const VectorXcd& x) { return std::log(x.squaredNorm()); }

// Columns (1 - u u^*) rho_a u for u = x / |x|.
MatrixXcd transverse_action(const LinearAction& act, const VectorXcd& x) {
  VectorXcd u = x / x.norm();
  MatrixXcd A(act.ambient(), act.dim());
  for (int a = 0; a < act.dim(); ++a) {
    VectorXcd v = act.rho(a) * u;
    A.col(a) = v - u * u.dot(v);
  }
  return A;
}

struct NullSpace {
  MatrixXcd basis;
  VectorXd singular;
};

// Null space of a k-column matrix with a rank gap check.
template <class M>
NullSpace null_space(const M& A, const char* what) {
  Eigen::JacobiSVD<M> svd(A, Eigen::ComputeFullV);
  VectorXd s = svd.singularValues();
  double top = s.size() ? s.maxCoeff() : 0.0;
  double zero = 1e-10 * std::max(1.0, top), sure = 1e-6 * std::max(1.0, top);
  int k = int(A.cols()), rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] > sure) {
      ++rank;
    } else if (s[i] > zero) {
      std::ostringstream os;
      os << what << ": ill-conditioned null space, singular values";
      for (int j = 0; j < s.size(); ++j) os << ' ' << s[j];
      throw NumericalError(os.str());
    }
  }
  NullSpace ns;
  ns.singular = s;
  ns.basis = svd.matrixV().rightCols(k - rank).template cast<cxd>();
  return ns;
}

void require_nonzero(const VectorXcd& x, const LinearAction& act) {
  if (x.size() != act.ambient()) throw InvalidInput("point has the wrong dimension");
  if (x.norm() == 0) throw InvalidInput("point must be nonzero");
}

}  // namespace

LinearAction LinearAction::torus(const Eigen::MatrixXi& weights) {
  if (weights.rows() == 0 || weights.cols() == 0) throw InvalidInput("empty weight matrix");
  LinearAction a;
  a.kind_ = GroupKind::Torus;
  a.n_ = int(weights.cols());
  a.weights_ = weights;
  for (int r = 0; r < weights.rows(); ++r) {
    MatrixXcd m = MatrixXcd::Zero(a.n_, a.n_);
    for (int j = 0; j < a.n_; ++j) m(j, j) = cxd(0, -weights(r, j));
    a.rho_.push_back(m);
  }
  a.eps_.assign(std::size_t(a.dim()) * a.dim() * a.dim(), 0.0);
  return a;
}

LinearAction LinearAction::su2(const std::vector<int>& twice_spins) {
  if (twice_spins.empty()) throw InvalidInput("no spin blocks");
  int n = 0;
  bool nontrivial = false;
  for (int s : twice_spins) {
    if (s < 0) throw InvalidInput("negative spin");
    n += s + 1;
    nontrivial = nontrivial || s > 0;
  }
  if (!nontrivial) throw InvalidInput("trivial representation is not faithful");
  LinearAction a;
  a.kind_ = GroupKind::SU2;
  a.n_ = n;
  a.spins_ = twice_spins;
  MatrixXcd J[3] = {MatrixXcd::Zero(n, n), MatrixXcd::Zero(n, n), MatrixXcd::Zero(n, n)};
  int off = 0;
  for (int s : twice_spins) {
    double j = 0.5 * s;
    // basis |j, m> with m = j, j-1, ..., -j
    for (int r = 0; r <= s; ++r) {
      double m = j - r;
      J[2](off + r, off + r) = m;
      if (r > 0) {  // J+ |m> = c |m+1>
        double c = std::sqrt(j * (j + 1) - m * (m + 1));
        J[0](off + r - 1, off + r) += 0.5 * c;
        J[0](off + r, off + r - 1) += 0.5 * c;
        J[1](off + r - 1, off + r) += cxd(0, -0.5 * c);
        J[1](off + r, off + r - 1) += cxd(0, 0.5 * c);
      }
    }
    off += s + 1;
  }
  for (auto& m : J) a.rho_.push_back(cxd(0, -1) * m);
  a.eps_.assign(27, 0.0);
  auto at = [&](int x, int y, int z) -> double& { return a.eps_[(x * 3 + y) * 3 + z]; };
  at(0, 1, 2) = at(1, 2, 0) = at(2, 0, 1) = 1;
  at(1, 0, 2) = at(2, 1, 0) = at(0, 2, 1) = -1;
  return a;
}

MatrixXcd LinearAction::rho_c(const VectorXcd& zeta) const {
  MatrixXcd m = MatrixXcd::Zero(n_, n_);
  for (int a = 0; a < dim(); ++a) m += zeta[a] * rho_[a];
  return m;
}

MatrixXcd LinearAction::hermitian(const VectorXd& xi) const { return kI * rho_c(xi.cast<cxd>()); }

VectorXcd LinearAction::bracket(const VectorXcd& x, const VectorXcd& y) const {
  int k = dim();
  VectorXcd r = VectorXcd::Zero(k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c) r[c] += x[a] * y[b] * eps_[(a * k + b) * k + c];
  return r;
}

MatrixXcd LinearAction::adjoint(const MatrixXcd& g) const {
  int k = dim(), nn = n_ * n_;
  MatrixXcd R(nn, k), rhs(nn, k);
  MatrixXcd ginv = g.inverse();
  for (int a = 0; a < k; ++a) {
    R.col(a) = Eigen::Map<const VectorXcd>(rho_[a].data(), nn);
    MatrixXcd m = g * rho_[a] * ginv;
    rhs.col(a) = Eigen::Map<const VectorXcd>(m.data(), nn);
  }
  return R.colPivHouseholderQr().solve(rhs);
}

MatrixXcd LinearAction::group_element(const VectorXcd& zeta) const {
  MatrixXcd m = rho_c(zeta);
  return m.exp();
}

VectorXd moment_map(const LinearAction& act, const VectorXcd& x) {
  VectorXd mu(act.dim());
  for (int a = 0; a < act.dim(); ++a) mu[a] = kMomentScale * x.dot(kI * act.rho(a) * x).real();
  return mu;
}

VectorXd moment_map_projective(const LinearAction& act, const VectorXcd& x) {
  double n2 = x.squaredNorm();
  if (n2 == 0) return VectorXd::Zero(act.dim());
  return moment_map(act, x) / n2;
}

VectorXd coadjoint(const LinearAction& act, const MatrixXcd& k, const VectorXd& mu) {
  MatrixXcd A = act.adjoint(k.inverse());
  return (A.transpose() * mu.cast<cxd>()).real();
}

double kempf_ness_h(const LinearAction& act, const VectorXcd& x, const VectorXd& xi, double s) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(act.hermitian(xi));
  VectorXcd c = es.eigenvectors().adjoint() * x;
  // log sum |c_i|^2 e^{2 s lambda_i}
  double top = -INFINITY;
  std::vector<double> e(c.size());
  for (int i = 0; i < c.size(); ++i) {
    e[i] = std::norm(c[i]) > 0 ? std::log(std::norm(c[i])) + 2 * s * es.eigenvalues()[i] : -INFINITY;
    top = std::max(top, e[i]);
  }
  double sum = 0;
  for (double v : e) sum += std::exp(v - top);
  return top + std::log(sum);
}

double gradient_identity_gap(const LinearAction& act, const VectorXcd& x, const VectorXd& xi) {
  require_nonzero(x, act);
  auto D = [&](double d) { return (kempf_ness_h(act, x, xi, d) - kempf_ness_h(act, x, xi, -d)) / (2 * d); };
  double d = 1e-3;
  double fd = (4 * D(d / 2) - D(d)) / 3;
  double exact = kGradientConstant * moment_map(act, x).dot(xi) / x.squaredNorm();
  return std::abs(fd - exact);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Polystable: return "polystable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Budget: return "budget";
  }
  return "?";
}

DescentResult kempf_ness_descend(const LinearAction& act, const VectorXcd& x0, const DescentOptions& opt) {
  require_nonzero(x0, act);
  DescentResult res;
  OrbitState& st = res.state;
  st.x = x0;
  st.gamma = MatrixXcd::Identity(act.ambient(), act.ambient());
  double h = log_norm2(x0), h0 = h;
  st.h.push_back(h);
  double alpha = 1.0;
  for (int it = 0; it < opt.budget; ++it) {
    VectorXd g = kGradientConstant * moment_map_projective(act, st.x);
    st.grad_norm = g.norm();
    if (st.grad_norm < opt.grad_tol) {
      res.verdict = Verdict::Polystable;
      return res;
    }
    VectorXd xi = -alpha * g;
    MatrixXcd E = exp_hermitian(act.hermitian(xi));
    VectorXcd y = E * st.x;
    double hn = log_norm2(y);
    if (hn <= h - opt.armijo * alpha * st.grad_norm * st.grad_norm) {
      if (hn > h) res.monotone = false;
      st.x = y;
      st.gamma = E * st.gamma;
      st.steps.push_back(xi);
      st.h.push_back(hn);
      h = hn;
      alpha = std::min(2 * alpha, 1e8);
      if (h < h0 - opt.h_drop) {
        res.verdict = Verdict::Unstable;
        res.escape = xi / xi.norm();
        return res;
      }
    } else {
      alpha *= 0.5;
    }
  }
  st.grad_norm = (kGradientConstant * moment_map_projective(act, st.x)).norm();
  if (st.grad_norm < opt.grad_tol) res.verdict = Verdict::Polystable;
  return res;
}

ConvexityProfile convexity_probe(const LinearAction& act, const VectorXcd& x, const VectorXd& xi, int samples,
                                 double span) {
  require_nonzero(x, act);
  if (std::abs(xi.norm() - 1) > 1e-12) throw InvalidInput("probe direction must have unit norm");
  if (samples < 3) throw InvalidInput("convexity probe needs at least 3 samples");
  ConvexityProfile p;
  for (int i = 0; i < samples; ++i) {
    double s = -span + 2 * span * i / (samples - 1);
    p.s.push_back(s);
    p.h.push_back(kempf_ness_h(act, x, xi, s));
  }
  p.min_second_diff = INFINITY;
  for (int i = 1; i + 1 < samples; ++i) {
    double d = p.h[i + 1] - 2 * p.h[i] + p.h[i - 1];
    p.second_diff.push_back(d);
    p.min_second_diff = std::min(p.min_second_diff, d);
  }
  return p;
}

cxd character_value(const LinearAction& act, const VectorXcd& x, const VectorXcd& zeta) {
  return moment_map_projective(act, x).cast<cxd>().dot(zeta);
}

StabilizerCharacter stabilizer_character(const LinearAction& act, const VectorXcd& x) {
  require_nonzero(x, act);
  NullSpace ns = null_space(transverse_action(act, x), "stabilizer");
  StabilizerCharacter sc;
  sc.basis = ns.basis;
  sc.singular = ns.singular;
  int d = int(sc.basis.cols());
  sc.f.resize(d);
  for (int i = 0; i < d; ++i) sc.f[i] = character_value(act, x, sc.basis.col(i));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      VectorXcd c = act.bracket(sc.basis.col(i), sc.basis.col(j));
      sc.character_gap = std::max(sc.character_gap, std::abs(character_value(act, x, c)));
      VectorXcd out = c - sc.basis * (sc.basis.adjoint() * c);
      sc.closure_gap = std::max(sc.closure_gap, out.norm());
    }
  return sc;
}

double character_equivariance_gap(const LinearAction& act, const VectorXcd& x, const std::vector<MatrixXcd>& gs) {
  require_nonzero(x, act);
  double gap = 0;
  for (const auto& g : gs) {
    VectorXcd y = g * x;
    MatrixXcd Y = stabilizer_character(act, y).basis;
    MatrixXcd back = act.adjoint(g.inverse()) * Y;
    for (int i = 0; i < Y.cols(); ++i)
      gap = std::max(gap, std::abs(character_value(act, y, Y.col(i)) - character_value(act, x, back.col(i))));
  }
  return gap;
}

ExtremalDecomposition extremal_decomposition(const LinearAction& act, const VectorXcd& x, double crit_tol) {
  require_nonzero(x, act);
  ExtremalDecomposition ed;
  int k = act.dim();
  double n2 = x.squaredNorm();
  VectorXd mu = moment_map_projective(act, x);

  // d/ds |mu_P(exp(s H_b) x)|^2 at s = 0
  for (int b = 0; b < k; ++b) {
    MatrixXcd Hb = kI * act.rho(b);
    double dn = 2 * x.dot(Hb * x).real() / n2;
    double d = 0;
    for (int a = 0; a < k; ++a) {
      MatrixXcd Ha = kI * act.rho(a);
      double dmu = 0.5 * x.dot((Hb * Ha + Ha * Hb) * x).real() / n2 - mu[a] * dn;
      d += 2 * mu[a] * dmu;
    }
    ed.criticality = std::max(ed.criticality, std::abs(d));
  }
  if (ed.criticality > crit_tol) {
    std::ostringstream os;
    os << "point is not critical for |mu|^2 along its orbit: derivative " << ed.criticality << " exceeds "
       << crit_tol;
    throw InvalidInput(os.str());
  }

  MatrixXcd B = stabilizer_character(act, x).basis;
  int d = int(B.cols());
  VectorXcd Z = kI * mu.cast<cxd>();
  MatrixXcd adB(k, d);
  for (int j = 0; j < d; ++j) adB.col(j) = act.bracket(Z, B.col(j));
  MatrixXcd M = B.adjoint() * adB;
  if ((adB - B * M).norm() > 1e-8 * std::max(1.0, mu.norm()))
    throw NumericalError("stabilizer is not invariant under ad(i mu)");

  ed.eigenvalues.resize(d);
  MatrixXcd zero_space(k, 0);
  if (d > 0) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(M);
    for (int i = 0; i < d; ++i) {
      ed.eigenvalues[i] = es.eigenvalues()[i].real();
      ed.eigen_imag = std::max(ed.eigen_imag, std::abs(es.eigenvalues()[i].imag()));
    }
    std::sort(ed.eigenvalues.data(), ed.eigenvalues.data() + d);
    zero_space = B * null_space(M, "zero eigenspace").basis;
  }
  ed.zero_dim = int(zero_space.cols());
  for (int j = 0; j < ed.zero_dim; ++j) ed.center_gap = std::max(ed.center_gap, act.bracket(Z, zero_space.col(j)).norm());

  // real stabilizer k_x: real null space of xi -> (1 - P_x) rho(xi) x
  MatrixXcd A = transverse_action(act, x);
  MatrixXd Ar(2 * A.rows(), k);
  Ar << A.real(), A.imag();
  MatrixXcd real_stab = null_space(Ar, "real stabilizer").basis;
  ed.real_stabilizer_dim = int(real_stab.cols());
  bool inside = true;
  for (int j = 0; j < real_stab.cols(); ++j) {
    VectorXcd v = real_stab.col(j);
    if (ed.zero_dim == 0 || (v - zero_space * (zero_space.adjoint() * v)).norm() > 1e-8) inside = false;
  }
  ed.zero_space_is_complexified = inside && ed.real_stabilizer_dim == ed.zero_dim;
  ed.mu_zero = mu.norm() <= 1e-10;
  ed.equivalence_holds = (ed.real_stabilizer_dim == d) == ed.mu_zero;
  ed.is_extremal = d == 0 || ed.eigenvalues.minCoeff() >= -1e-10;
  return ed;
}

double align_in_K(const LinearAction& act, const VectorXcd& y1, const VectorXcd& y2, std::uint64_t seed) {
  int k = act.dim(), n = act.ambient();
  double best = (y1 - y2).norm();
  for (int restart = 0; restart < 17; ++restart) {
    MatrixXcd g = restart == 0 ? MatrixXcd::Identity(n, n) : random_compact_group(act, seed * 1000 + restart);
    VectorXcd r = g * y1 - y2;
    double f = r.norm();
    for (int it = 0; it < 100 && f > 1e-15; ++it) {
      // left-trivialized Jacobian: d/dtheta_a exp(rho(theta)) g y1 = rho_a g y1
      VectorXcd gy = g * y1;
      MatrixXd J(2 * n, k);
      for (int a = 0; a < k; ++a) {
        VectorXcd c = act.rho(a) * gy;
        J.col(a) << c.real(), c.imag();
      }
      VectorXd rr(2 * n);
      rr << r.real(), r.imag();
      VectorXd step = -J.completeOrthogonalDecomposition().solve(rr);
      bool moved = false;
      for (double tau = 1; tau > 1e-6; tau *= 0.5) {
        MatrixXcd gn = (act.rho_c((tau * step).cast<cxd>())).exp() * g;
        VectorXcd rn = gn * y1 - y2;
        if (rn.norm() < f) {
          g = gn;
          r = rn;
          f = rn.norm();
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    best = std::min(best, f);
  }
  return best;
}

VectorXcd random_point(int n, std::uint64_t seed) {
  CounterRng rng(seed, 0x6b6e);
  VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = cxd(rng.normal(), rng.normal());
  return x / x.norm();
}

MatrixXcd random_complex_group(const LinearAction& act, std::uint64_t seed, double scale) {
  CounterRng rng(seed, 0x6763);
  VectorXcd z(act.dim());
  for (int a = 0; a < act.dim(); ++a) z[a] = scale * cxd(rng.normal(), rng.normal());
  return act.group_element(z);
}

MatrixXcd random_compact_group(const LinearAction& act, std::uint64_t seed) {
  CounterRng rng(seed, 0x676b);
  VectorXcd z(act.dim());
  for (int a = 0; a < act.dim(); ++a) z[a] = kPi * rng.normal();
  return act.group_element(z);
}

}  // namespace kahler
