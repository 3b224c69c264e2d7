#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kahler/common.hpp"

namespace kahler {

// Conventions, used by every routine below.
//  - The real Lie algebra k is identified with R^k through a fixed basis xi_1..xi_k
//    and paired with k* by the coordinate dot product.
//  - Torus T^k with integer weights W (k x N): rho(xi_a) = -i diag(W_a).
//  - SU(2): xi_a = -i J_a on each spin block, so [xi_a, xi_b] = eps_abc xi_c and the
//    basis is orthonormal for an invariant form.
//  - H_a = i rho(xi_a) is Hermitian and mu_a(x) = x^* H_a x / 2.
//  - h(s) = log |exp(i s rho(xi)) x|^2 has h'(0) = kGradientConstant <mu(x), xi> / |x|^2.
//  - Stabilizers are those of the point [x] in P(C^N): rho(zeta) x in C x.
inline constexpr double kMomentScale = 0.5;
inline constexpr double kGradientConstant = 4.0;

enum class GroupKind { Torus, SU2 };

class LinearAction {
 public:
  static LinearAction torus(const Eigen::MatrixXi& weights);
  // Direct sum of spin j blocks, given as 2j >= 0; at least one block must be nontrivial.
  static LinearAction su2(const std::vector<int>& twice_spins);

  GroupKind kind() const { return kind_; }
  int dim() const { return int(rho_.size()); }  // real dimension of k
  int ambient() const { return n_; }
  const Eigen::MatrixXcd& rho(int a) const { return rho_[a]; }
  const Eigen::MatrixXi& weights() const { return weights_; }
  const std::vector<int>& twice_spins() const { return spins_; }

  Eigen::MatrixXcd rho_c(const Eigen::VectorXcd& zeta) const;  // complex-linear extension
  Eigen::MatrixXcd hermitian(const Eigen::VectorXd& xi) const;  // i rho(xi)
  Eigen::VectorXcd bracket(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const;
  // coefficients of g rho(zeta) g^{-1} in the basis
  Eigen::MatrixXcd adjoint(const Eigen::MatrixXcd& g) const;
  Eigen::MatrixXcd group_element(const Eigen::VectorXcd& zeta) const;  // exp(rho_c(zeta))

 private:
  GroupKind kind_ = GroupKind::Torus;
  int n_ = 0;
  std::vector<Eigen::MatrixXcd> rho_;
  Eigen::MatrixXi weights_;
  std::vector<int> spins_;
  std::vector<double> eps_;  // structure constants c_ab^c, k^3 entries
};

Eigen::VectorXd moment_map(const LinearAction& act, const Eigen::VectorXcd& x);
// mu(x) / |x|^2, the moment map of the induced action on P(C^N); 0 at x = 0
Eigen::VectorXd moment_map_projective(const LinearAction& act, const Eigen::VectorXcd& x);
// Ad^*(k) mu as a coordinate vector: (Ad^* mu)(xi) = mu(Ad(k^{-1}) xi)
Eigen::VectorXd coadjoint(const LinearAction& act, const Eigen::MatrixXcd& k, const Eigen::VectorXd& mu);

// h(exp(i s rho(xi)) x), evaluated through the eigenbasis of i rho(xi) without overflow
double kempf_ness_h(const LinearAction& act, const Eigen::VectorXcd& x, const Eigen::VectorXd& xi, double s);
// |Richardson central difference of h at s = 0 - kGradientConstant <mu, xi> / |x|^2|
double gradient_identity_gap(const LinearAction& act, const Eigen::VectorXcd& x, const Eigen::VectorXd& xi);

enum class Verdict { Polystable, Unstable, Budget };
std::string to_string(Verdict v);

struct OrbitState {
  Eigen::VectorXcd x;
  Eigen::MatrixXcd gamma;  // x = gamma x0
  std::vector<Eigen::VectorXd> steps;  // accepted steps exp(i rho(xi)), stored as xi
  std::vector<double> h;  // h after each accepted step, h[0] at the start
  double grad_norm = 0;
};

struct DescentOptions {
  int budget = 20000;
  double grad_tol = 1e-10;
  double armijo = 1e-4;
  double h_drop = 50.0;  // unstable once h falls this far below its start
};

struct DescentResult {
  Verdict verdict = Verdict::Budget;
  OrbitState state;
  Eigen::VectorXd escape;  // unit Lie algebra direction of the last step, when unstable
  bool monotone = true;
};

DescentResult kempf_ness_descend(const LinearAction& act, const Eigen::VectorXcd& x0, const DescentOptions& opt = {});

struct ConvexityProfile {
  std::vector<double> s, h, second_diff;
  double min_second_diff = 0;
};
// samples nodes on [-span, span]
ConvexityProfile convexity_probe(const LinearAction& act, const Eigen::VectorXcd& x, const Eigen::VectorXd& xi,
                                 int samples, double span = 2.0);

struct StabilizerCharacter {
  Eigen::MatrixXcd basis;    // columns span (k^c)_x, orthonormal
  Eigen::VectorXcd f;        // f_x on the basis columns
  Eigen::VectorXd singular;  // singular values of zeta -> (1 - P_x) rho_c(zeta) x
  double character_gap = 0;  // max |f_x([A, B])| over basis pairs
  double closure_gap = 0;    // distance of [A, B] from the stabilizer
};

// f_x(zeta) = <mu(x), zeta> / |x|^2 extended complex-linearly; for zeta in the
// stabilizer rho_c(zeta) x = lambda x and f_x(zeta) = i lambda / 2.
cxd character_value(const LinearAction& act, const Eigen::VectorXcd& x, const Eigen::VectorXcd& zeta);
StabilizerCharacter stabilizer_character(const LinearAction& act, const Eigen::VectorXcd& x);
// max over basis Y of (k^c)_{gx} and sampled g of |f_{gx}(Y) - f_x(Ad(g^{-1}) Y)|
double character_equivariance_gap(const LinearAction& act, const Eigen::VectorXcd& x,
                                  const std::vector<Eigen::MatrixXcd>& gs);

struct ExtremalDecomposition {
  bool is_extremal = false;
  double criticality = 0;               // max orbit-directional derivative of |mu|^2 / |x|^4
  Eigen::VectorXd eigenvalues;          // of ad(i mu(x)) on (k^c)_x, ascending
  double eigen_imag = 0;
  double center_gap = 0;                // |[i mu, Y]| over the zero eigenspace
  int zero_dim = 0;
  int real_stabilizer_dim = 0;          // dim_R k_x, the complex dimension of (k_x)^c
  bool zero_space_is_complexified = false;
  bool mu_zero = false;
  bool equivalence_holds = false;       // (k_x)^c = (k^c)_x iff mu = 0
};
ExtremalDecomposition extremal_decomposition(const LinearAction& act, const Eigen::VectorXcd& x,
                                             double crit_tol = 1e-8);

// Smallest |k y1 - y2| over k in K, by Gauss-Newton from deterministic restarts.
double align_in_K(const LinearAction& act, const Eigen::VectorXcd& y1, const Eigen::VectorXcd& y2,
                  std::uint64_t seed = 1);

// Unit-norm random complex vector and random group elements from the counter RNG.
Eigen::VectorXcd random_point(int n, std::uint64_t seed);
Eigen::MatrixXcd random_complex_group(const LinearAction& act, std::uint64_t seed, double scale = 0.5);
Eigen::MatrixXcd random_compact_group(const LinearAction& act, std::uint64_t seed);

}  // namespace kahler
