#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kahler/fields.hpp"

namespace kahler {

// L_g = D*D with D u = dbar(grad'u); its kernel is the space of holomorphy
// potentials. Equals Delta^2 + R^{jbar i} u_{i jbar} + g^{i jbar} S_i u_jbar.
ScalarField apply_L(const ScalarField& u, const MetricField& g);

// L2(omega^m) inner product int f conj(h) omega^m.
cxd l2_inner(const ScalarField& f, const ScalarField& h, const MetricField& g);

// Orthonormal 1, u_1, ..., u_d with int u_i omega^m = 0.
struct PotentialBasis {
  std::vector<ScalarField> functions;  // functions[0] is the normalized constant
  std::vector<double> eigenvalues;     // Ritz values of u_1..u_d
  std::vector<double> residuals;       // ||L u_i|| in L2(omega^m)
  double gram_residual = 0;
  int dim() const { return int(functions.size()) - 1; }
};

struct KernelOptions {
  double tol = -1;     // < 0: 1e-4 times the first non-kernel eigenvalue of the reference model
  int max_mode = -1;   // Ritz space: torus Fourier |k|_inf <= max_mode, cp1 degrees l <= max_mode
};

struct KernelReport {
  PotentialBasis basis;
  std::vector<double> spectrum;  // lowest Ritz values on the mean-zero space
  double tol = 0;
};

// Rayleigh-Ritz on the mean-zero trial space; keeps Ritz pairs below tol.
KernelReport kernel_basis(const MetricField& g, const KernelOptions& opt = {});
double default_kernel_tolerance(const Grid& g);

// u~ = u + grad'u (phi), the potential of the same vector field for g + i d dbar phi.
ScalarField transported_potential(const ScalarField& u, const ScalarField& phi, const MetricField& g);

// Orthonormalizes against omega_g^m, prepending the normalized constant.
PotentialBasis orthonormalize(const std::vector<ScalarField>& fs, const MetricField& g);

// Pi_g f = sum (f, u_i) u_i over the whole basis (constant included).
ScalarField project_Pi(const ScalarField& f, const PotentialBasis& basis, const MetricField& g);

// Principal angles (radians, ascending) between the spans of u_1..u_d of two bases.
std::vector<double> principal_angles(const PotentialBasis& a, const PotentialBasis& b, const MetricField& g);

}  // namespace kahler
