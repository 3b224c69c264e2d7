#pragma once

#include <string>
#include <vector>

#include "kahler/exterior.hpp"
#include "kahler/fields.hpp"

namespace kahler {

// Chern connection A^i_j = g^{i pbar} d g_{j pbar} and curvature Theta = dbar A.
struct CurvatureData {
  Grid grid;
  int m = 1;
  // (A_k)_{ij} at index (i*m+j)*m+k
  std::vector<ScalarField> connection;
  // coefficient of dz^k ^ dzbar^l in Theta_{ij}, index ((i*m+j)*m+k)*m+l
  std::vector<ScalarField> theta;
  // Ric_{k lbar} = tr Theta coefficient, index k*m+l
  std::vector<ScalarField> ricci;
  // chern[k-1][node] = c_k, k = 1..m
  std::vector<std::vector<PQForm>> chern;

  MatrixPQForm theta_at(std::size_t node) const;
  PQForm ricci_form_at(std::size_t node) const;  // i Ric_{kl} dz^k ^ dzbar^l
  const PQForm& chern_at(int k, std::size_t node) const { return chern.at(k - 1).at(node); }
};

CurvatureData curvature(const MetricField& g);

// int c_k ^ omega^{m-k}, k = 1..m
std::vector<double> chern_numbers(const MetricField& g, const CurvatureData& curv);

double sigma(const MetricField& g, double t);
double sigma(const MetricField& g, const CurvatureData& curv, double t);

struct AdmissibilityReport {
  bool ok = true;
  double margin = 0;
  std::size_t worst_node = 0;
};

AdmissibilityReport admissible_t(const MetricField& g, const CurvatureData& curv, double t);
AdmissibilityReport admissible_t(const MetricField& g, double t);
// Pairing density matrix at one node (m^2 x m^2, rows (a,c), columns (b,d)).
Eigen::MatrixXcd admissibility_matrix(const MetricField& g, const CurvatureData& curv, double t, std::size_t node);

struct PerturbedScalar {
  double t = 0;
  ScalarField S;
  double sigma = 0;
  double calabi_energy = 0;  // int S^2 omega^m
  double mean_S = 0;         // omega^m average of S
  double margin = 0;
  std::string warning;
};

// Chern-sum route, the primary evaluation.
PerturbedScalar perturbed_scalar(const MetricField& g, double t);
PerturbedScalar perturbed_scalar(const MetricField& g, const CurvatureData& curv, double t,
                                 bool check_admissible = true);
ScalarField scalar_chern_route(const MetricField& g, const CurvatureData& curv, double t);
// Determinant route (det(omega I + t (i/2pi) Theta) - omega^m) / t; at t = 0 its
// derivative through the polarization.
ScalarField scalar_determinant_route(const MetricField& g, const CurvatureData& curv, double t);

}  // namespace kahler
