#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kahler/grid.hpp"

namespace kahler {

// Complex function on a grid. Fields flagged real keep |imag| <= 1e-10 ||f||.
class ScalarField {
 public:
  explicit ScalarField(Grid g, bool real = false);
  ScalarField(Grid g, std::vector<cxd> values, bool real = false);
  static ScalarField constant(const Grid& g, cxd c);
  // f(z) evaluated on the chart coordinates of every node.
  static ScalarField sample(const Grid& g, const std::function<cxd(std::span<const cxd>)>& f,
                            bool real = false);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  cxd operator[](std::size_t i) const { return v_[i]; }
  cxd& operator[](std::size_t i) { return v_[i]; }
  const std::vector<cxd>& values() const { return v_; }
  std::vector<cxd>& values() { return v_; }

  bool is_real() const { return real_; }
  // Drops imaginary parts after checking they are below tol * sup norm.
  ScalarField& make_real(double tol = 1e-10);
  double imag_defect() const;
  std::vector<double> real_values() const;

  double sup_norm() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator*=(cxd s);
  ScalarField& operator+=(cxd s);
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
  friend ScalarField operator*(ScalarField a, cxd s) { return a *= s; }
  friend ScalarField operator*(cxd s, ScalarField a) { return a *= s; }
  ScalarField conj() const;

 private:
  void require_same(const ScalarField& o) const;
  Grid grid_;
  std::vector<cxd> v_;
  bool real_;
};

// Hermitian positive matrix field g_{ij} (entry (i,j) is g_{i jbar}).
// On cp1 the field also records rho = g / g_FS, which the sphere operators use.
class MetricField {
 public:
  MetricField(Grid g, std::vector<cxd> entries);
  static MetricField flat(const Grid& g);
  static MetricField fubini_study(const Grid& g);
  static MetricField cp1_conformal(const Grid& g, std::vector<double> rho);

  const Grid& grid() const { return grid_; }
  int dim() const { return m_; }
  std::size_t size() const { return grid_.size(); }

  Eigen::MatrixXcd at(std::size_t node) const;
  cxd g(std::size_t node, int i, int j) const { return e_[(node * m_ + i) * m_ + j]; }
  // (G^{-1})_{ij}; the inverse metric is g^{i jbar} = (G^{-1})_{ji}.
  cxd ginv(std::size_t node, int i, int j) const { return inv_[(node * m_ + i) * m_ + j]; }
  double det(std::size_t node) const { return det_[node]; }

  // omega^m = vol(node) dx^1 dy^1 ... (chart Lebesgue density)
  double volume_density(std::size_t node) const;
  double volume() const;

  bool analytic_fs() const { return fs_; }
  const std::vector<double>& rho() const;
  const std::vector<cxd>& entries() const { return e_; }

 private:
  MetricField(Grid g, std::vector<cxd> entries, std::vector<double> rho, bool fs);
  void finalize();
  Grid grid_;
  int m_;
  std::vector<cxd> e_, inv_;
  std::vector<double> det_;
  std::vector<double> rho_;
  bool fs_ = false;
};

// Analytic Fubini-Study data with omega in c_1(O(1)).
Eigen::MatrixXcd fubini_study_metric(std::span<const cxd> z);
// dG/dz^k at z
Eigen::MatrixXcd fubini_study_dmetric(std::span<const cxd> z, int k);
// Theta_{ij} coefficient of dz^k ^ dzbar^l, flattened ((i*m+j)*m+k)*m+l.
std::vector<cxd> fubini_study_curvature(std::span<const cxd> z);

}  // namespace kahler
