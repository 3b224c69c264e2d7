#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kahler/common.hpp"

namespace kahler {

// Pointwise (p,q)-form in complex dimension m <= 3, stored on sorted
// multi-indices in the basis dz^I ^ dzbar^J. Indices are 0-based.
class PQForm {
 public:
  static constexpr int kMaxDim = 3;

  PQForm() : PQForm(1, 0, 0) {}
  PQForm(int m, int p, int q);

  static PQForm scalar(int m, cxd c);
  // c * dz^I ^ dzbar^J with arbitrary (possibly unsorted) index lists.
  static PQForm basis(int m, std::span<const int> I, std::span<const int> J, cxd c = 1.0);
  static PQForm basis(int m, std::initializer_list<int> I, std::initializer_list<int> J,
                      cxd c = 1.0);
  // omega = i g_{ij} dz^i ^ dzbar^j
  static PQForm kahler_form(const Eigen::MatrixXcd& g);
  // sum_{kl} a_{kl} dz^k ^ dzbar^l
  static PQForm from_11(const Eigen::MatrixXcd& a);

  int dim() const { return m_; }
  int p() const { return p_; }
  int q() const { return q_; }
  bool in_range() const { return p_ <= m_ && q_ <= m_; }

  cxd get(std::span<const int> I, std::span<const int> J) const;
  cxd get(std::initializer_list<int> I, std::initializer_list<int> J) const;
  void add(std::span<const int> I, std::span<const int> J, cxd c);

  cxd at_mask(unsigned I, unsigned J) const;
  void set_mask(unsigned I, unsigned J, cxd c);
  void add_mask(unsigned I, unsigned J, cxd c);

  // Coefficient of dz^0..dz^{m-1} ^ dzbar^0..dzbar^{m-1}; requires degree (m,m).
  cxd top() const;
  // The (1,1) coefficient matrix a_{kl} of dz^k ^ dzbar^l.
  Eigen::MatrixXcd matrix_11() const;

  double max_abs() const;
  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  PQForm& operator+=(const PQForm& o);
  PQForm& operator-=(const PQForm& o);
  PQForm& operator*=(cxd s);
  friend PQForm operator+(PQForm a, const PQForm& b) { return a += b; }
  friend PQForm operator-(PQForm a, const PQForm& b) { return a -= b; }
  friend PQForm operator*(PQForm a, cxd s) { return a *= s; }
  friend PQForm operator*(cxd s, PQForm a) { return a *= s; }

  // Raw coefficient storage, ordered by (rank of I, rank of J).
  std::size_t size() const;
  const cxd* data() const { return c_.data(); }
  cxd* data() { return c_.data(); }
  // Masks of all sorted multi-indices of length k in dimension m.
  static std::span<const unsigned> masks(int m, int k);

 private:
  std::size_t index(unsigned I, unsigned J) const;
  void require_compatible(const PQForm& o) const;

  int m_, p_, q_;
  std::array<cxd, 9> c_{};
};

PQForm wedge(const PQForm& a, const PQForm& b);
// a^k with a^0 the unit function
PQForm wedge_power(const PQForm& a, int k);

// Endomorphism-valued (p,q)-form: n x n entries (row = upper index).
class MatrixPQForm {
 public:
  MatrixPQForm(int m, int p, int q) : MatrixPQForm(m, m, p, q) {}
  MatrixPQForm(int n, int m, int p, int q);
  static MatrixPQForm identity(const PQForm& w, int n);

  int size() const { return n_; }
  int dim() const { return m_; }
  int p() const { return p_; }
  int q() const { return q_; }

  const PQForm& operator()(int i, int j) const { return e_[i * n_ + j]; }
  void set(int i, int j, const PQForm& f);

  MatrixPQForm& operator+=(const MatrixPQForm& o);
  MatrixPQForm& operator*=(cxd s);
  friend MatrixPQForm operator+(MatrixPQForm a, const MatrixPQForm& b) { return a += b; }
  friend MatrixPQForm operator*(cxd s, MatrixPQForm a) { return a *= s; }

  MatrixPQForm principal(std::span<const int> rows) const;

 private:
  int n_, m_, p_, q_;
  std::vector<PQForm> e_;
};

// Permutation-expansion determinant of a matrix of (1,1)-forms.
PQForm form_det(const MatrixPQForm& M);

// Polarization of the determinant: symmetric multilinear, c_m(A,...,A) = det A.
PQForm mixed_cm(std::span<const MatrixPQForm> args);
cxd mixed_cm(std::span<const Eigen::MatrixXcd> args);

// Coefficients of det(I + tA) = sum_k t^k c_k.
std::vector<PQForm> char_coefficients(const MatrixPQForm& A);
std::vector<cxd> char_coefficients(const Eigen::MatrixXcd& A);

// Canonical top basis element dz^{1..m} ^ dzbar^{1..m} in units of the real
// volume element dx^1 dy^1 ... dx^m dy^m.
cxd top_basis_volume(int m);

}  // namespace kahler
