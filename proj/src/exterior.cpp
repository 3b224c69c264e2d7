#include "kahler/exterior.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>

namespace kahler {

namespace {

struct Tables {
  // masks[m][k], rank[m][mask]
  std::vector<unsigned> masks[4][4];
  int rank[4][8];
  Tables() {
    for (int m = 0; m <= 3; ++m) {
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        int k = std::popcount(mask);
        rank[m][mask] = static_cast<int>(masks[m][k].size());
        masks[m][k].push_back(mask);
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Number of pairs (a in A, b in B) with a > b: sign of merging sorted A then B.
int merge_sign(unsigned A, unsigned B) {
  int inv = 0;
  for (unsigned b = B; b; b &= b - 1) {
    int j = std::countr_zero(b);
    inv += std::popcount(A >> (j + 1));
  }
  return (inv & 1) ? -1 : 1;
}

// Sorts an index list, returning mask and permutation sign (0 on repetition).
int canonicalize(std::span<const int> idx, int m, unsigned& mask) {
  std::vector<int> v(idx.begin(), idx.end());
  int sign = 1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0 || v[i] >= m) throw InvalidInput("form index out of range");
    for (std::size_t j = 0; j + 1 < v.size() - i; ++j) {
      if (v[j] > v[j + 1]) {
        std::swap(v[j], v[j + 1]);
        sign = -sign;
      }
    }
  }
  mask = 0;
  for (int i : v) {
    if (mask & (1u << i)) return 0;
    mask |= 1u << i;
  }
  return sign;
}

}  // namespace

PQForm::PQForm(int m, int p, int q) : m_(m), p_(p), q_(q) {
  if (m < 1 || m > kMaxDim) throw InvalidInput("complex dimension must be in 1..3");
  if (p < 0 || q < 0) throw InvalidInput("negative form degree");
}

std::span<const unsigned> PQForm::masks(int m, int k) {
  if (k < 0 || k > m) return {};
  return tables().masks[m][k];
}

std::size_t PQForm::size() const {
  return static_cast<std::size_t>(binom(m_, p_) * binom(m_, q_));
}

std::size_t PQForm::index(unsigned I, unsigned J) const {
  const auto& t = tables();
  return static_cast<std::size_t>(t.rank[m_][I] * binom(m_, q_) + t.rank[m_][J]);
}

PQForm PQForm::scalar(int m, cxd c) {
  PQForm f(m, 0, 0);
  f.c_[0] = c;
  return f;
}

PQForm PQForm::basis(int m, std::span<const int> I, std::span<const int> J, cxd c) {
  PQForm f(m, static_cast<int>(I.size()), static_cast<int>(J.size()));
  if (f.in_range()) f.add(I, J, c);
  return f;
}

PQForm PQForm::basis(int m, std::initializer_list<int> I, std::initializer_list<int> J, cxd c) {
  return basis(m, std::span<const int>(I.begin(), I.size()), std::span<const int>(J.begin(), J.size()),
               c);
}

PQForm PQForm::from_11(const Eigen::MatrixXcd& a) {
  int m = static_cast<int>(a.rows());
  if (a.cols() != a.rows()) throw InvalidInput("(1,1) coefficient matrix must be square");
  PQForm f(m, 1, 1);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) f.set_mask(1u << k, 1u << l, a(k, l));
  return f;
}

PQForm PQForm::kahler_form(const Eigen::MatrixXcd& g) { return from_11(kI * g); }

Eigen::MatrixXcd PQForm::matrix_11() const {
  if (p_ != 1 || q_ != 1) throw InvalidInput("matrix_11 requires a (1,1)-form");
  Eigen::MatrixXcd a(m_, m_);
  for (int k = 0; k < m_; ++k)
    for (int l = 0; l < m_; ++l) a(k, l) = at_mask(1u << k, 1u << l);
  return a;
}

cxd PQForm::get(std::span<const int> I, std::span<const int> J) const {
  if (static_cast<int>(I.size()) != p_ || static_cast<int>(J.size()) != q_)
    throw InvalidInput("multi-index length does not match form degree");
  if (!in_range()) return 0.0;
  unsigned mi, mj;
  int s = canonicalize(I, m_, mi) * canonicalize(J, m_, mj);
  if (s == 0) return 0.0;
  return static_cast<double>(s) * c_[index(mi, mj)];
}

cxd PQForm::get(std::initializer_list<int> I, std::initializer_list<int> J) const {
  return get(std::span<const int>(I.begin(), I.size()), std::span<const int>(J.begin(), J.size()));
}

void PQForm::add(std::span<const int> I, std::span<const int> J, cxd c) {
  if (static_cast<int>(I.size()) != p_ || static_cast<int>(J.size()) != q_)
    throw InvalidInput("multi-index length does not match form degree");
  if (!in_range()) return;
  unsigned mi, mj;
  int s = canonicalize(I, m_, mi) * canonicalize(J, m_, mj);
  if (s != 0) c_[index(mi, mj)] += static_cast<double>(s) * c;
}

cxd PQForm::at_mask(unsigned I, unsigned J) const {
  if (!in_range()) return 0.0;
  return c_[index(I, J)];
}

void PQForm::set_mask(unsigned I, unsigned J, cxd c) { c_[index(I, J)] = c; }
void PQForm::add_mask(unsigned I, unsigned J, cxd c) { c_[index(I, J)] += c; }

cxd PQForm::top() const {
  if (p_ != m_ || q_ != m_) throw InvalidInput("top() requires a form of degree (m,m)");
  return c_[0];
}

double PQForm::max_abs() const {
  double r = 0;
  for (std::size_t i = 0; i < size(); ++i) r = std::max(r, std::abs(c_[i]));
  return r;
}

void PQForm::require_compatible(const PQForm& o) const {
  if (m_ != o.m_ || p_ != o.p_ || q_ != o.q_) throw InvalidInput("form dimension or degree mismatch");
}

PQForm& PQForm::operator+=(const PQForm& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < size(); ++i) c_[i] += o.c_[i];
  return *this;
}

PQForm& PQForm::operator-=(const PQForm& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

PQForm& PQForm::operator*=(cxd s) {
  for (std::size_t i = 0; i < size(); ++i) c_[i] *= s;
  return *this;
}

PQForm wedge(const PQForm& a, const PQForm& b) {
  if (a.dim() != b.dim()) throw InvalidInput("wedge of forms of different dimension");
  int m = a.dim();
  PQForm r(m, a.p() + b.p(), a.q() + b.q());
  if (!r.in_range() || !a.in_range() || !b.in_range()) return r;
  auto mp_a = PQForm::masks(m, a.p()), mq_a = PQForm::masks(m, a.q());
  auto mp_b = PQForm::masks(m, b.p()), mq_b = PQForm::masks(m, b.q());
  // dz^I dzbar^J dz^K dzbar^L = (-1)^{|J||K|} dz^I dz^K dzbar^J dzbar^L
  int cross = ((a.q() * b.p()) & 1) ? -1 : 1;
  for (unsigned I : mp_a)
    for (unsigned J : mq_a) {
      cxd ca = a.at_mask(I, J);
      if (ca == 0.0) continue;
      for (unsigned K : mp_b) {
        if (I & K) continue;
        int sIK = merge_sign(I, K);
        for (unsigned L : mq_b) {
          if (J & L) continue;
          cxd cb = b.at_mask(K, L);
          if (cb == 0.0) continue;
          r.add_mask(I | K, J | L, static_cast<double>(cross * sIK * merge_sign(J, L)) * ca * cb);
        }
      }
    }
  return r;
}

PQForm wedge_power(const PQForm& a, int k) {
  PQForm r = PQForm::scalar(a.dim(), 1.0);
  for (int i = 0; i < k; ++i) r = wedge(r, a);
  return r;
}

cxd top_basis_volume(int m) {
  cxd v = std::pow(cxd(0.0, -2.0), m);
  return ((m * (m - 1) / 2) % 2) ? -v : v;
}

MatrixPQForm::MatrixPQForm(int n, int m, int p, int q)
    : n_(n), m_(m), p_(p), q_(q), e_(static_cast<std::size_t>(n * n), PQForm(m, p, q)) {
  if (n < 1) throw InvalidInput("matrix size must be positive");
}

MatrixPQForm MatrixPQForm::identity(const PQForm& w, int n) {
  MatrixPQForm M(n, w.dim(), w.p(), w.q());
  for (int i = 0; i < n; ++i) M.set(i, i, w);
  return M;
}

void MatrixPQForm::set(int i, int j, const PQForm& f) {
  if (f.dim() != m_ || f.p() != p_ || f.q() != q_)
    throw InvalidInput("matrix entry degree mismatch");
  e_[i * n_ + j] = f;
}

MatrixPQForm& MatrixPQForm::operator+=(const MatrixPQForm& o) {
  if (o.n_ != n_ || o.m_ != m_ || o.p_ != p_ || o.q_ != q_)
    throw InvalidInput("matrix form shape mismatch");
  for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
  return *this;
}

MatrixPQForm& MatrixPQForm::operator*=(cxd s) {
  for (auto& e : e_) e *= s;
  return *this;
}

MatrixPQForm MatrixPQForm::principal(std::span<const int> rows) const {
  int k = static_cast<int>(rows.size());
  MatrixPQForm r(k, m_, p_, q_);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) r.e_[i * k + j] = (*this)(rows[i], rows[j]);
  return r;
}

namespace {

void require_11(const MatrixPQForm& M) {
  if (M.p() != 1 || M.q() != 1) throw InvalidInput("form-valued determinant needs (1,1) entries");
}

template <class Entry, class Mul>
Entry column_mixed_det(int n, const std::function<const Entry&(int, int, int)>& at,
                       const std::vector<int>& src, Entry zero, Entry one, Mul mul) {
  // det of the matrix whose column j is taken from argument src[j]
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Entry total = zero;
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inv;
    Entry prod = one;
    for (int j = 0; j < n; ++j) prod = mul(prod, at(src[j], perm[j], j));
    if (inv & 1)
      total -= prod;
    else
      total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

PQForm form_det(const MatrixPQForm& M) {
  require_11(M);
  int n = M.size();
  std::function<const PQForm&(int, int, int)> at = [&](int, int i, int j) -> const PQForm& {
    return M(i, j);
  };
  std::vector<int> src(n, 0);
  PQForm zero(M.dim(), n, n);
  return column_mixed_det<PQForm>(n, at, src, zero, PQForm::scalar(M.dim(), 1.0),
                                  [](const PQForm& a, const PQForm& b) { return wedge(a, b); });
}

PQForm mixed_cm(std::span<const MatrixPQForm> args) {
  int n = static_cast<int>(args.size());
  if (n == 0) throw InvalidInput("mixed_cm needs at least one argument");
  for (const auto& A : args) {
    if (A.size() != n || A.dim() != args[0].dim())
      throw InvalidInput("mixed_cm: number of arguments must equal matrix size");
    require_11(A);
  }
  std::function<const PQForm&(int, int, int)> at = [&](int a, int i, int j) -> const PQForm& {
    return args[a](i, j);
  };
  std::vector<int> src(n);
  std::iota(src.begin(), src.end(), 0);
  int m = args[0].dim();
  PQForm total(m, n, n);
  do {
    total += column_mixed_det<PQForm>(n, at, src, PQForm(m, n, n), PQForm::scalar(m, 1.0),
                                      [](const PQForm& a, const PQForm& b) { return wedge(a, b); });
  } while (std::next_permutation(src.begin(), src.end()));
  total *= 1.0 / factorial(n);
  return total;
}

cxd mixed_cm(std::span<const Eigen::MatrixXcd> args) {
  int n = static_cast<int>(args.size());
  if (n == 0) throw InvalidInput("mixed_cm needs at least one argument");
  for (const auto& A : args)
    if (A.rows() != n || A.cols() != n)
      throw InvalidInput("mixed_cm: number of arguments must equal matrix size");
  std::function<const cxd&(int, int, int)> at = [&](int a, int i, int j) -> const cxd& {
    return args[a](i, j);
  };
  std::vector<int> src(n);
  std::iota(src.begin(), src.end(), 0);
  cxd total = 0;
  do {
    total += column_mixed_det<cxd>(n, at, src, cxd(0), cxd(1),
                                   [](const cxd& a, const cxd& b) { return a * b; });
  } while (std::next_permutation(src.begin(), src.end()));
  return total / factorial(n);
}

std::vector<PQForm> char_coefficients(const MatrixPQForm& A) {
  require_11(A);
  int n = A.size(), m = A.dim();
  std::vector<PQForm> c;
  c.push_back(PQForm::scalar(m, 1.0));
  for (int k = 1; k <= n; ++k) {
    PQForm ck(m, k, k);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (std::popcount(mask) != k) continue;
      std::vector<int> rows;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) rows.push_back(i);
      ck += form_det(A.principal(rows));
    }
    c.push_back(ck);
  }
  return c;
}

std::vector<cxd> char_coefficients(const Eigen::MatrixXcd& A) {
  if (A.rows() != A.cols()) throw InvalidInput("char_coefficients needs a square matrix");
  int n = static_cast<int>(A.rows());
  std::vector<cxd> c(n + 1, 0.0);
  c[0] = 1.0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> rows;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) rows.push_back(i);
    int k = static_cast<int>(rows.size());
    Eigen::MatrixXcd sub(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = A(rows[i], rows[j]);
    c[k] += sub.determinant();
  }
  return c;
}

}  // namespace kahler
