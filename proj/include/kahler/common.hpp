#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kahler {

using cxd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cxd kI{0.0, 1.0};

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a metric fails to be positive definite somewhere on the grid.
class PositivityError : public NumericalError {
 public:
  PositivityError(std::size_t node, double min_eig)
      : NumericalError("metric not positive definite at node " + std::to_string(node) +
                       " (smallest eigenvalue " + std::to_string(min_eig) + ")"),
        node_(node), min_eig_(min_eig) {}
  std::size_t node() const { return node_; }
  double min_eigenvalue() const { return min_eig_; }

 private:
  std::size_t node_;
  double min_eig_;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : NumericalError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace kahler
