#pragma once

#include <memory>
#include <Eigen/Dense>
#include <vector>

#include "kahler/grid.hpp"

// Operators on cp1 grids in polar coordinates (vartheta, theta) of the unit
// sphere. Full-sphere grids use a double Fourier extension in vartheta, which
// needs the parity of the data: +1 for smooth scalars, flipped by d/dvartheta,
// 1/sin, sin and e^{i theta}. Truncated grids fall back to 4th order differences.
namespace kahler::sphere {

std::vector<cxd> d_vartheta(const Grid& g, const std::vector<cxd>& f, int parity);
std::vector<cxd> d_theta(const Grid& g, const std::vector<cxd>& f);
// d/dvartheta + (i / sin) d/dtheta and its conjugate operator
std::vector<cxd> edth_bar(const Grid& g, const std::vector<cxd>& f, int parity);
std::vector<cxd> edth(const Grid& g, const std::vector<cxd>& f, int parity);
std::vector<cxd> laplacian(const Grid& g, const std::vector<cxd>& f);
// Area-mean-zero solution of laplacian(u) = h; h must have zero area mean.
std::vector<cxd> solve_laplacian(const Grid& g, const std::vector<cxd>& h);
// Area integral sum f dA over the unit sphere (4 pi for f = 1).
cxd area_integral(const Grid& g, const std::vector<cxd>& f);

// Solves (I + h s^2 laplacian^2) u = rhs mode by mode.
class DampedBiharmonic {
 public:
  DampedBiharmonic(const Grid& g, double h, double s);
  std::vector<cxd> solve(const std::vector<cxd>& rhs) const;
  double step() const { return h_; }

 private:
  Grid grid_;
  double h_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

}  // namespace kahler::sphere
