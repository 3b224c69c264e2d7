#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "kahler/common.hpp"

namespace kahler {

enum class ManifoldKind { Torus, CP1, CP2 };

namespace detail {
struct GridImpl;
}

// Immutable node set shared by fields. Copies share the same implementation.
//   torus: z_i = x_i + i y_i on [0,1)^{2m}, node layout row-major over
//          (x_1, y_1, ..., x_m, y_m).
//   cp1:   affine chart z = tan(vartheta/2) e^{i theta}, layout (vartheta, theta).
//          radius = inf covers the whole sphere; finite radius truncates the chart.
//   cp2:   analytic Fubini-Study sample nodes only (no differentiation).
class Grid {
 public:
  static Grid torus(int m, int n);
  static Grid cp1(int n_polar = 128, int n_azimuth = 256,
                  double radius = std::numeric_limits<double>::infinity());
  static Grid cp2_analytic(int n_polar = 24, int n_angle = 4);

  ManifoldKind kind() const;
  std::string tag() const;
  int dim() const;
  std::size_t size() const;
  std::vector<std::size_t> shape() const;

  cxd coord(std::size_t node, int i) const;
  // Lebesgue weight of the node in chart coordinates dx^1 dy^1 ... dx^m dy^m.
  double weight(std::size_t node) const;

  int n() const;  // torus points per axis
  int n_polar() const;
  int n_azimuth() const;
  double radius() const;
  bool full_sphere() const;
  double polar(int j) const;
  double azimuth(int k) const;
  // FS area outside the truncation radius, 0 for the full sphere.
  double tail_mass() const;

  bool same(const Grid& o) const { return impl_ == o.impl_; }
  bool operator==(const Grid& o) const;
  const detail::GridImpl& impl() const { return *impl_; }

 private:
  explicit Grid(std::shared_ptr<const detail::GridImpl> p) : impl_(std::move(p)) {}
  std::shared_ptr<const detail::GridImpl> impl_;
};

}  // namespace kahler
