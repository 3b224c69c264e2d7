#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

#include "kahler/grid.hpp"

namespace kahler::detail {

// Serializes FFTW planning, which is not thread safe.
std::mutex& fftw_planner_mutex();

struct GridImpl {
  ManifoldKind kind = ManifoldKind::Torus;
  int m = 1;
  std::size_t count = 0;
  std::vector<cxd> coords;  // count * m
  std::vector<double> weights;

  // torus
  int n = 0;
  std::vector<double> wavenumber;  // per axis index, Nyquist stored as -n/2
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  // cp1
  int npol = 0, naz = 0;
  double radius = 0;
  bool full = false;
  double dvartheta_step = 0;
  std::vector<double> vartheta, theta, sinv, cosv, cot, c2;
  std::vector<double> polar_weight;  // quadrature for  f(vartheta) sin(vartheta) d vartheta
  Eigen::MatrixXd D[2];              // folded derivative, index 0: even, 1: odd extension
  fftw_plan az_fwd = nullptr;
  fftw_plan az_bwd = nullptr;

  // Lazily built per-mode sphere Laplacian factorizations.
  mutable std::mutex cache_mu;
  mutable std::vector<std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>>> lap_lu;
  mutable std::unique_ptr<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>> lap0_qr;

  GridImpl() = default;
  GridImpl(const GridImpl&) = delete;
  GridImpl& operator=(const GridImpl&) = delete;
  ~GridImpl();

  int mode_k(int kk) const { return kk <= naz / 2 ? kk : kk - naz; }
  // Sphere Laplacian restricted to azimuthal mode k.
  Eigen::MatrixXd laplace_mode(int k) const;
};

}  // namespace kahler::detail
