#pragma once

#include <span>
#include <vector>

#include "kahler/exterior.hpp"
#include "kahler/fields.hpp"
#include "kahler/rng.hpp"

namespace kahler {

// Holomorphic / antiholomorphic partial derivatives d f / d z^i, d f / d zbar^i.
// Torus: spectral. cp1: sphere operators (spectral on the full sphere).
ScalarField d_holo(const ScalarField& f, int i);
ScalarField d_antiholo(const ScalarField& f, int i);
std::vector<ScalarField> d_holo(const ScalarField& f);
std::vector<ScalarField> d_antiholo(const ScalarField& f);
// d_i dbar_j f
ScalarField ddbar(const ScalarField& f, int i, int j);

// Complex Laplacian g^{i jbar} d_i dbar_j f.
ScalarField laplacian(const ScalarField& f, const MetricField& g);

MetricField metric_from_potential(const MetricField& g0, const ScalarField& phi);

// Integral of a top-degree form given by its coefficient on the canonical
// basis dz^{1..m} ^ dzbar^{1..m} at every node.
cxd integrate(const ScalarField& top_coefficient);
cxd integrate(std::span<const PQForm> top, const Grid& grid);
// int f omega^m
cxd integrate_volume(const ScalarField& f, const MetricField& g);
// f minus its omega^m average (or the average itself)
cxd volume_mean(const ScalarField& f, const MetricField& g);
ScalarField remove_mean(const ScalarField& f, const MetricField& g);

struct PoissonOptions {
  double tol = 1e-11;       // relative residual target of the fixed point
  int max_iter = 400;
  double solvability_tol = 1e-8;
};

// Solves laplacian(u, g) = rhs with int u omega^m = 0.
ScalarField solve_poisson(const ScalarField& rhs, const MetricField& g, const PoissonOptions& opt = {});

// Solves (1 + h a^2 Delta_0^2) u = rhs for the reference Laplacian Delta_0: flat on
// tori, Fubini-Study on cp1.
ScalarField solve_damped_biharmonic(const ScalarField& rhs, double h, double a = 1.0);

// Real band-limited potential; the bound amplitude controls sup |d dbar phi|
// relative to the background (flat torus or Fubini-Study on cp1).
ScalarField random_potential(const Grid& g, std::uint64_t seed, double amplitude, int max_mode);

// Real spherical harmonic of degree l and order mm (-l..l), L2-normalized on
// the unit sphere, sampled on a cp1 grid.
ScalarField spherical_harmonic(const Grid& g, int l, int mm);
// Unit-sphere coordinates (x1, x2, x3) through the chart z, x3 = (|z|^2 - 1)/(|z|^2 + 1);
// the holomorphy potentials of the Fubini-Study rotations.
std::vector<ScalarField> cp1_coordinate_functions(const Grid& g);

}  // namespace kahler
