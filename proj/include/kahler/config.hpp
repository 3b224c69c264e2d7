#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kahler/common.hpp"
#include "kahler/fields.hpp"
#include "kahler/flows.hpp"
#include "kahler/kempf_ness.hpp"

namespace kahler {

// Configuration problems, with the source line when one is known (0 otherwise).
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& origin, int line, const std::string& field, const std::string& msg)
      : InvalidInput(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                     (field.empty() ? std::string() : ": [" + field + "]") + ": " + msg),
        line_(line), field_(field) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct ManifoldSpec {
  std::string kind = "torus";  // torus | cp1 | cp2-analytic
  int m = 1;
  int n = 32;        // torus points per axis
  int n_polar = 32;  // cp1 / cp2-analytic
  int n_azimuth = 32;
  double radius = 0;  // cp1 chart radius; 0 means the full sphere
};

struct MetricSpec {
  std::string kind = "reference";  // reference (flat or fs) | potential | random
  std::string file;                // potential container
  double amplitude = 0.1;
  int max_mode = 2;
};

struct KempfNessStart {
  std::string name;
  Eigen::VectorXcd x;
  std::string expect;  // optional verdict
};

struct KempfNessScenario {
  std::string group = "torus";  // torus | su2
  Eigen::MatrixXi weights;
  std::vector<int> twice_spins;
  int budget = 20000;
  std::vector<KempfNessStart> starts;
  LinearAction action() const;
};

struct ExperimentConfig {
  std::string origin = "<defaults>";
  std::string experiment;
  ManifoldSpec manifold;
  MetricSpec metric;
  std::vector<double> ts{0.0};
  std::map<std::string, double> tolerances;
  std::string out_dir = "out";
  int workers = 1;
  std::uint64_t seed = 42;
  FlowOptions flow;
  std::optional<int> expected_kernel_dim;
  KempfNessScenario kempf_ness;

  double tol(const std::string& key, double fallback) const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

std::vector<double> parse_double_list(const std::string& s);

Grid make_grid(const ManifoldSpec& spec);
MetricField reference_metric(const Grid& g);  // flat torus or Fubini-Study
// Potential of the configured metric over the reference one (zero for "reference").
ScalarField configured_potential(const ExperimentConfig& cfg, const Grid& g);

}  // namespace kahler
