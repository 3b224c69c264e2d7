#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace kahler {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  nlohmann::ordered_json details;
  std::string error;  // set when the criterion threw
};

struct AcceptanceOptions {
  int workers = 1;
  std::uint64_t seed = 42;
  std::vector<int> only;          // empty: all criteria
  int repro_workers = 8;          // worker count of the second run for criterion 10
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
  nlohmann::ordered_json to_json() const;
};

// Criteria 1-9 of the battery; criterion 10 reruns them with repro_workers and compares
// the serialized reports byte for byte.
AcceptanceReport run_acceptance(const AcceptanceOptions& opt = {});
CriterionResult run_criterion(int id, std::uint64_t seed);
std::string criterion_name(int id);
inline constexpr int kCriteria = 10;

}  // namespace kahler
