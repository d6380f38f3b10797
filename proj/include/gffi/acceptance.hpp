#pragma once

// The twelve end-to-end acceptance checks, shared by the `gffi accept`
// subcommand and the gffi_acceptance test binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gffi {

struct AcceptanceOptions {
  int threads = 0;
  std::uint64_t seed = 20240601;
  std::vector<int> only;  // empty: all criteria
  // Progress lines (criterion started / finished); may be empty.
  std::function<void(const std::string&)> log;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  nlohmann::json data;
  double seconds = 0.0;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// "PASS [n] name: summary" or "FAIL ...".
std::string format_line(const CriterionResult& r);

void to_json(nlohmann::json& j, const CriterionResult& r);

}  // namespace gffi
