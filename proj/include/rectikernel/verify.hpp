#pragma once

// Assertion suites behind `rectikernel verify` and the acceptance binary.
// Each suite is deterministic; thresholds are frozen constants.

#include <json.hpp>

#include <string>
#include <vector>

namespace rectikernel::verify {

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::json data = nlohmann::json::object();
};

struct SuiteResult {
  std::string suite;
  std::string title;
  std::vector<Assertion> assertions;
  double seconds = 0.0;

  [[nodiscard]] bool passed() const;
  /// First failing assertion, or nullptr.
  [[nodiscard]] const Assertion* first_failure() const;
};

/// Suite names in acceptance order.
[[nodiscard]] const std::vector<std::string>& suite_names();

[[nodiscard]] bool has_suite(const std::string& name);

/// Throws std::invalid_argument on unknown names.
[[nodiscard]] SuiteResult run_suite(const std::string& name);

/// One JSON line per assertion.
[[nodiscard]] std::vector<std::string> json_lines(const SuiteResult& r);

// Frozen constants shared with the tests.
constexpr double kMvConstant = 4.0;            // |lhs - rhs| <= C mu(C) on unit segments

}  // namespace rectikernel::verify
