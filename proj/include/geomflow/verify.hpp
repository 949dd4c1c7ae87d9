#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

namespace geomflow {

/// One measured quantity compared against a threshold.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool below = true;  // pass iff value < tolerance (or > when false)
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  nlohmann::json info = nlohmann::json::object();  // diagnostics that are reported, not judged
  double seconds = 0.0;

  bool pass() const;
  nlohmann::json to_json() const;
};

/// Every tolerance used by the suites, keyed "<suite>.<check>". Runs may
/// override entries; unknown keys are rejected.
class Tolerances {
 public:
  Tolerances();
  double at(const std::string& key) const;
  void set(const std::string& key, double value);
  const std::map<std::string, double>& all() const noexcept { return table_; }

 private:
  std::map<std::string, double> table_;
};

struct VerifyConfig {
  unsigned seed = 20240611;
  Tolerances tolerances;
};

const std::vector<std::string>& suite_names();
/// Throws Config for an unknown suite.
SuiteReport run_suite(const std::string& name, const VerifyConfig& cfg = {});

}  // namespace geomflow
