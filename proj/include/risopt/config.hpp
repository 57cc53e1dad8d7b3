#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "risopt/channel.hpp"
#include "risopt/evaluate.hpp"

namespace risopt {

enum class SweepAxis { kDeltaC, kBeta, kElements };

const char* ToString(SweepAxis axis);

struct ExperimentConfig {
  SystemParams params;
  SweepAxis axis = SweepAxis::kDeltaC;
  std::vector<double> grid;
  std::vector<Scheme> schemes;
  std::vector<std::uint64_t> seeds;
  int n_samples = 2000;
  int num_candidates = 200;
  std::string output;  // optional; the CLI flag takes precedence

  /// Throws ConfigError (line 0) when an invariant is violated.
  void Validate() const;

  /// params with the sweep variable set to `value`.
  SystemParams ParamsAt(double value) const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& field, const std::string& what);

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig LoadConfig(const std::string& path);

}  // namespace risopt
