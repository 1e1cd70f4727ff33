#pragma once

// The verification suite: twelve numbered criteria, each reporting measured
// values, the tolerance it was judged against, and its runtime.

#include "plap/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace plap {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Measured values; deterministic for a given seed.
  Json measured;
  std::string summary;
  double runtime_s = 0.0;
  double runtime_limit_s = 0.0;  // 0 = none
  bool runtime_ok = true;
};

struct VerifyOptions {
  /// Criterion names to run; empty = all.
  std::vector<std::string> only;
  /// Multiplies every tolerance (below 1 tightens).
  double tolerance_scale = 1.0;
  std::uint64_t seed = 20240611;
};

struct VerifyReport {
  std::vector<CriterionResult> results;
  bool all_pass() const;
  Json to_json() const;
};

/// Names in criterion order: eigen_classical, eigen_oracle, ..., determinism.
const std::vector<std::string>& criterion_names();

/// Runs one criterion by name (throws std::invalid_argument for unknown names).
CriterionResult run_criterion(const std::string& name, const VerifyOptions& options);

/// Runs the selected criteria in order. `determinism` reruns the others and
/// compares their measured values.
VerifyReport run_verification(const VerifyOptions& options = {});

}  // namespace plap
