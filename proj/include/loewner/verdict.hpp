#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace loewner {

/// Reproducible evidence behind a failed check.
struct Witness {
  std::uint64_t seed = 0;
  int trial = 0;
  std::vector<Eigen::MatrixXcd> matrices;
  double lambda_min = 0.0;
  /// Which inequality failed, e.g. "loewner", "kraus", "hp-iv".
  std::string check;
  /// Grid points for divided-difference checks.
  std::vector<double> points;
  std::optional<double> base;
};

/**
 * Outcome of a randomized check. `passed` is evidence; a failure always
 * carries a re-certified witness. `checks_run` counts trials up to and
 * including the first failing one.
 */
struct Verdict {
  bool passed = true;
  int checks_run = 0;
  std::optional<Witness> witness;
};

}  // namespace loewner
