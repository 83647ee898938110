#pragma once

#include <string>

namespace opde::checks {

struct CheckResult {
  bool pass = false;
  std::string detail;
};

// Grid of 720 candidates around identity against a direct matrix product, plus timing.
CheckResult grid_check();
// Softmax sums, uniform loss and loss gradient over random score vectors.
CheckResult softmax_check(int vectors = 10000);
// Keypoint nearest neighbors against an exhaustive scan over random clouds.
CheckResult keypoint_oracle_check(int clouds = 20);
// Central differences through encoder, aggregator and head on a tiny model.
CheckResult gradient_check(int sampled = 60);

}  // namespace opde::checks
