// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <stdexcept>

namespace tartarus::opt {

class DegenerateSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr double kShapingThreshold = 0.8;

/// Sigmoid rescaling of fitness relative to a known set F: the mean maps to
/// 0 and max(F) maps to the threshold c.
class ScoreShaper {
 public:
  /// Throws DegenerateSet when |F| < 2 or max(F) equals mean(F).
  explicit ScoreShaper(std::span<const double> known, double threshold = kShapingThreshold);

  [[nodiscard]] double operator()(double f) const;
  [[nodiscard]] double a() const noexcept { return a_; }
  [[nodiscard]] double b() const noexcept { return b_; }
  [[nodiscard]] double c() const noexcept { return c_; }

 private:
  double a_;
  double b_;
  double c_;
};

[[nodiscard]] double shape_score(double f, std::span<const double> known, double threshold = kShapingThreshold);

}  // namespace tartarus::opt
