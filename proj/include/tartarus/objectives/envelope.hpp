// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <stdexcept>

namespace tartarus::obj {

class DegenerateCovariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (reaction energy, activation energy) in kcal/mol.
using EnergyPoint = std::array<double, 2>;

constexpr double kReactivityContamination = 0.00035;
constexpr int kEnvelopeRounds = 10;
constexpr std::size_t kEnvelopeMinPoints = 20;

struct OutlierEnvelope {
  EnergyPoint center{};
  // Row-major 2x2.
  std::array<double, 4> covariance{};
  std::array<double, 4> precision{};
  double threshold = 0.0;
  double contamination = 0.0;

  [[nodiscard]] double mahalanobis2(const EnergyPoint& p) const;
  /// Strictly beyond the threshold; boundary points are inliers.
  [[nodiscard]] bool is_outlier(const EnergyPoint& p) const { return mahalanobis2(p) > threshold; }
};

/// Trimmed covariance re-estimation: each round refits mean and covariance
/// on the points outside the top `contamination` fraction of squared
/// Mahalanobis distances. The threshold is the (1 - contamination) empirical
/// quantile of the final distances over all points.
/// Throws std::invalid_argument for fewer than 20 points or contamination
/// outside (0, 0.5), DegenerateCovariance for collinear data.
[[nodiscard]] OutlierEnvelope fit_outlier_envelope(std::span<const EnergyPoint> points,
                                                   double contamination = kReactivityContamination);

/// Rebuilds the precision matrix; throws DegenerateCovariance.
[[nodiscard]] OutlierEnvelope make_envelope(const EnergyPoint& center, const std::array<double, 4>& covariance,
                                            double threshold, double contamination);

}  // namespace tartarus::obj
