// SPDX-License-Identifier: Apache-2.0
#include "tartarus/objectives/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tartarus::obj {
namespace {

struct Moments {
  EnergyPoint mean{};
  std::array<double, 4> cov{};
};

Moments moments(std::span<const EnergyPoint> points, std::span<const std::size_t> subset) {
  Moments m;
  const double n = static_cast<double>(subset.size());
  for (auto i : subset) {
    m.mean[0] += points[i][0];
    m.mean[1] += points[i][1];
  }
  m.mean[0] /= n;
  m.mean[1] /= n;
  for (auto i : subset) {
    const double dx = points[i][0] - m.mean[0];
    const double dy = points[i][1] - m.mean[1];
    m.cov[0] += dx * dx;
    m.cov[1] += dx * dy;
    m.cov[3] += dy * dy;
  }
  m.cov[0] /= n - 1.0;
  m.cov[1] /= n - 1.0;
  m.cov[3] /= n - 1.0;
  m.cov[2] = m.cov[1];
  return m;
}

}  // namespace

double OutlierEnvelope::mahalanobis2(const EnergyPoint& p) const {
  const double dx = p[0] - center[0];
  const double dy = p[1] - center[1];
  return dx * (precision[0] * dx + precision[1] * dy) + dy * (precision[2] * dx + precision[3] * dy);
}

OutlierEnvelope make_envelope(const EnergyPoint& center, const std::array<double, 4>& covariance, double threshold,
                              double contamination) {
  const double sxx = covariance[0];
  const double sxy = covariance[1];
  const double syy = covariance[3];
  const double det = sxx * syy - sxy * sxy;
  // Relative test so the check is scale free.
  if (!(sxx > 0.0) || !(syy > 0.0) || !(det > 1e-12 * sxx * syy) || !std::isfinite(det)) {
    throw DegenerateCovariance("covariance is singular (collinear or identical points)");
  }
  OutlierEnvelope env;
  env.center = center;
  env.covariance = {sxx, sxy, sxy, syy};
  env.precision = {syy / det, -sxy / det, -sxy / det, sxx / det};
  env.threshold = threshold;
  env.contamination = contamination;
  return env;
}

OutlierEnvelope fit_outlier_envelope(std::span<const EnergyPoint> points, double contamination) {
  if (points.size() < kEnvelopeMinPoints) throw std::invalid_argument("envelope needs at least 20 points");
  if (!(contamination > 0.0 && contamination < 0.5)) throw std::invalid_argument("contamination must lie in (0, 0.5)");
  const std::size_t n = points.size();
  const auto dropped = static_cast<std::size_t>(std::ceil(contamination * static_cast<double>(n)));
  std::vector<std::size_t> subset(n);
  std::iota(subset.begin(), subset.end(), 0);
  std::vector<double> d2(n);
  std::vector<std::size_t> order(n);
  OutlierEnvelope env;
  for (int round = 0; round <= kEnvelopeRounds; ++round) {
    const auto m = moments(points, subset);
    env = make_envelope(m.mean, m.cov, 0.0, contamination);
    if (round == kEnvelopeRounds) break;
    for (std::size_t i = 0; i < n; ++i) d2[i] = env.mahalanobis2(points[i]);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });
    subset.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n - dropped));
    std::sort(subset.begin(), subset.end());
  }
  for (std::size_t i = 0; i < n; ++i) d2[i] = env.mahalanobis2(points[i]);
  std::sort(d2.begin(), d2.end());
  const auto k = static_cast<std::size_t>(std::ceil((1.0 - contamination) * static_cast<double>(n)));
  env.threshold = d2[std::max<std::size_t>(k, 1) - 1];
  if (!(env.threshold > 0.0)) throw DegenerateCovariance("envelope threshold is zero");
  return env;
}

}  // namespace tartarus::obj
