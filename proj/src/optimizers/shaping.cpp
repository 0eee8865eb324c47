// SPDX-License-Identifier: Apache-2.0
#include "tartarus/optimizers/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tartarus::opt {

ScoreShaper::ScoreShaper(std::span<const double> known, double threshold) : c_(threshold) {
  if (known.size() < 2) throw DegenerateSet("score shaping needs at least two known fitness values");
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("shaping threshold must lie in (0, 1)");
  a_ = std::accumulate(known.begin(), known.end(), 0.0) / static_cast<double>(known.size());
  const double top = *std::max_element(known.begin(), known.end());
  if (!(top > a_)) throw DegenerateSet("maximum of the known fitness set equals its mean");
  b_ = -std::log(2.0 / (c_ + 1.0) - 1.0) / (top - a_);
}

double ScoreShaper::operator()(double f) const {
  // tanh(x/2) equals 2/(1+e^-x) - 1 without cancellation near zero.
  return std::tanh(0.5 * b_ * (f - a_));
}

double shape_score(double f, std::span<const double> known, double threshold) {
  return ScoreShaper(known, threshold)(f);
}

}  // namespace tartarus::opt
