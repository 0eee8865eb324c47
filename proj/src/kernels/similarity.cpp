// SPDX-License-Identifier: Apache-2.0
#include "tartarus/kernels/similarity.hpp"

#include <cstddef>

namespace tartarus::kernels {

std::vector<desc::Fingerprint> fingerprints_parallel(std::span<const mol::Molecule> mols) {
  std::vector<desc::Fingerprint> out(mols.size());
  const auto n = static_cast<std::ptrdiff_t>(mols.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = desc::morgan_fingerprint(mols[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<double> similarity_row_sums_parallel(std::span<const desc::Fingerprint> fps) {
  const std::size_t n = fps.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (fps[i].size() != fps[0].size()) throw desc::LengthMismatch("fingerprints differ in length");
  }
  std::vector<double> rows(n, 0.0);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  // Row i costs n - i - 1 comparisons; dynamic scheduling evens out the triangle.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const auto& a = fps[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j) s += desc::tanimoto(a, fps[j]);
    rows[static_cast<std::size_t>(i)] = s;
  }
  return rows;
}

double diversity_parallel(std::span<const desc::Fingerprint> fps) {
  const std::size_t n = fps.size();
  if (n < 2) throw desc::PopulationTooSmall("diversity needs at least two molecules");
  double total = 0.0;
  for (double r : similarity_row_sums_parallel(fps)) total += r;
  return 1.0 - 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1)) * total;
}

double diversity_parallel(std::span<const mol::Molecule> mols) {
  const auto fps = fingerprints_parallel(mols);
  return diversity_parallel(fps);
}

}  // namespace tartarus::kernels
