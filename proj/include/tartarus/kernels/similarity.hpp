// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "tartarus/descriptors/descriptors.hpp"
#include "tartarus/molgraph/molecule.hpp"

namespace tartarus::kernels {

/// Fingerprints computed in parallel; output order matches input order.
[[nodiscard]] std::vector<desc::Fingerprint> fingerprints_parallel(std::span<const mol::Molecule> mols);

/// Parallel counterpart of desc::similarity_row_sums. Each row is summed
/// by one thread in index order, so results are bitwise equal to the serial
/// reference for any thread count.
[[nodiscard]] std::vector<double> similarity_row_sums_parallel(std::span<const desc::Fingerprint> fps);

/// Diversity using the parallel row sums, reduced serially in row order.
[[nodiscard]] double diversity_parallel(std::span<const desc::Fingerprint> fps);
[[nodiscard]] double diversity_parallel(std::span<const mol::Molecule> mols);

}  // namespace tartarus::kernels
