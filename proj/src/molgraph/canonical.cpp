// SPDX-License-Identifier: Apache-2.0
#include "tartarus/molgraph/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "tartarus/molgraph/smiles.hpp"

namespace tartarus::mol {
namespace {

// Assigns rank = number of atoms with a strictly smaller key.
template <class Key>
int rank_by(const std::vector<Key>& keys, std::vector<int>& ranks) {
  const std::size_t n = keys.size();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)]; });
  ranks.assign(n, 0);
  int classes = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(idx[k]);
    if (k == 0 || keys[static_cast<std::size_t>(idx[k - 1])] < keys[i]) {
      ++classes;
      ranks[i] = static_cast<int>(k);
    } else {
      ranks[i] = ranks[static_cast<std::size_t>(idx[k - 1])];
    }
  }
  return classes;
}

int refine(const Molecule& m, std::vector<int>& ranks) {
  const int n = m.atom_count();
  int classes = static_cast<int>(std::set<int>(ranks.begin(), ranks.end()).size());
  while (true) {
    std::vector<std::pair<int, std::vector<std::pair<int, int>>>> keys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      auto& k = keys[static_cast<std::size_t>(i)];
      k.first = ranks[static_cast<std::size_t>(i)];
      for (const auto& nb : m.neighbors(i)) {
        k.second.emplace_back(ranks[static_cast<std::size_t>(nb.atom)], static_cast<int>(m.bond(nb.bond).type()));
      }
      std::sort(k.second.begin(), k.second.end());
    }
    std::vector<int> next;
    const int next_classes = rank_by(keys, next);
    ranks = std::move(next);
    if (next_classes == classes) return classes;
    classes = next_classes;
  }
}

}  // namespace

std::vector<int> canonical_ranks(const Molecule& m) {
  const int n = m.atom_count();
  using Invariant = std::tuple<int, int, int, int, int, int>;
  std::vector<Invariant> inv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Atom& a = m.atom(i);
    inv[static_cast<std::size_t>(i)] =
        Invariant{a.atomic_number, a.aromatic ? 1 : 0, a.formal_charge, a.total_h(), m.degree(i), a.in_ring ? 1 : 0};
  }
  std::vector<int> ranks;
  rank_by(inv, ranks);
  int classes = refine(m, ranks);
  while (classes < n) {
    // Break the lowest tie: one member of the smallest tied rank moves ahead.
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    for (int r : ranks) ++count[static_cast<std::size_t>(r)];
    int tied = -1;
    for (int r = 0; r < n; ++r) {
      if (count[static_cast<std::size_t>(r)] > 1) {
        tied = r;
        break;
      }
    }
    std::vector<std::pair<int, int>> keys(static_cast<std::size_t>(n));
    bool chosen = false;
    for (int i = 0; i < n; ++i) {
      int sub = 1;
      if (!chosen && ranks[static_cast<std::size_t>(i)] == tied) {
        sub = 0;
        chosen = true;
      }
      keys[static_cast<std::size_t>(i)] = {ranks[static_cast<std::size_t>(i)], sub};
    }
    rank_by(keys, ranks);
    classes = refine(m, ranks);
  }
  return ranks;
}

std::string canonical_key(const Molecule& m) {
  WriterOptions opts;
  opts.kekule = false;
  opts.always_bracket = true;
  return write_smiles_ordered(m, canonical_ranks(m), opts);
}

std::string canonical_smiles(const Molecule& m) { return write_smiles_ordered(m, canonical_ranks(m)); }

}  // namespace tartarus::mol
