// SPDX-License-Identifier: Apache-2.0
#include "tartarus/descriptors/descriptors.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>

#include "tartarus/molgraph/elements.hpp"

namespace tartarus::desc {
namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t z = h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t signed_value(int v) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(v)); }

}  // namespace

Fingerprint::Fingerprint(int nbits) : nbits_(nbits), words_((static_cast<std::size_t>(nbits) + 63) / 64, 0) {
  if (nbits <= 0) throw std::invalid_argument("fingerprint length must be positive");
}

bool Fingerprint::test(int bit) const {
  return (words_.at(static_cast<std::size_t>(bit) / 64) >> (static_cast<unsigned>(bit) % 64)) & 1ULL;
}

void Fingerprint::set(int bit) { words_.at(static_cast<std::size_t>(bit) / 64) |= 1ULL << (static_cast<unsigned>(bit) % 64); }

int Fingerprint::count() const noexcept {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

std::string Fingerprint::to_hex() const {
  std::string out;
  out.reserve(words_.size() * 16);
  char buf[17];
  for (auto it = words_.rbegin(); it != words_.rend(); ++it) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(*it));
    out += buf;
  }
  return out;
}

Fingerprint Fingerprint::from_hex(std::string_view hex, int nbits) {
  Fingerprint fp(nbits);
  if (hex.size() != fp.words_.size() * 16) throw LengthMismatch("fingerprint hex has the wrong length");
  for (std::size_t w = 0; w < fp.words_.size(); ++w) {
    const auto chunk = std::string(hex.substr(hex.size() - (w + 1) * 16, 16));
    std::size_t used = 0;
    fp.words_[w] = std::stoull(chunk, &used, 16);
    if (used != 16) throw std::invalid_argument("fingerprint hex is malformed");
  }
  return fp;
}

Fingerprint morgan_fingerprint(const mol::Molecule& m, int radius, int nbits) {
  Fingerprint fp(nbits);
  const int n = m.atom_count();
  std::vector<std::uint64_t> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& a = m.atom(i);
    int heavy_degree = 0;
    for (const auto& nb : m.neighbors(i)) {
      if (m.atom(nb.atom).atomic_number != 1) ++heavy_degree;
    }
    std::uint64_t h = 0x5EEDULL;
    h = mix(h, static_cast<std::uint64_t>(a.atomic_number));
    h = mix(h, static_cast<std::uint64_t>(heavy_degree));
    h = mix(h, signed_value(a.formal_charge));
    h = mix(h, static_cast<std::uint64_t>(a.total_h()));
    h = mix(h, a.in_ring ? 1 : 0);
    h = mix(h, a.aromatic ? 1 : 0);
    ids[static_cast<std::size_t>(i)] = h;
    fp.set(static_cast<int>(h % static_cast<std::uint64_t>(nbits)));
  }
  std::vector<std::uint64_t> next(ids.size());
  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  for (int r = 1; r <= radius; ++r) {
    for (int i = 0; i < n; ++i) {
      env.clear();
      for (const auto& nb : m.neighbors(i)) {
        env.emplace_back(static_cast<std::uint64_t>(m.bond(nb.bond).type()), ids[static_cast<std::size_t>(nb.atom)]);
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = mix(static_cast<std::uint64_t>(r), ids[static_cast<std::size_t>(i)]);
      for (const auto& [bt, id] : env) h = mix(mix(h, bt), id);
      next[static_cast<std::size_t>(i)] = h;
      fp.set(static_cast<int>(h % static_cast<std::uint64_t>(nbits)));
    }
    ids.swap(next);
  }
  return fp;
}

// A hardware popcount clone is picked at load time where the target allows it.
#if defined(__x86_64__) && defined(__GNUC__) && !defined(__clang__)
#define TARTARUS_POPCNT_CLONES __attribute__((target_clones("popcnt", "default")))
#else
#define TARTARUS_POPCNT_CLONES
#endif

TARTARUS_POPCNT_CLONES
double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.size() != b.size()) throw LengthMismatch("fingerprints differ in length");
  int both = 0;
  int either = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    both += std::popcount(wa[i] & wb[i]);
    either += std::popcount(wa[i] | wb[i]);
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

std::vector<double> similarity_row_sums(std::span<const Fingerprint> fps) {
  std::vector<double> rows(fps.size(), 0.0);
  for (std::size_t i = 0; i < fps.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = i + 1; j < fps.size(); ++j) s += tanimoto(fps[i], fps[j]);
    rows[i] = s;
  }
  return rows;
}

double diversity(std::span<const Fingerprint> fps) {
  const std::size_t n = fps.size();
  if (n < 2) throw PopulationTooSmall("diversity needs at least two molecules");
  double total = 0.0;
  for (double r : similarity_row_sums(fps)) total += r;
  return 1.0 - 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1)) * total;
}

double diversity(std::span<const mol::Molecule> population) {
  std::vector<Fingerprint> fps;
  fps.reserve(population.size());
  for (const auto& m : population) fps.push_back(morgan_fingerprint(m));
  return diversity(fps);
}

ScalarDescriptors scalar_descriptors(const mol::Molecule& m) {
  ScalarDescriptors d;
  for (int i = 0; i < m.atom_count(); ++i) {
    const auto& a = m.atom(i);
    d.molecular_weight += mol::atomic_weight(a.atomic_number) + a.total_h() * mol::atomic_weight(1);
    if (a.atomic_number != 1) ++d.heavy_atom_count;
    if (a.atomic_number == 7 || a.atomic_number == 8) {
      ++d.h_bond_acceptors;
      if (a.total_h() > 0) ++d.h_bond_donors;
    }
  }
  return d;
}

const std::vector<std::string>& local_descriptor_names() {
  static const std::vector<std::string> kNames = {
      "net_charge",       "n_charged_atoms", "radical_electrons", "n_rings",
      "n_bridgehead",     "n_spiro",         "aromatic_fraction", "conjugated_bond_fraction",
      "max_ring_size",    "min_ring_size",   "mol_weight",        "h_bond_donors",
      "h_bond_acceptors", "heavy_atom_count"};
  return kNames;
}

bool is_local_descriptor(std::string_view name) {
  const auto& names = local_descriptor_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

substructure::DescriptorMap local_descriptors(const mol::Molecule& m) {
  substructure::DescriptorMap d;
  const auto report = mol::perceive(m);
  const auto scalars = scalar_descriptors(m);
  int charged = 0;
  int radicals = 0;
  for (int i = 0; i < m.atom_count(); ++i) {
    if (m.atom(i).formal_charge != 0) ++charged;
    radicals += m.radical_electrons(i);
  }
  d["net_charge"] = m.net_charge();
  d["n_charged_atoms"] = charged;
  d["radical_electrons"] = radicals;
  d["n_rings"] = report.n_rings;
  d["n_bridgehead"] = report.n_bridgehead;
  d["n_spiro"] = report.n_spiro;
  d["aromatic_fraction"] = report.aromatic_fraction;
  d["conjugated_bond_fraction"] = report.conjugated_bond_fraction;
  d["max_ring_size"] = report.max_ring_size;
  d["min_ring_size"] = report.min_ring_size;
  d["mol_weight"] = scalars.molecular_weight;
  d["h_bond_donors"] = scalars.h_bond_donors;
  d["h_bond_acceptors"] = scalars.h_bond_acceptors;
  d["heavy_atom_count"] = scalars.heavy_atom_count;
  return d;
}

}  // namespace tartarus::desc
