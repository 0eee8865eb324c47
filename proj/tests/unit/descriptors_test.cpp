// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <bitset>

#include "support/corpus.hpp"
#include "support/isomorphism.hpp"
#include "tartarus/descriptors/descriptors.hpp"
#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/util/rng.hpp"

using namespace tartarus;
using namespace tartarus::desc;

namespace {

std::bitset<kFingerprintBits> to_bitset(const Fingerprint& fp) {
  std::bitset<kFingerprintBits> b;
  for (int i = 0; i < fp.size(); ++i) b[static_cast<std::size_t>(i)] = fp.test(i);
  return b;
}

double tanimoto_oracle(const Fingerprint& a, const Fingerprint& b) {
  const auto x = to_bitset(a);
  const auto y = to_bitset(b);
  const auto either = (x | y).count();
  if (either == 0) return 1.0;
  return static_cast<double>((x & y).count()) / static_cast<double>(either);
}

double diversity_oracle(const std::vector<Fingerprint>& fps) {
  const std::size_t n = fps.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += tanimoto_oracle(fps[i], fps[j]);
  }
  return 1.0 - 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1)) * sum;
}

std::vector<int> random_permutation(int n, util::Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  util::shuffle(p, rng);
  return p;
}

}  // namespace

TEST_CASE("tanimoto arithmetic") {
  Fingerprint a;
  Fingerprint b;
  CHECK(tanimoto(a, b) == 1.0);
  a.set(1);
  a.set(2);
  a.set(3);
  b.set(2);
  b.set(3);
  b.set(4);
  CHECK(tanimoto(a, b) == 0.5);
  CHECK(tanimoto(a, a) == 1.0);
  Fingerprint c;
  c.set(100);
  CHECK(tanimoto(a, c) == 0.0);
  CHECK_THROWS_AS((void)tanimoto(a, Fingerprint(1024)), LengthMismatch);
}

TEST_CASE("fingerprint hex round trip") {
  const auto fp = morgan_fingerprint(mol::parse_smiles("CC(=O)Oc1ccccc1C(=O)O"));
  const auto hex = fp.to_hex();
  CHECK(hex.size() == 512);
  CHECK(Fingerprint::from_hex(hex) == fp);
  CHECK_THROWS_AS((void)Fingerprint::from_hex("abc"), LengthMismatch);
}

TEST_CASE("fingerprints are invariant under renumbering") {
  util::Rng rng(11);
  for (const auto& smi : testing::seed_smiles()) {
    const auto m = mol::parse_smiles(smi);
    const auto fp = morgan_fingerprint(m);
    CHECK(fp.count() > 0);
    for (int k = 0; k < 100; ++k) {
      const auto r = testing::renumber(m, random_permutation(m.atom_count(), rng));
      REQUIRE_MESSAGE(morgan_fingerprint(r) == fp, smi);
    }
  }
}

TEST_CASE("similarity ordering and symmetry") {
  const auto ethanol = morgan_fingerprint(mol::parse_smiles("CCO"));
  const auto duplicate = morgan_fingerprint(mol::parse_smiles("OCC"));
  const auto benzene = morgan_fingerprint(mol::parse_smiles("c1ccccc1"));
  CHECK(tanimoto(ethanol, duplicate) == 1.0);
  CHECK(tanimoto(ethanol, benzene) < 1.0);
  std::vector<Fingerprint> fps;
  for (const auto& smi : testing::seed_smiles()) fps.push_back(morgan_fingerprint(mol::parse_smiles(smi)));
  for (std::size_t i = 0; i < fps.size(); ++i) {
    for (std::size_t j = 0; j < fps.size(); ++j) {
      const double t = tanimoto(fps[i], fps[j]);
      CHECK(t == tanimoto(fps[j], fps[i]));
      CHECK(t == doctest::Approx(tanimoto_oracle(fps[i], fps[j])).epsilon(1e-15));
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
    }
  }
}

TEST_CASE("diversity matches the pairwise oracle") {
  std::vector<Fingerprint> corpus;
  for (const auto& smi : testing::seed_smiles()) corpus.push_back(morgan_fingerprint(mol::parse_smiles(smi)));
  util::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 2 + util::uniform_index(rng, 19);
    std::vector<Fingerprint> pop;
    for (std::size_t i = 0; i < n; ++i) pop.push_back(corpus[util::uniform_index(rng, corpus.size())]);
    const double d = diversity(pop);
    CHECK(std::abs(d - diversity_oracle(pop)) <= 1e-12);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
  }
  const std::vector<mol::Molecule> same(7, mol::parse_smiles("c1ccccc1O"));
  CHECK(diversity(same) == 0.0);
  CHECK_THROWS_AS((void)diversity(std::vector<mol::Molecule>{mol::parse_smiles("C")}), PopulationTooSmall);
}

TEST_CASE("two fingerprints with similarity one half") {
  Fingerprint a;
  Fingerprint b;
  a.set(0);
  a.set(1);
  b.set(1);
  b.set(0);
  a.set(2);
  b.set(3);
  const std::vector<Fingerprint> pop = {a, b};
  CHECK(diversity(pop) == 0.5);
}

TEST_CASE("scalar descriptors from atomic weights") {
  const auto water = scalar_descriptors(mol::parse_smiles("O"));
  CHECK(water.molecular_weight == doctest::Approx(15.999 + 2 * 1.008));
  CHECK(water.molecular_weight == doctest::Approx(18.02).epsilon(0.001));
  CHECK(water.h_bond_donors == 1);
  CHECK(water.h_bond_acceptors == 1);
  const auto methane = scalar_descriptors(mol::parse_smiles("C"));
  CHECK(methane.h_bond_donors == 0);
  CHECK(methane.h_bond_acceptors == 0);
  CHECK(methane.heavy_atom_count == 1);
  const auto ethanol = scalar_descriptors(mol::parse_smiles("CCO"));
  CHECK(ethanol.molecular_weight == doctest::Approx(2 * 12.011 + 6 * 1.008 + 15.999));
  CHECK(ethanol.molecular_weight == doctest::Approx(46.07).epsilon(0.001));
  CHECK(ethanol.h_bond_donors == 1);
  CHECK(ethanol.h_bond_acceptors == 1);
  const auto pyridine = scalar_descriptors(mol::parse_smiles("c1ccncc1"));
  CHECK(pyridine.h_bond_donors == 0);
  CHECK(pyridine.h_bond_acceptors == 1);
}

TEST_CASE("local descriptor map") {
  const auto d = local_descriptors(mol::parse_smiles("C1CC2CCC1CC2"));
  for (const auto& name : local_descriptor_names()) CHECK(d.count(name) == 1);
  CHECK(d.at("n_bridgehead") == 2);
  CHECK(d.at("n_rings") == 2);
  CHECK(is_local_descriptor("mol_weight"));
  CHECK_FALSE(is_local_descriptor("sascore"));
  const auto charged = local_descriptors(mol::parse_smiles("C[N+](C)(C)C.[Cl-]"));
  CHECK(charged.at("net_charge") == 0);
  CHECK(charged.at("n_charged_atoms") == 2);
}
