// SPDX-License-Identifier: Apache-2.0
#include "tartarus/molgraph/molecule.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>

#include "tartarus/molgraph/elements.hpp"

namespace tartarus::mol {

// ---------------------------------------------------------------------------
// Molecule accessors

int Molecule::bond_between(int a, int b) const {
  for (const auto& n : neighbors(a)) {
    if (n.atom == b) return n.bond;
  }
  return -1;
}

int Molecule::bond_order_sum(int i) const {
  int sum = 0;
  for (const auto& n : neighbors(i)) sum += bonds_[static_cast<std::size_t>(n.bond)].order;
  return sum;
}

int Molecule::occupied_valence(int i) const { return bond_order_sum(i) + atom(i).total_h(); }

int Molecule::radical_electrons(int i) const {
  const Atom& a = atom(i);
  if (!a.no_implicit) return 0;
  const int occupied = occupied_valence(i);
  const auto v = fitting_valence(a.atomic_number, a.formal_charge, occupied);
  if (!v) return 0;
  return std::max(0, *v - occupied);
}

int Molecule::heavy_atom_count() const {
  return static_cast<int>(std::count_if(atoms_.begin(), atoms_.end(),
                                        [](const Atom& a) { return a.atomic_number != 1; }));
}

int Molecule::net_charge() const {
  return std::accumulate(atoms_.begin(), atoms_.end(), 0,
                         [](int s, const Atom& a) { return s + a.formal_charge; });
}

bool Molecule::atom_in_ring_of_size(int i, int size) const {
  for (const auto& r : rings_) {
    if (static_cast<int>(r.size()) == size && std::find(r.begin(), r.end(), i) != r.end()) return true;
  }
  return false;
}

Molecule Molecule::with_explicit_hydrogens() const {
  Molecule out;
  out.atoms_ = atoms_;
  out.bonds_ = bonds_;
  out.rings_ = rings_;
  out.atom_ring_count_ = atom_ring_count_;
  const int heavy = atom_count();
  for (int i = 0; i < heavy; ++i) {
    const int nh = atoms_[static_cast<std::size_t>(i)].total_h();
    for (int k = 0; k < nh; ++k) {
      Atom h;
      h.atomic_number = 1;
      h.no_implicit = true;
      out.atoms_.push_back(h);
      out.atom_ring_count_.push_back(0);
      Bond b;
      b.begin = i;
      b.end = static_cast<int>(out.atoms_.size()) - 1;
      out.bonds_.push_back(b);
    }
  }
  out.adjacency_.assign(out.atoms_.size(), {});
  for (int b = 0; b < static_cast<int>(out.bonds_.size()); ++b) {
    const auto& bd = out.bonds_[static_cast<std::size_t>(b)];
    out.adjacency_[static_cast<std::size_t>(bd.begin)].push_back({bd.end, b});
    out.adjacency_[static_cast<std::size_t>(bd.end)].push_back({bd.begin, b});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Builder

int MoleculeBuilder::add_atom(const Atom& atom) {
  if (!is_supported_element(atom.atomic_number)) {
    throw UnsupportedElement("unsupported atomic number " + std::to_string(atom.atomic_number));
  }
  if (atom.formal_charge < kMinCharge || atom.formal_charge > kMaxCharge) {
    throw ValenceError("formal charge out of range");
  }
  if (atom.explicit_h < 0) throw ValenceError("negative hydrogen count");
  atoms_.push_back(atom);
  return static_cast<int>(atoms_.size()) - 1;
}

bool MoleculeBuilder::has_bond(int a, int b) const { return bond_index(a, b) >= 0; }

int MoleculeBuilder::bond_index(int a, int b) const {
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    const auto& bd = bonds_[i];
    if ((bd.begin == a && bd.end == b) || (bd.begin == b && bd.end == a)) return static_cast<int>(i);
  }
  return -1;
}

int MoleculeBuilder::add_bond(int a, int b, int order, bool aromatic, char stereo) {
  if (a == b) throw SyntaxError("bond from an atom to itself");
  if (a < 0 || b < 0 || a >= atom_count() || b >= atom_count()) throw SyntaxError("bond to missing atom");
  if (has_bond(a, b)) throw SyntaxError("duplicate bond between atoms");
  if (order < 1 || order > 3) throw SyntaxError("bond order out of range");
  Bond bd;
  bd.begin = a;
  bd.end = b;
  bd.order = order;
  bd.aromatic = aromatic;
  bd.stereo = stereo;
  bonds_.push_back(bd);
  return static_cast<int>(bonds_.size()) - 1;
}

void MoleculeBuilder::fold_hydrogens() {
  const int n = atom_count();
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (const auto& b : bonds_) {
    ++degree[static_cast<std::size_t>(b.begin)];
    ++degree[static_cast<std::size_t>(b.end)];
  }
  std::vector<bool> remove(static_cast<std::size_t>(n), false);
  for (const auto& b : bonds_) {
    for (int side = 0; side < 2; ++side) {
      const int h = side == 0 ? b.begin : b.end;
      const int heavy = b.other(h);
      const Atom& ha = atoms_[static_cast<std::size_t>(h)];
      if (ha.atomic_number == 1 && ha.formal_charge == 0 && ha.explicit_h == 0 &&
          degree[static_cast<std::size_t>(h)] == 1 && b.order == 1 &&
          atoms_[static_cast<std::size_t>(heavy)].atomic_number != 1) {
        remove[static_cast<std::size_t>(h)] = true;
      }
    }
  }
  if (std::none_of(remove.begin(), remove.end(), [](bool r) { return r; })) return;

  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) {
    if (!remove[static_cast<std::size_t>(i)]) {
      remap[static_cast<std::size_t>(i)] = static_cast<int>(atoms.size());
      atoms.push_back(atoms_[static_cast<std::size_t>(i)]);
    }
  }
  std::vector<Bond> bonds;
  for (const auto& b : bonds_) {
    const bool rb = remove[static_cast<std::size_t>(b.begin)];
    const bool re = remove[static_cast<std::size_t>(b.end)];
    if (rb || re) {
      const int heavy = rb ? b.end : b.begin;
      ++atoms[static_cast<std::size_t>(remap[static_cast<std::size_t>(heavy)])].explicit_h;
      continue;
    }
    Bond nb = b;
    nb.begin = remap[static_cast<std::size_t>(b.begin)];
    nb.end = remap[static_cast<std::size_t>(b.end)];
    bonds.push_back(nb);
  }
  atoms_ = std::move(atoms);
  bonds_ = std::move(bonds);
}

namespace {

// Perfect matching over the atoms that still need a double bond, searched
// with a fewest-options-first backtracking strategy.
class KekuleMatcher {
 public:
  KekuleMatcher(int n_atoms, const std::vector<std::pair<int, int>>& edges, std::vector<bool> needs)
      : needs_(std::move(needs)), adj_(static_cast<std::size_t>(n_atoms)) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      adj_[static_cast<std::size_t>(edges[e].first)].push_back({edges[e].second, static_cast<int>(e)});
      adj_[static_cast<std::size_t>(edges[e].second)].push_back({edges[e].first, static_cast<int>(e)});
    }
    chosen_.assign(edges.size(), false);
  }

  bool solve() { return step(); }
  [[nodiscard]] const std::vector<bool>& chosen() const { return chosen_; }

 private:
  bool step() {
    if (++steps_ > kStepLimit) return false;
    int best = -1;
    int best_options = 1 << 30;
    for (std::size_t i = 0; i < needs_.size(); ++i) {
      if (!needs_[i]) continue;
      int options = 0;
      for (const auto& [j, e] : adj_[i]) {
        if (needs_[static_cast<std::size_t>(j)]) ++options;
      }
      if (options < best_options) {
        best_options = options;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) return true;
    if (best_options == 0) return false;
    needs_[static_cast<std::size_t>(best)] = false;
    for (const auto& [j, e] : adj_[static_cast<std::size_t>(best)]) {
      if (!needs_[static_cast<std::size_t>(j)]) continue;
      needs_[static_cast<std::size_t>(j)] = false;
      chosen_[static_cast<std::size_t>(e)] = true;
      if (step()) return true;
      chosen_[static_cast<std::size_t>(e)] = false;
      needs_[static_cast<std::size_t>(j)] = true;
    }
    needs_[static_cast<std::size_t>(best)] = true;
    return false;
  }

  static constexpr long kStepLimit = 200000;
  std::vector<bool> needs_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::vector<bool> chosen_;
  long steps_ = 0;
};

}  // namespace

void MoleculeBuilder::kekulize() {
  const bool any = std::any_of(bonds_.begin(), bonds_.end(), [](const Bond& b) { return b.aromatic; });
  if (!any) {
    for (auto& a : atoms_) a.aromatic = false;
    return;
  }
  const int n = atom_count();
  std::vector<int> used(static_cast<std::size_t>(n), 0);
  for (const auto& b : bonds_) {
    const int w = b.aromatic ? 1 : b.order;
    used[static_cast<std::size_t>(b.begin)] += w;
    used[static_cast<std::size_t>(b.end)] += w;
  }
  std::vector<bool> needs(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    const Atom& a = atoms_[static_cast<std::size_t>(i)];
    if (!a.aromatic) continue;
    const int occupied = used[static_cast<std::size_t>(i)] + a.explicit_h;
    const auto v = fitting_valence(a.atomic_number, a.formal_charge, occupied);
    if (!v) throw ValenceError("aromatic atom exceeds its valence");
    needs[static_cast<std::size_t>(i)] = *v - occupied >= 1;
  }
  std::vector<std::pair<int, int>> edges;
  std::vector<int> edge_bond;
  for (std::size_t bi = 0; bi < bonds_.size(); ++bi) {
    const auto& b = bonds_[bi];
    if (b.aromatic && needs[static_cast<std::size_t>(b.begin)] && needs[static_cast<std::size_t>(b.end)]) {
      edges.emplace_back(b.begin, b.end);
      edge_bond.push_back(static_cast<int>(bi));
    }
  }
  KekuleMatcher matcher(n, edges, needs);
  if (!matcher.solve()) throw ValenceError("cannot assign a Kekule structure to the aromatic system");
  for (auto& b : bonds_) {
    if (b.aromatic) {
      b.order = 1;
      b.aromatic = false;
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (matcher.chosen()[e]) bonds_[static_cast<std::size_t>(edge_bond[e])].order = 2;
  }
  for (auto& a : atoms_) a.aromatic = false;
}

namespace {

using Bits = std::vector<std::uint64_t>;

void flip(Bits& bits, int i) { bits[static_cast<std::size_t>(i) / 64] ^= (1ULL << (static_cast<unsigned>(i) % 64)); }
bool test(const Bits& bits, int i) { return (bits[static_cast<std::size_t>(i) / 64] >> (static_cast<unsigned>(i) % 64)) & 1ULL; }
int lowest(const Bits& bits) {
  for (std::size_t w = 0; w < bits.size(); ++w) {
    if (bits[w]) return static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits[w])));
  }
  return -1;
}

// Bridges via iterative lowlink DFS; returns per-bond cyclic flag.
std::vector<bool> cyclic_bonds(int n, const std::vector<Bond>& bonds,
                               const std::vector<std::vector<Neighbor>>& adj) {
  std::vector<bool> cyclic(bonds.size(), true);
  std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  for (int s = 0; s < n; ++s) {
    if (disc[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<Frame> stack{{s, -1, 0}};
    disc[static_cast<std::size_t>(s)] = low[static_cast<std::size_t>(s)] = timer++;
    while (!stack.empty()) {
      auto& f = stack.back();
      const auto& nbrs = adj[static_cast<std::size_t>(f.atom)];
      if (f.next < nbrs.size()) {
        const Neighbor nb = nbrs[f.next++];
        if (nb.bond == f.parent_bond) continue;
        if (disc[static_cast<std::size_t>(nb.atom)] < 0) {
          disc[static_cast<std::size_t>(nb.atom)] = low[static_cast<std::size_t>(nb.atom)] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          low[static_cast<std::size_t>(f.atom)] =
              std::min(low[static_cast<std::size_t>(f.atom)], disc[static_cast<std::size_t>(nb.atom)]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          low[static_cast<std::size_t>(parent)] =
              std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(done.atom)]);
          if (low[static_cast<std::size_t>(done.atom)] > disc[static_cast<std::size_t>(parent)]) {
            cyclic[static_cast<std::size_t>(done.parent_bond)] = false;
          }
        }
      }
    }
  }
  return cyclic;
}

int component_count(int n, const std::vector<std::vector<Neighbor>>& adj) {
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  int count = 0;
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    ++count;
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = true;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (const auto& nb : adj[static_cast<std::size_t>(a)]) {
        if (!seen[static_cast<std::size_t>(nb.atom)]) {
          seen[static_cast<std::size_t>(nb.atom)] = true;
          stack.push_back(nb.atom);
        }
      }
    }
  }
  return count;
}

struct Cycle {
  std::vector<int> atoms;
  std::vector<int> bonds;  // sorted
};

// Minimum cycle basis from shortest-path candidate cycles, selected greedily
// by size with GF(2) independence.
std::vector<std::vector<int>> find_sssr(int n, const std::vector<Bond>& bonds,
                                        const std::vector<std::vector<Neighbor>>& adj,
                                        const std::vector<bool>& cyclic) {
  const int n_cyclic_bonds = static_cast<int>(std::count(cyclic.begin(), cyclic.end(), true));
  if (n_cyclic_bonds == 0) return {};
  const int n_rings = static_cast<int>(bonds.size()) - n + component_count(n, adj);
  if (n_rings <= 0) return {};

  std::vector<bool> ring_atom(static_cast<std::size_t>(n), false);
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    if (cyclic[b]) {
      ring_atom[static_cast<std::size_t>(bonds[b].begin)] = true;
      ring_atom[static_cast<std::size_t>(bonds[b].end)] = true;
    }
  }

  std::vector<Cycle> candidates;
  std::set<std::vector<int>> seen;
  std::vector<int> dist(static_cast<std::size_t>(n)), parent(static_cast<std::size_t>(n)),
      parent_bond(static_cast<std::size_t>(n));
  std::vector<int> mark(static_cast<std::size_t>(n), -1);
  int stamp = 0;
  for (int r = 0; r < n; ++r) {
    if (!ring_atom[static_cast<std::size_t>(r)]) continue;
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(r)] = 0;
    parent[static_cast<std::size_t>(r)] = -1;
    parent_bond[static_cast<std::size_t>(r)] = -1;
    std::queue<int> q;
    q.push(r);
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (const auto& nb : adj[static_cast<std::size_t>(a)]) {
        if (!cyclic[static_cast<std::size_t>(nb.bond)]) continue;
        if (dist[static_cast<std::size_t>(nb.atom)] < 0) {
          dist[static_cast<std::size_t>(nb.atom)] = dist[static_cast<std::size_t>(a)] + 1;
          parent[static_cast<std::size_t>(nb.atom)] = a;
          parent_bond[static_cast<std::size_t>(nb.atom)] = nb.bond;
          q.push(nb.atom);
        }
      }
    }
    for (int b = 0; b < static_cast<int>(bonds.size()); ++b) {
      if (!cyclic[static_cast<std::size_t>(b)]) continue;
      const int x = bonds[static_cast<std::size_t>(b)].begin;
      const int y = bonds[static_cast<std::size_t>(b)].end;
      if (dist[static_cast<std::size_t>(x)] < 0 || dist[static_cast<std::size_t>(y)] < 0) continue;
      if (parent_bond[static_cast<std::size_t>(x)] == b || parent_bond[static_cast<std::size_t>(y)] == b) continue;
      // Paths to the root must meet only at the root.
      ++stamp;
      std::vector<int> px, py;
      for (int a = x; a != -1; a = parent[static_cast<std::size_t>(a)]) {
        px.push_back(a);
        mark[static_cast<std::size_t>(a)] = stamp;
      }
      bool disjoint = true;
      for (int a = y; a != -1; a = parent[static_cast<std::size_t>(a)]) {
        if (a != r && mark[static_cast<std::size_t>(a)] == stamp) {
          disjoint = false;
          break;
        }
        py.push_back(a);
      }
      if (!disjoint) continue;
      // px: x..r, py: y..r. Cycle atoms: r..x then y..(before r).
      Cycle c;
      for (auto it = px.rbegin(); it != px.rend(); ++it) c.atoms.push_back(*it);
      for (std::size_t k = 0; k + 1 < py.size(); ++k) c.atoms.push_back(py[k]);
      if (c.atoms.size() < 3) continue;
      for (std::size_t k = 0; k < c.atoms.size(); ++k) {
        const int a = c.atoms[k];
        const int bnext = c.atoms[(k + 1) % c.atoms.size()];
        int bi = -1;
        for (const auto& nb : adj[static_cast<std::size_t>(a)]) {
          if (nb.atom == bnext) bi = nb.bond;
        }
        c.bonds.push_back(bi);
      }
      std::sort(c.bonds.begin(), c.bonds.end());
      if (seen.insert(c.bonds).second) candidates.push_back(std::move(c));
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Cycle& a, const Cycle& b) {
    if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size();
    return a.bonds < b.bonds;
  });

  const std::size_t words = (bonds.size() + 63) / 64;
  std::vector<Bits> basis;  // reduced rows, pivot = lowest set bit
  std::vector<int> pivots;
  std::vector<std::vector<int>> rings;
  for (const auto& c : candidates) {
    Bits v(words, 0);
    for (int b : c.bonds) flip(v, b);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (test(v, pivots[k])) {
        for (std::size_t w = 0; w < words; ++w) v[w] ^= basis[k][w];
      }
    }
    const int p = lowest(v);
    if (p < 0) continue;
    // Keep the basis fully reduced on pivots.
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (test(basis[k], p)) {
        for (std::size_t w = 0; w < words; ++w) basis[k][w] ^= v[w];
      }
    }
    basis.push_back(std::move(v));
    pivots.push_back(p);
    rings.push_back(c.atoms);
    if (static_cast<int>(rings.size()) == n_rings) break;
  }
  return rings;
}

// Relevant cycles: every simple cycle that is not a GF(2) sum of strictly
// shorter cycles, i.e. the union of all minimum cycle bases. Unlike a single
// SSSR this set does not depend on atom order. Falls back to `sssr` when the
// bounded enumeration grows past kMaxCycleSteps.
std::vector<std::vector<int>> relevant_cycles(int n, const std::vector<Bond>& bonds,
                                              const std::vector<std::vector<Neighbor>>& adj,
                                              const std::vector<bool>& cyclic,
                                              const std::vector<std::vector<int>>& sssr) {
  constexpr long kMaxCycleSteps = 2000000;
  if (sssr.empty()) return {};
  std::size_t kmax = 0;
  for (const auto& r : sssr) kmax = std::max(kmax, r.size());

  std::vector<Cycle> cycles;
  std::set<std::vector<int>> seen;
  std::vector<int> path;
  std::vector<int> path_bonds;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);
  long steps = 0;
  bool overflow = false;
  std::function<void(int, int)> dfs = [&](int start, int a) {
    if (overflow) return;
    for (const auto& nb : adj[static_cast<std::size_t>(a)]) {
      if (++steps > kMaxCycleSteps) {
        overflow = true;
        return;
      }
      if (!cyclic[static_cast<std::size_t>(nb.bond)]) continue;
      if (nb.atom == start && path.size() >= 3) {
        // Each cycle is found twice, once per direction.
        if (path[1] > path.back()) continue;
        Cycle c;
        c.atoms = path;
        c.bonds = path_bonds;
        c.bonds.push_back(nb.bond);
        std::sort(c.bonds.begin(), c.bonds.end());
        if (seen.insert(c.bonds).second) cycles.push_back(std::move(c));
        continue;
      }
      if (nb.atom <= start || on_path[static_cast<std::size_t>(nb.atom)] || path.size() >= kmax) continue;
      on_path[static_cast<std::size_t>(nb.atom)] = true;
      path.push_back(nb.atom);
      path_bonds.push_back(nb.bond);
      dfs(start, nb.atom);
      path.pop_back();
      path_bonds.pop_back();
      on_path[static_cast<std::size_t>(nb.atom)] = false;
    }
  };
  for (int s = 0; s < n && !overflow; ++s) {
    path.assign(1, s);
    path_bonds.clear();
    on_path[static_cast<std::size_t>(s)] = true;
    dfs(s, s);
    on_path[static_cast<std::size_t>(s)] = false;
  }
  if (overflow) return sssr;

  std::stable_sort(cycles.begin(), cycles.end(), [](const Cycle& a, const Cycle& b) {
    if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size();
    return a.bonds < b.bonds;
  });
  const std::size_t words = (bonds.size() + 63) / 64;
  std::vector<Bits> basis;
  std::vector<int> pivots;
  std::vector<std::vector<int>> out;
  std::size_t i = 0;
  while (i < cycles.size()) {
    const std::size_t size = cycles[i].atoms.size();
    std::vector<Bits> added;
    // Independence is tested only against strictly shorter cycles.
    for (; i < cycles.size() && cycles[i].atoms.size() == size; ++i) {
      Bits v(words, 0);
      for (int b : cycles[i].bonds) flip(v, b);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        if (test(v, pivots[k])) {
          for (std::size_t w = 0; w < words; ++w) v[w] ^= basis[k][w];
        }
      }
      if (lowest(v) < 0) continue;
      out.push_back(cycles[i].atoms);
      added.push_back(std::move(v));
    }
    for (auto& v : added) {
      for (std::size_t k = 0; k < basis.size(); ++k) {
        if (test(v, pivots[k])) {
          for (std::size_t w = 0; w < words; ++w) v[w] ^= basis[k][w];
        }
      }
      const int p = lowest(v);
      if (p < 0) continue;
      for (std::size_t k = 0; k < basis.size(); ++k) {
        if (test(basis[k], p)) {
          for (std::size_t w = 0; w < words; ++w) basis[k][w] ^= v[w];
        }
      }
      basis.push_back(std::move(v));
      pivots.push_back(p);
    }
  }
  return out;
}

bool is_lone_pair_atom(const Atom& a) {
  return (a.atomic_number == 7 || a.atomic_number == 8 || a.atomic_number == 16) && a.formal_charge <= 0;
}

// Pi electrons an atom donates to the ring system `in_system`, or -1 when the
// atom cannot take part in an aromatic system.
int pi_electrons(int i, const std::vector<Atom>& atoms, const std::vector<Bond>& bonds,
                 const std::vector<std::vector<Neighbor>>& adj, const std::vector<bool>& in_system) {
  const Atom& a = atoms[static_cast<std::size_t>(i)];
  if (!can_be_aromatic(a.atomic_number)) return -1;
  const auto& nbrs = adj[static_cast<std::size_t>(i)];
  if (static_cast<int>(nbrs.size()) + a.total_h() > 3) return -1;
  int doubles = 0;
  int double_partner = -1;
  int double_bond = -1;
  for (const auto& nb : nbrs) {
    const int order = bonds[static_cast<std::size_t>(nb.bond)].order;
    if (order == 3) return -1;
    if (order == 2) {
      ++doubles;
      double_partner = nb.atom;
      double_bond = nb.bond;
    }
  }
  if (doubles > 1) return -1;
  if (doubles == 1) {
    if (in_system[static_cast<std::size_t>(double_partner)]) return 1;
    if (bonds[static_cast<std::size_t>(double_bond)].in_ring) return 1;
    const int pz = atoms[static_cast<std::size_t>(double_partner)].atomic_number;
    if (pz == 7 || pz == 8 || pz == 16) return 0;
    return -1;
  }
  const int connections = static_cast<int>(nbrs.size()) + a.total_h();
  switch (a.atomic_number) {
    case 6:
      if (a.formal_charge == -1) return 2;
      if (a.formal_charge == 1) return 0;
      return -1;
    case 7:
    case 15:
      if (a.formal_charge == 0 && connections == 3) return 2;
      if (a.formal_charge == -1) return 2;
      return -1;
    case 8:
    case 16:
      if (a.formal_charge == 0 && connections == 2) return 2;
      return -1;
    case 5:
      if (a.formal_charge == 0 && connections == 3) return 0;
      return -1;
    default:
      return -1;
  }
}

bool huckel(const std::vector<int>& system, const std::vector<Atom>& atoms, const std::vector<Bond>& bonds,
            const std::vector<std::vector<Neighbor>>& adj) {
  std::vector<bool> in_system(atoms.size(), false);
  for (int a : system) in_system[static_cast<std::size_t>(a)] = true;
  int electrons = 0;
  for (int a : system) {
    const int e = pi_electrons(a, atoms, bonds, adj, in_system);
    if (e < 0) return false;
    electrons += e;
  }
  return electrons >= 2 && (electrons - 2) % 4 == 0;
}

std::vector<int> ring_bond_indices(const std::vector<int>& ring, const std::vector<std::vector<Neighbor>>& adj) {
  std::vector<int> out;
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const int a = ring[k];
    const int b = ring[(k + 1) % ring.size()];
    for (const auto& nb : adj[static_cast<std::size_t>(a)]) {
      if (nb.atom == b) out.push_back(nb.bond);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Molecule MoleculeBuilder::build() && {
  fold_hydrogens();
  kekulize();

  Molecule m;
  m.atoms_ = std::move(atoms_);
  m.bonds_ = std::move(bonds_);
  const int n = static_cast<int>(m.atoms_.size());
  m.adjacency_.assign(static_cast<std::size_t>(n), {});
  for (int b = 0; b < static_cast<int>(m.bonds_.size()); ++b) {
    const auto& bd = m.bonds_[static_cast<std::size_t>(b)];
    m.adjacency_[static_cast<std::size_t>(bd.begin)].push_back({bd.end, b});
    m.adjacency_[static_cast<std::size_t>(bd.end)].push_back({bd.begin, b});
  }

  for (int i = 0; i < n; ++i) {
    Atom& a = m.atoms_[static_cast<std::size_t>(i)];
    a.aromatic = false;
    const int occupied = m.bond_order_sum(i) + a.explicit_h;
    if (a.no_implicit) {
      a.implicit_h = 0;
      const auto allowed = allowed_valences(a.atomic_number, a.formal_charge);
      const int cap = allowed.empty() ? 0 : allowed.back();
      if (occupied > cap) {
        throw ValenceError(std::string("valence exceeded on ") + std::string(element_symbol(a.atomic_number)) +
                           " atom " + std::to_string(i));
      }
    } else {
      const auto v = fitting_valence(a.atomic_number, a.formal_charge, occupied);
      if (!v) {
        throw ValenceError(std::string("valence exceeded on ") + std::string(element_symbol(a.atomic_number)) +
                           " atom " + std::to_string(i));
      }
      a.implicit_h = *v - occupied;
    }
  }

  const auto cyclic = cyclic_bonds(n, m.bonds_, m.adjacency_);
  m.rings_ = relevant_cycles(n, m.bonds_, m.adjacency_, cyclic, find_sssr(n, m.bonds_, m.adjacency_, cyclic));
  m.atom_ring_count_.assign(static_cast<std::size_t>(n), 0);
  for (auto& b : m.bonds_) b.in_ring = false;
  for (const auto& r : m.rings_) {
    for (int a : r) {
      ++m.atom_ring_count_[static_cast<std::size_t>(a)];
      m.atoms_[static_cast<std::size_t>(a)].in_ring = true;
    }
    for (int b : ring_bond_indices(r, m.adjacency_)) m.bonds_[static_cast<std::size_t>(b)].in_ring = true;
  }

  // Aromaticity: single rings first, then fused pairs sharing one bond.
  std::vector<std::vector<int>> ring_bonds;
  for (const auto& r : m.rings_) ring_bonds.push_back(ring_bond_indices(r, m.adjacency_));
  std::vector<bool> ring_aromatic(m.rings_.size(), false);
  auto mark_system = [&](const std::vector<int>& atoms, const std::vector<int>& bonds) {
    for (int a : atoms) m.atoms_[static_cast<std::size_t>(a)].aromatic = true;
    for (int b : bonds) m.bonds_[static_cast<std::size_t>(b)].aromatic = true;
  };
  for (std::size_t r = 0; r < m.rings_.size(); ++r) {
    if (huckel(m.rings_[r], m.atoms_, m.bonds_, m.adjacency_)) ring_aromatic[r] = true;
  }
  for (std::size_t r1 = 0; r1 < m.rings_.size(); ++r1) {
    for (std::size_t r2 = r1 + 1; r2 < m.rings_.size(); ++r2) {
      if (ring_aromatic[r1] && ring_aromatic[r2]) continue;
      std::vector<int> shared;
      std::set_intersection(ring_bonds[r1].begin(), ring_bonds[r1].end(), ring_bonds[r2].begin(),
                            ring_bonds[r2].end(), std::back_inserter(shared));
      if (shared.size() != 1) continue;
      std::vector<int> atoms = m.rings_[r1];
      for (int a : m.rings_[r2]) {
        if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);
      }
      if (huckel(atoms, m.atoms_, m.bonds_, m.adjacency_)) {
        std::vector<int> bonds = ring_bonds[r1];
        bonds.insert(bonds.end(), ring_bonds[r2].begin(), ring_bonds[r2].end());
        mark_system(atoms, bonds);
      }
    }
  }
  for (std::size_t r = 0; r < m.rings_.size(); ++r) {
    if (ring_aromatic[r]) mark_system(m.rings_[r], ring_bonds[r]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Perception

bool is_conjugated(const Molecule& m, int bond) {
  const Bond& b = m.bond(bond);
  if (b.aromatic || b.order >= 2) return true;
  auto qualifies = [&](int i) {
    const Atom& a = m.atom(i);
    if (a.aromatic) return true;
    if (is_lone_pair_atom(a)) return true;
    for (const auto& nb : m.neighbors(i)) {
      if (m.bond(nb.bond).order >= 2) return true;
    }
    return false;
  };
  return qualifies(b.begin) && qualifies(b.end);
}

PerceptionReport perceive(const Molecule& m) {
  PerceptionReport r;
  const auto& rings = m.rings();
  // Size of a minimum cycle basis; rings() can hold more equivalent rings.
  std::vector<std::vector<Neighbor>> adj;
  for (int i = 0; i < m.atom_count(); ++i) adj.emplace_back(m.neighbors(i).begin(), m.neighbors(i).end());
  r.n_rings = m.bond_count() - m.atom_count() + component_count(m.atom_count(), adj);
  if (!rings.empty()) {
    r.max_ring_size = 0;
    r.min_ring_size = 1 << 30;
    for (const auto& ring : rings) {
      r.max_ring_size = std::max(r.max_ring_size, static_cast<int>(ring.size()));
      r.min_ring_size = std::min(r.min_ring_size, static_cast<int>(ring.size()));
    }
  }

  std::vector<std::vector<int>> ring_bonds;
  std::vector<std::vector<int>> ring_atoms;
  for (const auto& ring : rings) {
    std::vector<int> bonds;
    for (std::size_t k = 0; k < ring.size(); ++k) bonds.push_back(m.bond_between(ring[k], ring[(k + 1) % ring.size()]));
    std::sort(bonds.begin(), bonds.end());
    ring_bonds.push_back(std::move(bonds));
    std::vector<int> atoms = ring;
    std::sort(atoms.begin(), atoms.end());
    ring_atoms.push_back(std::move(atoms));
  }
  std::set<int> bridgeheads;
  std::set<int> spiro;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    for (std::size_t j = i + 1; j < rings.size(); ++j) {
      std::vector<int> shared_bonds;
      std::set_intersection(ring_bonds[i].begin(), ring_bonds[i].end(), ring_bonds[j].begin(),
                            ring_bonds[j].end(), std::back_inserter(shared_bonds));
      if (shared_bonds.size() > 1) {
        // Endpoints of the shared path are the bridgeheads.
        std::map<int, int> seen;
        for (int b : shared_bonds) {
          ++seen[m.bond(b).begin];
          ++seen[m.bond(b).end];
        }
        for (const auto& [a, count] : seen) {
          if (count == 1) bridgeheads.insert(a);
        }
      } else if (shared_bonds.empty()) {
        std::vector<int> shared_atoms;
        std::set_intersection(ring_atoms[i].begin(), ring_atoms[i].end(), ring_atoms[j].begin(),
                              ring_atoms[j].end(), std::back_inserter(shared_atoms));
        if (shared_atoms.size() == 1) spiro.insert(shared_atoms.front());
      }
    }
  }
  r.n_bridgehead = static_cast<int>(bridgeheads.size());
  r.n_spiro = static_cast<int>(spiro.size());

  int heavy = 0;
  int aromatic = 0;
  for (const auto& a : m.atoms()) {
    if (a.atomic_number == 1) continue;
    ++heavy;
    if (a.aromatic) ++aromatic;
  }
  r.aromatic_fraction = heavy > 0 ? static_cast<double>(aromatic) / heavy : 0.0;

  int heavy_bonds = 0;
  int conjugated = 0;
  for (int b = 0; b < m.bond_count(); ++b) {
    const auto& bd = m.bond(b);
    if (m.atom(bd.begin).atomic_number == 1 || m.atom(bd.end).atomic_number == 1) continue;
    ++heavy_bonds;
    if (is_conjugated(m, b)) ++conjugated;
  }
  r.conjugated_bond_fraction = heavy_bonds > 0 ? static_cast<double>(conjugated) / heavy_bonds : 0.0;
  return r;
}

}  // namespace tartarus::mol
