// SPDX-License-Identifier: Apache-2.0
#include "tartarus/molgraph/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include "tartarus/molgraph/elements.hpp"
#include "tartarus/util/rng.hpp"

namespace tartarus::mol {
namespace {

struct PendingBond {
  int order = 1;
  bool aromatic = false;
  bool explicit_symbol = false;
  char stereo = 0;
};

struct RingOpen {
  int atom;
  PendingBond bond;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Molecule run() {
    if (text_.empty()) throw SyntaxError("empty SMILES");
    int prev = -1;
    std::vector<int> branch_stack;
    std::optional<PendingBond> pending;
    bool expect_atom = true;  // start of string or after '.'
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev < 0 || pending) fail("branch must follow an atom");
        branch_stack.push_back(prev);
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == ')') fail("empty branch");
        continue;
      }
      if (c == ')') {
        if (branch_stack.empty()) fail("unmatched ')'");
        if (pending) fail("bond without a following atom");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos_;
        continue;
      }
      if (c == '.') {
        if (pending || prev < 0 || !branch_stack.empty()) fail("misplaced '.'");
        prev = -1;
        expect_atom = true;
        ++pos_;
        continue;
      }
      if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\' || c == '$') {
        if (pending) fail("two consecutive bond symbols");
        if (prev < 0) fail("bond must follow an atom");
        pending = parse_bond();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring closure must follow an atom");
        const int number = parse_ring_number();
        ring_closure(prev, number, pending);
        pending.reset();
        continue;
      }
      const int atom = parse_atom();
      if (prev >= 0) {
        add_chain_bond(prev, atom, pending);
      } else if (pending) {
        fail("bond must follow an atom");
      }
      pending.reset();
      prev = atom;
      expect_atom = false;
    }
    if (pending) fail("SMILES ends with a bond");
    if (!branch_stack.empty()) fail("unclosed branch");
    if (!open_rings_.empty()) fail("unclosed ring bond " + std::to_string(open_rings_.begin()->first));
    if (expect_atom) fail("SMILES ends with '.'");
    demote_acyclic_aromatic_bonds();
    return std::move(builder_).build();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(what + " at position " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  PendingBond parse_bond() {
    PendingBond b;
    b.explicit_symbol = true;
    switch (text_[pos_]) {
      case '-': b.order = 1; break;
      case '=': b.order = 2; break;
      case '#': b.order = 3; break;
      case ':': b.aromatic = true; break;
      case '/':
      case '\\': b.stereo = text_[pos_]; break;
      default: fail("quadruple bonds are not supported");
    }
    ++pos_;
    return b;
  }

  int parse_ring_number() {
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
        fail("malformed %nn ring closure");
      }
      const int n = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
      return n;
    }
    return text_[pos_++] - '0';
  }

  void ring_closure(int atom, int number, const std::optional<PendingBond>& bond) {
    auto it = open_rings_.find(number);
    if (it == open_rings_.end()) {
      open_rings_[number] = RingOpen{atom, bond.value_or(PendingBond{})};
      return;
    }
    const RingOpen open = it->second;
    open_rings_.erase(it);
    PendingBond b = open.bond;
    if (bond && bond->explicit_symbol) {
      if (b.explicit_symbol && (b.order != bond->order || b.aromatic != bond->aromatic)) {
        fail("conflicting ring closure bond symbols");
      }
      b = *bond;
    }
    if (open.atom == atom) fail("ring closure to the same atom");
    if (builder_.has_bond(open.atom, atom)) fail("ring closure duplicates an existing bond");
    add_bond(open.atom, atom, b);
  }

  void add_chain_bond(int a, int b, const std::optional<PendingBond>& bond) {
    add_bond(a, b, bond.value_or(PendingBond{}));
  }

  void add_bond(int a, int b, const PendingBond& pb) {
    bool aromatic = pb.aromatic;
    bool implicit_aromatic = false;
    if (!pb.explicit_symbol || (pb.stereo && pb.order == 1)) {
      if (!pb.explicit_symbol && builder_.atom(a).aromatic && builder_.atom(b).aromatic) {
        aromatic = true;
        implicit_aromatic = true;
      }
    }
    if (aromatic && !(builder_.atom(a).aromatic && builder_.atom(b).aromatic)) {
      fail("aromatic bond between non-aromatic atoms");
    }
    const int idx = builder_.add_bond(a, b, pb.order, aromatic, pb.stereo);
    if (implicit_aromatic) implicit_aromatic_bonds_.push_back(idx);
  }

  // An unmarked bond between two aromatic atoms outside any ring is single.
  void demote_acyclic_aromatic_bonds() {
    if (implicit_aromatic_bonds_.empty()) return;
    const int n = builder_.atom_count();
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < builder_.bond_count(); ++i) {
      const auto& b = builder_.bond(i);
      adj[static_cast<std::size_t>(b.begin)].push_back({b.end, i});
      adj[static_cast<std::size_t>(b.end)].push_back({b.begin, i});
    }
    for (int bi : implicit_aromatic_bonds_) {
      auto& bond = builder_.bond(bi);
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      std::vector<int> stack{bond.begin};
      seen[static_cast<std::size_t>(bond.begin)] = true;
      bool reached = false;
      while (!stack.empty() && !reached) {
        const int x = stack.back();
        stack.pop_back();
        for (const auto& [y, e] : adj[static_cast<std::size_t>(x)]) {
          if (e == bi || seen[static_cast<std::size_t>(y)]) continue;
          if (y == bond.end) {
            reached = true;
            break;
          }
          seen[static_cast<std::size_t>(y)] = true;
          stack.push_back(y);
        }
      }
      if (!reached) bond.aromatic = false;
    }
  }

  int parse_atom() {
    Atom atom;
    const char c = text_[pos_];
    if (c == '[') {
      parse_bracket_atom(atom);
    } else if (c == '*') {
      fail("wildcard atoms are not supported in molecules");
    } else {
      std::string symbol(1, c);
      if ((c == 'C' && peek(1) == 'l') || (c == 'B' && peek(1) == 'r')) symbol += text_[pos_ + 1];
      if (std::islower(static_cast<unsigned char>(c))) {
        const std::string upper(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        const auto z = atomic_number_of(upper);
        if (!z || !is_organic_subset(*z) || !can_be_aromatic(*z)) fail("unknown atom '" + symbol + "'");
        atom.atomic_number = *z;
        atom.aromatic = true;
      } else {
        const auto z = atomic_number_of(symbol);
        if (!z || !is_organic_subset(*z)) {
          if (std::isalpha(static_cast<unsigned char>(c))) {
            throw UnsupportedElement("unsupported organic-subset atom '" + symbol + "'");
          }
          fail(std::string("unexpected character '") + c + "'");
        }
        atom.atomic_number = *z;
      }
      pos_ += symbol.size();
    }
    const int idx = builder_.add_atom(atom);
    return idx;
  }

  char peek(std::size_t k) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  int read_number() {
    int v = 0;
    bool any = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 999) fail("number too large");
      any = true;
      ++pos_;
    }
    return any ? v : -1;
  }

  void parse_bracket_atom(Atom& atom) {
    ++pos_;  // '['
    read_number();  // isotope, ignored
    if (pos_ >= text_.size()) fail("unterminated bracket atom");
    std::string symbol;
    const char c = text_[pos_];
    if (c == '*') fail("wildcard atoms are not supported in molecules");
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("missing element symbol");
    if (std::islower(static_cast<unsigned char>(c))) {
      symbol = std::string(1, c);
      if (std::islower(static_cast<unsigned char>(peek(1))) && peek(1) != 'h') {
        symbol += peek(1);  // 'se', 'as'
      }
      pos_ += symbol.size();
      std::string upper = symbol;
      upper[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(upper[0])));
      const auto z = atomic_number_of(upper);
      if (!z || !can_be_aromatic(*z)) throw UnsupportedElement("unsupported aromatic atom '" + symbol + "'");
      atom.atomic_number = *z;
      atom.aromatic = true;
    } else {
      symbol = std::string(1, c);
      if (std::islower(static_cast<unsigned char>(peek(1)))) {
        const std::string two = symbol + peek(1);
        // Prefer a two-letter element; otherwise the lowercase letter starts H/charge.
        if (atomic_number_of(two) || (peek(1) != 'H' && std::isalpha(static_cast<unsigned char>(peek(1))))) {
          symbol = two;
        }
      }
      pos_ += symbol.size();
      const auto z = atomic_number_of(symbol);
      if (!z) throw UnsupportedElement("unsupported element '" + symbol + "'");
      atom.atomic_number = *z;
    }
    // Chirality.
    if (peek(0) == '@') {
      ++pos_;
      atom.chirality = Chirality::CounterClockwise;
      if (peek(0) == '@') {
        ++pos_;
        atom.chirality = Chirality::Clockwise;
      }
      while (std::isalnum(static_cast<unsigned char>(peek(0))) && peek(0) != 'H') ++pos_;
    }
    if (peek(0) == 'H') {
      ++pos_;
      const int n = read_number();
      atom.explicit_h = n < 0 ? 1 : n;
    }
    if (peek(0) == '+' || peek(0) == '-') {
      const char sign = text_[pos_++];
      int magnitude = 1;
      const int n = read_number();
      if (n >= 0) {
        magnitude = n;
      } else {
        while (peek(0) == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      atom.formal_charge = sign == '+' ? magnitude : -magnitude;
    }
    if (peek(0) == ':') {
      ++pos_;
      if (read_number() < 0) fail("missing atom class");
    }
    if (peek(0) != ']') fail("malformed bracket atom");
    ++pos_;
    atom.no_implicit = true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  MoleculeBuilder builder_;
  std::map<int, RingOpen> open_rings_;
  std::vector<int> implicit_aromatic_bonds_;
};

// ---------------------------------------------------------------------------
// Writer

struct WriteState {
  const Molecule& m;
  const std::vector<int>& priority;
  const WriterOptions& options;
  std::vector<int> order;        // visit order index per atom
  std::vector<int> parent_bond;  // tree bond into each atom
  std::vector<std::vector<int>> children;
  // Ring closure bonds per atom, as (bond, partner) pairs in emission order.
  std::vector<std::vector<std::pair<int, int>>> closures;
  std::vector<int> ring_digit;  // per bond, assigned when opened
  std::vector<bool> digit_used;
  std::string out;
};

std::vector<Neighbor> sorted_neighbors(const WriteState& s, int atom) {
  std::vector<Neighbor> nbrs(s.m.neighbors(atom).begin(), s.m.neighbors(atom).end());
  std::sort(nbrs.begin(), nbrs.end(), [&](const Neighbor& a, const Neighbor& b) {
    return s.priority[static_cast<std::size_t>(a.atom)] < s.priority[static_cast<std::size_t>(b.atom)];
  });
  return nbrs;
}

void build_tree(WriteState& s, int root, int& counter) {
  struct Frame {
    int atom;
    std::vector<Neighbor> nbrs;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  s.order[static_cast<std::size_t>(root)] = counter++;
  stack.push_back({root, sorted_neighbors(s, root)});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next >= f.nbrs.size()) {
      stack.pop_back();
      continue;
    }
    const Neighbor nb = f.nbrs[f.next++];
    if (nb.bond == s.parent_bond[static_cast<std::size_t>(f.atom)]) continue;
    if (s.order[static_cast<std::size_t>(nb.atom)] < 0) {
      s.order[static_cast<std::size_t>(nb.atom)] = counter++;
      s.parent_bond[static_cast<std::size_t>(nb.atom)] = nb.bond;
      s.children[static_cast<std::size_t>(f.atom)].push_back(nb.atom);
      const int child = nb.atom;
      stack.push_back({child, sorted_neighbors(s, child)});
    } else if (s.order[static_cast<std::size_t>(nb.atom)] < s.order[static_cast<std::size_t>(f.atom)]) {
      // Back edge to an ancestor: opened at the ancestor, closed here.
      const int a = nb.atom;
      auto& ca = s.closures[static_cast<std::size_t>(a)];
      auto& cf = s.closures[static_cast<std::size_t>(f.atom)];
      if (std::none_of(cf.begin(), cf.end(), [&](const auto& p) { return p.first == nb.bond; })) {
        ca.push_back({nb.bond, f.atom});
        cf.push_back({nb.bond, a});
      }
    }
  }
}

std::string bond_symbol(const WriteState& s, int bond) {
  const Bond& b = s.m.bond(bond);
  if (!s.options.kekule) {
    if (b.aromatic) return ":";
    return b.order == 1 ? "-" : (b.order == 2 ? "=" : "#");
  }
  return b.order == 1 ? "" : (b.order == 2 ? "=" : "#");
}

void write_atom(WriteState& s, int i) {
  const Atom& a = s.m.atom(i);
  const bool lower = !s.options.kekule && a.aromatic;
  std::string symbol(element_symbol(a.atomic_number));
  if (lower) symbol[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(symbol[0])));
  bool bracket = s.options.always_bracket || a.formal_charge != 0 || !is_organic_subset(a.atomic_number);
  if (!bracket) {
    const int bond_sum = s.m.bond_order_sum(i);
    const auto v = fitting_valence(a.atomic_number, 0, bond_sum);
    const int fill = v ? *v - bond_sum : -1;
    if (fill != a.total_h()) bracket = true;
    if (lower) bracket = true;
  }
  if (!bracket) {
    s.out += symbol;
    return;
  }
  s.out += '[';
  s.out += symbol;
  const int h = a.total_h();
  if (h > 0) {
    s.out += 'H';
    if (h > 1) s.out += std::to_string(h);
  }
  if (a.formal_charge != 0) {
    s.out += a.formal_charge > 0 ? '+' : '-';
    if (std::abs(a.formal_charge) > 1) s.out += std::to_string(std::abs(a.formal_charge));
  }
  s.out += ']';
}

void write_digit(std::string& out, int d) {
  if (d < 10) {
    out += static_cast<char>('0' + d);
  } else {
    out += '%';
    out += std::to_string(d);
  }
}

void emit(WriteState& s, int root) {
  struct Frame {
    int atom;
    std::size_t next_child = 0;
    bool closed_branch = false;
  };
  std::vector<Frame> stack;
  auto open_atom = [&](int atom) {
    write_atom(s, atom);
    std::vector<int> freed;
    for (const auto& [bond, partner] : s.closures[static_cast<std::size_t>(atom)]) {
      int& digit = s.ring_digit[static_cast<std::size_t>(bond)];
      if (digit >= 0) {
        s.out += bond_symbol(s, bond);
        write_digit(s.out, digit);
        freed.push_back(digit);
      } else {
        int d = 1;
        while (d < static_cast<int>(s.digit_used.size()) && s.digit_used[static_cast<std::size_t>(d)]) ++d;
        if (d >= static_cast<int>(s.digit_used.size())) s.digit_used.resize(static_cast<std::size_t>(d) + 1, false);
        s.digit_used[static_cast<std::size_t>(d)] = true;
        digit = d;
        s.out += bond_symbol(s, bond);
        write_digit(s.out, d);
      }
    }
    for (int d : freed) s.digit_used[static_cast<std::size_t>(d)] = false;
    stack.push_back({atom});
  };
  open_atom(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& kids = s.children[static_cast<std::size_t>(f.atom)];
    if (f.next_child >= kids.size()) {
      const bool branch = f.closed_branch;
      stack.pop_back();
      if (branch) s.out += ')';
      continue;
    }
    const int child = kids[f.next_child++];
    const bool is_last = f.next_child == kids.size();
    if (!is_last) s.out += '(';
    s.out += bond_symbol(s, s.parent_bond[static_cast<std::size_t>(child)]);
    open_atom(child);
    stack.back().closed_branch = !is_last;
  }
}

}  // namespace

Molecule parse_smiles(std::string_view text) {
  Parser p(text);
  return p.run();
}

std::string write_smiles_ordered(const Molecule& m, const std::vector<int>& priority, const WriterOptions& options) {
  const int n = m.atom_count();
  WriteState s{m, priority, options, {}, {}, {}, {}, {}, {}, {}};
  s.order.assign(static_cast<std::size_t>(n), -1);
  s.parent_bond.assign(static_cast<std::size_t>(n), -1);
  s.children.assign(static_cast<std::size_t>(n), {});
  s.closures.assign(static_cast<std::size_t>(n), {});
  s.ring_digit.assign(static_cast<std::size_t>(m.bond_count()), -1);
  s.digit_used.assign(10, false);

  std::vector<int> atoms(static_cast<std::size_t>(n));
  std::iota(atoms.begin(), atoms.end(), 0);
  std::sort(atoms.begin(), atoms.end(), [&](int a, int b) {
    return priority[static_cast<std::size_t>(a)] < priority[static_cast<std::size_t>(b)];
  });
  int counter = 0;
  std::vector<int> roots;
  for (int a : atoms) {
    if (s.order[static_cast<std::size_t>(a)] >= 0) continue;
    roots.push_back(a);
    build_tree(s, a, counter);
  }
  // Order each atom's ring closures by the partner's visit order so that
  // digits are opened and closed consistently.
  for (int a = 0; a < n; ++a) {
    auto& c = s.closures[static_cast<std::size_t>(a)];
    std::sort(c.begin(), c.end(), [&](const auto& x, const auto& y) {
      return s.order[static_cast<std::size_t>(x.second)] < s.order[static_cast<std::size_t>(y.second)];
    });
  }
  for (std::size_t r = 0; r < roots.size(); ++r) {
    if (r > 0) s.out += '.';
    emit(s, roots[r]);
  }
  return s.out;
}

std::string write_smiles(const Molecule& m) {
  std::vector<int> priority(static_cast<std::size_t>(m.atom_count()));
  std::iota(priority.begin(), priority.end(), 0);
  return write_smiles_ordered(m, priority);
}

std::vector<std::string> randomized_smiles(const Molecule& m, int n, std::uint64_t rng_seed) {
  util::Rng rng(rng_seed);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  std::vector<int> priority(static_cast<std::size_t>(m.atom_count()));
  for (int k = 0; k < n; ++k) {
    std::iota(priority.begin(), priority.end(), 0);
    util::shuffle(priority, rng);
    out.push_back(write_smiles_ordered(m, priority));
  }
  return out;
}

}  // namespace tartarus::mol
