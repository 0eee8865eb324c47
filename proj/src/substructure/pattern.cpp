// SPDX-License-Identifier: Apache-2.0
#include "tartarus/substructure/pattern.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <string>

#include "tartarus/molgraph/elements.hpp"

namespace tartarus::substructure {
namespace {

class Compiler {
 public:
  Compiler(std::string_view text, const CompileOptions& options) : text_(text), options_(options) {}

  void run(std::vector<AtomExpr>& atoms, std::vector<QueryBond>& bonds) {
    if (text_.empty()) fail("empty pattern");
    int prev = -1;
    std::vector<int> branches;
    std::optional<BondExpr> pending;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev < 0 || pending) fail("branch must follow an atom");
        branches.push_back(prev);
        ++pos_;
        continue;
      }
      if (c == ')') {
        if (branches.empty() || pending) fail("unbalanced ')'");
        prev = branches.back();
        branches.pop_back();
        ++pos_;
        continue;
      }
      if (c == '.') unsupported("component separator '.'");
      if (c == '>') unsupported("reaction arrows");
      if (is_bond_start(c)) {
        if (prev < 0 || pending) fail("misplaced bond");
        pending = parse_bond_expr();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring closure must follow an atom");
        int number;
        if (c == '%') {
          if (pos_ + 2 >= text_.size()) fail("malformed %nn");
          number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
          pos_ += 3;
        } else {
          number = c - '0';
          ++pos_;
        }
        auto it = open_.find(number);
        if (it == open_.end()) {
          open_[number] = {prev, pending};
        } else {
          BondExpr e = pending ? *pending : (it->second.second ? *it->second.second : default_bond());
          if (it->second.first == prev) fail("ring closure to the same atom");
          bonds.push_back({it->second.first, prev, std::move(e)});
          open_.erase(it);
        }
        pending.reset();
        continue;
      }
      atoms.push_back(parse_atom());
      const int cur = static_cast<int>(atoms.size()) - 1;
      if (prev >= 0) {
        bonds.push_back({prev, cur, pending ? *pending : default_bond()});
      } else if (pending) {
        fail("bond must follow an atom");
      }
      pending.reset();
      prev = cur;
    }
    if (pending) fail("pattern ends with a bond");
    if (!branches.empty()) fail("unclosed branch");
    if (!open_.empty()) fail("unclosed ring closure");
  }

  bool explicit_h = false;

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw PatternSyntaxError(what + " at position " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedPatternFeature("unsupported pattern feature: " + what + " in '" + std::string(text_) + "'");
  }

  char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  static bool is_bond_start(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~' || c == '@' || c == '!' || c == '/' ||
           c == '\\';
  }

  static BondExpr default_bond() {
    BondExpr e;
    e.primitive = BondPrimitive::Default;
    return e;
  }

  static AtomExpr leaf(AtomPrimitive p, int value = 0, bool aromatic = false) {
    AtomExpr e;
    e.primitive = p;
    e.value = value;
    e.aromatic = aromatic;
    return e;
  }

  template <class E>
  static E combine(typename E::Op op, std::vector<E> children) {
    if (children.size() == 1) return std::move(children.front());
    E e;
    e.op = op;
    e.children = std::move(children);
    return e;
  }

  int read_number(int fallback) {
    int v = 0;
    bool any = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (text_[pos_] - '0');
      ++pos_;
      any = true;
    }
    return any ? v : fallback;
  }

  // ---- bonds

  BondExpr parse_bond_expr() {
    std::vector<BondExpr> terms{parse_bond_or()};
    while (peek() == ';') {
      ++pos_;
      terms.push_back(parse_bond_or());
    }
    return combine(BondExpr::Op::And, std::move(terms));
  }

  BondExpr parse_bond_or() {
    std::vector<BondExpr> terms{parse_bond_and()};
    while (peek() == ',') {
      ++pos_;
      terms.push_back(parse_bond_and());
    }
    return combine(BondExpr::Op::Or, std::move(terms));
  }

  BondExpr parse_bond_and() {
    std::vector<BondExpr> terms{parse_bond_unary()};
    while (true) {
      if (peek() == '&') {
        ++pos_;
        terms.push_back(parse_bond_unary());
      } else if (is_bond_start(peek())) {
        terms.push_back(parse_bond_unary());
      } else {
        break;
      }
    }
    return combine(BondExpr::Op::And, std::move(terms));
  }

  BondExpr parse_bond_unary() {
    if (peek() == '!') {
      ++pos_;
      BondExpr e;
      e.op = BondExpr::Op::Not;
      e.children.push_back(parse_bond_unary());
      return e;
    }
    BondExpr e;
    switch (peek()) {
      case '-': e.primitive = BondPrimitive::Single; break;
      case '=': e.primitive = BondPrimitive::Double; break;
      case '#': e.primitive = BondPrimitive::Triple; break;
      case ':': e.primitive = BondPrimitive::Aromatic; break;
      case '~': e.primitive = BondPrimitive::Any; break;
      case '@': e.primitive = BondPrimitive::Ring; break;
      case '/':
      case '\\':
        if (!options_.strip_stereo) unsupported("directional bond");
        e.primitive = BondPrimitive::Default;
        break;
      default: fail("expected a bond primitive");
    }
    ++pos_;
    return e;
  }

  // ---- atoms

  AtomExpr parse_atom() {
    const char c = peek();
    if (c == '[') {
      ++pos_;
      bracket_start_ = pos_;
      AtomExpr e = parse_atom_low();
      if (peek() != ']') fail("unterminated bracket atom");
      ++pos_;
      return e;
    }
    if (c == '*') {
      ++pos_;
      return leaf(AtomPrimitive::Any);
    }
    if (c == 'a') {
      ++pos_;
      return leaf(AtomPrimitive::Aromatic);
    }
    if (c == 'A') {
      ++pos_;
      return leaf(AtomPrimitive::Aliphatic);
    }
    if (c == '$') unsupported("recursive SMARTS");
    if ((c == 'C' && peek(1) == 'l') || (c == 'B' && peek(1) == 'r')) {
      pos_ += 2;
      return leaf(AtomPrimitive::Element, c == 'C' ? 17 : 35, false);
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      const auto z = mol::atomic_number_of(std::string(1, c));
      if (!z || !mol::is_organic_subset(*z)) fail(std::string("unknown atom '") + c + "'");
      ++pos_;
      return leaf(AtomPrimitive::Element, *z, false);
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      const auto z = mol::atomic_number_of(std::string(1, static_cast<char>(std::toupper(c))));
      if (!z || !mol::can_be_aromatic(*z)) fail(std::string("unknown aromatic atom '") + c + "'");
      ++pos_;
      return leaf(AtomPrimitive::Element, *z, true);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  AtomExpr parse_atom_low() {
    std::vector<AtomExpr> terms{parse_atom_or()};
    while (peek() == ';') {
      ++pos_;
      terms.push_back(parse_atom_or());
    }
    return combine(AtomExpr::Op::And, std::move(terms));
  }

  AtomExpr parse_atom_or() {
    std::vector<AtomExpr> terms{parse_atom_and()};
    while (peek() == ',') {
      ++pos_;
      terms.push_back(parse_atom_and());
    }
    return combine(AtomExpr::Op::Or, std::move(terms));
  }

  AtomExpr parse_atom_and() {
    std::vector<AtomExpr> terms{parse_atom_unary()};
    while (true) {
      const char c = peek();
      if (c == '&') {
        ++pos_;
        terms.push_back(parse_atom_unary());
      } else if (c != ']' && c != ',' && c != ';' && c != '\0') {
        terms.push_back(parse_atom_unary());
      } else {
        break;
      }
    }
    return combine(AtomExpr::Op::And, std::move(terms));
  }

  AtomExpr parse_atom_unary() {
    if (peek() == '!') {
      ++pos_;
      AtomExpr e;
      e.op = AtomExpr::Op::Not;
      e.children.push_back(parse_atom_unary());
      return e;
    }
    return parse_atom_primitive();
  }

  AtomExpr parse_atom_primitive() {
    const char c = peek();
    if (c == '\0') fail("unterminated bracket atom");
    if (c == '$') unsupported("recursive SMARTS");
    if (c == '*') {
      ++pos_;
      return leaf(AtomPrimitive::Any);
    }
    if (c == '@') {
      if (!options_.strip_stereo) unsupported("chirality '@'");
      while (peek() == '@') ++pos_;
      return leaf(AtomPrimitive::Any);
    }
    if (c == '#') {
      ++pos_;
      const int z = read_number(-1);
      if (z < 0) fail("'#' needs an atomic number");
      if (z == 1) explicit_h = true;
      return leaf(AtomPrimitive::AtomicNum, z);
    }
    if (c == '+' || c == '-') {
      ++pos_;
      int magnitude = read_number(-1);
      if (magnitude < 0) {
        magnitude = 1;
        while (peek() == c) {
          ++magnitude;
          ++pos_;
        }
      }
      return leaf(AtomPrimitive::Charge, c == '+' ? magnitude : -magnitude);
    }
    if (c == ':') {
      ++pos_;
      if (read_number(-1) < 0) fail("missing atom map number");
      return leaf(AtomPrimitive::Any);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) unsupported("isotope labels");
    if (c == 'H') {
      // A leading H that is not followed by a count names the hydrogen atom.
      const char next = peek(1);
      const bool at_start = pos_ == bracket_start_;
      if (at_start && (next == ']' || next == '+' || next == '-' || next == ';' || next == ',' || next == '&')) {
        ++pos_;
        explicit_h = true;
        return leaf(AtomPrimitive::Element, 1, false);
      }
      ++pos_;
      return leaf(AtomPrimitive::HCount, read_number(1));
    }
    if (c == 'R') {
      ++pos_;
      const int n = read_number(-1);
      return n < 0 ? leaf(AtomPrimitive::InRing) : leaf(AtomPrimitive::RingCount, n);
    }
    if (c == 'r') {
      ++pos_;
      const int n = read_number(-1);
      return n < 0 ? leaf(AtomPrimitive::InRing) : leaf(AtomPrimitive::RingSize, n);
    }
    if (c == 'X') {
      ++pos_;
      return leaf(AtomPrimitive::Connect, read_number(1));
    }
    if (c == 'D') {
      ++pos_;
      return leaf(AtomPrimitive::Degree, read_number(1));
    }
    if (c == 'a') {
      ++pos_;
      return leaf(AtomPrimitive::Aromatic);
    }
    if (c == 'A') {
      ++pos_;
      return leaf(AtomPrimitive::Aliphatic);
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (std::islower(static_cast<unsigned char>(peek(1)))) {
        const std::string two{c, peek(1)};
        if (const auto z = mol::atomic_number_of(two)) {
          pos_ += 2;
          return leaf(AtomPrimitive::Element, *z, false);
        }
      }
      const auto z = mol::atomic_number_of(std::string(1, c));
      if (!z) unsupported(std::string("element or primitive '") + c + "'");
      ++pos_;
      return leaf(AtomPrimitive::Element, *z, false);
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      const auto z = mol::atomic_number_of(std::string(1, static_cast<char>(std::toupper(c))));
      if (!z || !mol::can_be_aromatic(*z)) unsupported(std::string("primitive '") + c + "'");
      ++pos_;
      return leaf(AtomPrimitive::Element, *z, true);
    }
    unsupported(std::string("primitive '") + c + "'");
  }

  std::string_view text_;
  const CompileOptions& options_;
  std::size_t pos_ = 0;
  std::size_t bracket_start_ = 0;
  std::map<int, std::pair<int, std::optional<BondExpr>>> open_;
};

}  // namespace

Pattern compile_pattern(std::string_view text, const CompileOptions& options) {
  Pattern p;
  p.text_ = std::string(text);
  Compiler c(text, options);
  c.run(p.atoms_, p.bonds_);
  p.explicit_h_ = c.explicit_h;
  // Connectivity: branches and ring closures cannot split a pattern, so the
  // graph is connected by construction.
  return p;
}

bool atom_matches(const AtomExpr& e, const mol::Molecule& m, int i) {
  switch (e.op) {
    case AtomExpr::Op::Not:
      return !atom_matches(e.children.front(), m, i);
    case AtomExpr::Op::And:
      for (const auto& c : e.children) {
        if (!atom_matches(c, m, i)) return false;
      }
      return true;
    case AtomExpr::Op::Or:
      for (const auto& c : e.children) {
        if (atom_matches(c, m, i)) return true;
      }
      return false;
    case AtomExpr::Op::Leaf:
      break;
  }
  const mol::Atom& a = m.atom(i);
  switch (e.primitive) {
    case AtomPrimitive::Any: return true;
    case AtomPrimitive::Element: return a.atomic_number == e.value && a.aromatic == e.aromatic;
    case AtomPrimitive::AtomicNum: return a.atomic_number == e.value;
    case AtomPrimitive::Aromatic: return a.aromatic;
    case AtomPrimitive::Aliphatic: return !a.aromatic;
    case AtomPrimitive::InRing: return m.ring_count(i) > 0;
    case AtomPrimitive::RingCount: return m.ring_count(i) == e.value;
    case AtomPrimitive::RingSize: return m.atom_in_ring_of_size(i, e.value);
    case AtomPrimitive::Connect: {
      int h_neighbors = 0;
      for (const auto& nb : m.neighbors(i)) {
        if (m.atom(nb.atom).atomic_number == 1) ++h_neighbors;
      }
      return m.degree(i) + a.total_h() - (a.atomic_number == 1 ? 0 : h_neighbors) == e.value;
    }
    case AtomPrimitive::Degree: return m.degree(i) == e.value;
    case AtomPrimitive::HCount: return a.total_h() == e.value;
    case AtomPrimitive::Charge: return a.formal_charge == e.value;
  }
  return false;
}

bool bond_matches(const BondExpr& e, const mol::Molecule& m, int bi) {
  switch (e.op) {
    case BondExpr::Op::Not:
      return !bond_matches(e.children.front(), m, bi);
    case BondExpr::Op::And:
      for (const auto& c : e.children) {
        if (!bond_matches(c, m, bi)) return false;
      }
      return true;
    case BondExpr::Op::Or:
      for (const auto& c : e.children) {
        if (bond_matches(c, m, bi)) return true;
      }
      return false;
    case BondExpr::Op::Leaf:
      break;
  }
  const mol::Bond& b = m.bond(bi);
  switch (e.primitive) {
    case BondPrimitive::Any: return true;
    case BondPrimitive::Single: return !b.aromatic && b.order == 1;
    case BondPrimitive::Double: return !b.aromatic && b.order == 2;
    case BondPrimitive::Triple: return !b.aromatic && b.order == 3;
    case BondPrimitive::Aromatic: return b.aromatic;
    case BondPrimitive::Ring: return b.in_ring;
    case BondPrimitive::Default: return b.aromatic || b.order == 1;
  }
  return false;
}

namespace {

class Matcher {
 public:
  Matcher(const mol::Molecule& m, const Pattern& p, std::size_t limit) : m_(m), p_(p), limit_(limit) {
    const int n = p.atom_count();
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
    for (int b = 0; b < static_cast<int>(p.bonds().size()); ++b) {
      const auto& qb = p.bonds()[static_cast<std::size_t>(b)];
      adj[static_cast<std::size_t>(qb.begin)].push_back({qb.end, b});
      adj[static_cast<std::size_t>(qb.end)].push_back({qb.begin, b});
    }
    // Breadth-first query order; each later atom records its anchor.
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int s = 0; s < n; ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      seen[static_cast<std::size_t>(s)] = true;
      order_.push_back(s);
      anchor_.push_back(-1);
      for (std::size_t k = order_.size() - 1; k < order_.size(); ++k) {
        for (const auto& [nb, b] : adj[static_cast<std::size_t>(order_[k])]) {
          if (!seen[static_cast<std::size_t>(nb)]) {
            seen[static_cast<std::size_t>(nb)] = true;
            order_.push_back(nb);
            anchor_.push_back(order_[k]);
          }
        }
      }
    }
    position_.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < order_.size(); ++k) position_[static_cast<std::size_t>(order_[k])] = k;
    back_bonds_.assign(order_.size(), {});
    for (int b = 0; b < static_cast<int>(p.bonds().size()); ++b) {
      const auto& qb = p.bonds()[static_cast<std::size_t>(b)];
      const auto pb = position_[static_cast<std::size_t>(qb.begin)];
      const auto pe = position_[static_cast<std::size_t>(qb.end)];
      if (pb > pe) {
        back_bonds_[pb].push_back({qb.end, b});
      } else {
        back_bonds_[pe].push_back({qb.begin, b});
      }
    }
    map_.assign(static_cast<std::size_t>(n), -1);
    used_.assign(static_cast<std::size_t>(m.atom_count()), false);
  }

  std::size_t run() {
    if (order_.empty() || static_cast<int>(order_.size()) > m_.atom_count()) return 0;
    search(0);
    return found_;
  }

 private:
  bool feasible(std::size_t k, int target) const {
    const int q = order_[k];
    if (used_[static_cast<std::size_t>(target)]) return false;
    if (!atom_matches(p_.atoms()[static_cast<std::size_t>(q)], m_, target)) return false;
    for (const auto& [other, b] : back_bonds_[k]) {
      const int t_other = map_[static_cast<std::size_t>(other)];
      const int tb = m_.bond_between(target, t_other);
      if (tb < 0 || !bond_matches(p_.bonds()[static_cast<std::size_t>(b)].expr, m_, tb)) return false;
    }
    return true;
  }

  void assign(std::size_t k, int target) {
    map_[static_cast<std::size_t>(order_[k])] = target;
    used_[static_cast<std::size_t>(target)] = true;
    search(k + 1);
    used_[static_cast<std::size_t>(target)] = false;
    map_[static_cast<std::size_t>(order_[k])] = -1;
  }

  void search(std::size_t k) {
    if (found_ >= limit_) return;
    if (k == order_.size()) {
      ++found_;
      return;
    }
    const int anchor = anchor_[k];
    if (anchor < 0) {
      for (int t = 0; t < m_.atom_count() && found_ < limit_; ++t) {
        if (feasible(k, t)) assign(k, t);
      }
      return;
    }
    const int t_anchor = map_[static_cast<std::size_t>(anchor)];
    for (const auto& nb : m_.neighbors(t_anchor)) {
      if (found_ >= limit_) return;
      if (feasible(k, nb.atom)) assign(k, nb.atom);
    }
  }

  const mol::Molecule& m_;
  const Pattern& p_;
  std::size_t limit_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<std::size_t> position_;
  std::vector<std::vector<std::pair<int, int>>> back_bonds_;
  std::vector<int> map_;
  std::vector<bool> used_;
  std::size_t found_ = 0;
};

std::size_t run_matcher(const mol::Molecule& m, const Pattern& p, std::size_t limit) {
  if (p.needs_explicit_h()) {
    const auto expanded = m.with_explicit_hydrogens();
    return Matcher(expanded, p, limit).run();
  }
  return Matcher(m, p, limit).run();
}

}  // namespace

bool has_match(const mol::Molecule& m, const Pattern& p) { return run_matcher(m, p, 1) > 0; }

std::size_t count_matches(const mol::Molecule& m, const Pattern& p, std::size_t limit) {
  return run_matcher(m, p, limit);
}

}  // namespace tartarus::substructure
