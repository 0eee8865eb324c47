// SPDX-License-Identifier: Apache-2.0
#include "tartarus/selfies/selfies.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <set>
#include <unordered_map>

#include "tartarus/molgraph/canonical.hpp"
#include "tartarus/molgraph/elements.hpp"
#include "tartarus/molgraph/smiles.hpp"
#include "tartarus/util/rng.hpp"

namespace tartarus::selfies {
namespace {

constexpr std::array<int, 10> kSelfiesElements{5, 6, 7, 8, 9, 15, 16, 17, 35, 53};

bool selfies_element(int z) {
  return std::find(kSelfiesElements.begin(), kSelfiesElements.end(), z) != kSelfiesElements.end();
}

struct ControlToken {
  enum Kind { Branch, Ring } kind;
  int order;
  int length;  // number of index tokens
};

std::optional<ControlToken> parse_control(std::string_view t) {
  if (t.size() < 4 || t.front() != '[' || t.back() != ']') return std::nullopt;
  std::string_view body = t.substr(1, t.size() - 2);
  int order = 1;
  if (!body.empty() && (body.front() == '=' || body.front() == '#')) {
    order = body.front() == '=' ? 2 : 3;
    body.remove_prefix(1);
  }
  ControlToken c{ControlToken::Branch, order, 0};
  if (body.starts_with("Branch")) {
    body.remove_prefix(6);
  } else if (body.starts_with("Ring")) {
    c.kind = ControlToken::Ring;
    body.remove_prefix(4);
  } else {
    return std::nullopt;
  }
  if (body.size() != 1 || body[0] < '1' || body[0] > '3') return std::nullopt;
  c.length = body[0] - '0';
  return c;
}

std::string control_text(ControlToken::Kind kind, int order, int length) {
  std::string s = "[";
  if (order == 2) s += '=';
  if (order == 3) s += '#';
  s += kind == ControlToken::Branch ? "Branch" : "Ring";
  s += std::to_string(length);
  s += ']';
  return s;
}

int index_value(const std::string& token) {
  static const std::unordered_map<std::string, int> lookup = [] {
    std::unordered_map<std::string, int> m;
    const auto& alpha = index_alphabet();
    for (std::size_t i = 0; i < alpha.size(); ++i) m.emplace(alpha[i], static_cast<int>(i));
    return m;
  }();
  const auto it = lookup.find(token);
  return it == lookup.end() ? 0 : it->second;
}

// Kind of each token, parsed once per decode.
struct Parsed {
  enum Kind { Atom, Control, Dot, Invalid } kind = Invalid;
  AtomToken atom;
  ControlToken control{};
};

Parsed classify(const std::string& t) {
  Parsed p;
  if (t == ".") {
    p.kind = Parsed::Dot;
  } else if (auto c = parse_control(t)) {
    p.kind = Parsed::Control;
    p.control = *c;
  } else if (auto a = parse_atom_token(t)) {
    p.kind = Parsed::Atom;
    p.atom = *a;
  }
  return p;
}

struct RingRequest {
  int a;
  int b;
  int order;
};

class Decoder {
 public:
  explicit Decoder(const SelfiesSequence& s) : tokens_(s.tokens) {
    parsed_.reserve(tokens_.size());
    for (const auto& t : tokens_) parsed_.push_back(classify(t));
  }

  mol::Molecule run() {
    std::size_t pos = 0;
    while (pos < tokens_.size()) {
      std::size_t end = pos;
      while (end < tokens_.size() && parsed_[end].kind != Parsed::Dot) ++end;
      fragment_start_ = static_cast<int>(atoms_.size());
      std::size_t p = pos;
      derive(p, end, end - pos, -1, -1);
      pos = end + 1;
    }
    form_rings();
    mol::MoleculeBuilder builder;
    for (const auto& t : atoms_) {
      mol::Atom a;
      a.atomic_number = t.atomic_number;
      a.formal_charge = t.charge;
      if (t.fixed_h) {
        a.no_implicit = true;
        a.explicit_h = t.h;
      }
      builder.add_atom(a);
    }
    for (const auto& [key, order] : bonds_) builder.add_bond(key.first, key.second, order);
    return std::move(builder).build();
  }

 private:
  // Derives tokens [pos, end) while at most max_derive are consumed and the
  // previous atom still has bonding capacity. state < 0 means no atom yet.
  std::size_t derive(std::size_t& pos, std::size_t end, std::size_t max_derive, int state, int prev) {
    std::size_t n_derived = 0;
    while ((state < 0 || state > 0) && n_derived < max_derive && pos < end) {
      const Parsed& p = parsed_[pos];
      ++pos;
      ++n_derived;
      if (p.kind == Parsed::Control) {
        if (p.control.kind == ControlToken::Branch) {
          if (state <= 1) continue;
          const int binit = std::min(state - 1, p.control.order);
          const int q = read_index(pos, end, p.control.length, max_derive, n_derived);
          const std::size_t budget = std::min<std::size_t>(static_cast<std::size_t>(q) + 1, max_derive - n_derived);
          const std::size_t start = pos;
          derive(pos, end, budget, binit, prev);
          // The branch always spans its declared length.
          const std::size_t used = pos - start;
          const std::size_t skip = std::min(budget - std::min(budget, used), end - pos);
          pos += skip;
          n_derived += used + skip;
          state -= binit;
        } else {
          if (state <= 0) continue;
          const int order = std::min(state, p.control.order);
          const int q = read_index(pos, end, p.control.length, max_derive, n_derived);
          const int target = std::max(fragment_start_, prev - (q + 1));
          rings_.push_back({target, prev, order});
          state -= order;
        }
        continue;
      }
      if (p.kind != Parsed::Atom) continue;
      const int cap = p.atom.capacity();
      if (state < 0) {
        atoms_.push_back(p.atom);
        prev = static_cast<int>(atoms_.size()) - 1;
        state = cap;
        continue;
      }
      const int order = std::min({p.atom.bond_order, state, cap});
      if (order <= 0) continue;
      atoms_.push_back(p.atom);
      const int cur = static_cast<int>(atoms_.size()) - 1;
      add_bond(prev, cur, order);
      prev = cur;
      state = cap - order;
    }
    return n_derived;
  }

  int read_index(std::size_t& pos, std::size_t end, int length, std::size_t max_derive, std::size_t& n_derived) {
    int q = 0;
    for (int k = 0; k < length; ++k) {
      int digit = 0;
      if (pos < end && n_derived < max_derive) {
        digit = index_value(tokens_[pos]);
        ++pos;
        ++n_derived;
      }
      q = q * 16 + digit;
    }
    return q;
  }

  void add_bond(int a, int b, int order) { bonds_.push_back({{a, b}, order}); }

  int used_valence(int i) const {
    int s = 0;
    for (const auto& [key, order] : bonds_) {
      if (key.first == i || key.second == i) s += order;
    }
    return s;
  }

  void form_rings() {
    for (const auto& r : rings_) {
      if (r.a == r.b || r.a < 0 || r.b < 0) continue;
      const int free_a = atoms_[static_cast<std::size_t>(r.a)].capacity() - used_valence(r.a);
      const int free_b = atoms_[static_cast<std::size_t>(r.b)].capacity() - used_valence(r.b);
      int order = std::min({r.order, free_a, free_b});
      if (order <= 0) continue;
      auto it = std::find_if(bonds_.begin(), bonds_.end(), [&](const auto& e) {
        return (e.first.first == r.a && e.first.second == r.b) || (e.first.first == r.b && e.first.second == r.a);
      });
      if (it != bonds_.end()) {
        it->second = std::min(3, it->second + order);
      } else {
        add_bond(r.a, r.b, order);
      }
    }
  }

  const std::vector<std::string>& tokens_;
  std::vector<Parsed> parsed_;
  std::vector<AtomToken> atoms_;
  std::vector<std::pair<std::pair<int, int>, int>> bonds_;
  std::vector<RingRequest> rings_;
  int fragment_start_ = 0;
};

}  // namespace

std::string SelfiesSequence::str() const {
  std::string out;
  for (const auto& t : tokens) out += t;
  return out;
}

int AtomToken::capacity() const {
  if (!fixed_h) return mol::max_valence(atomic_number, 0);
  return mol::max_valence(atomic_number, charge) - h;
}

std::optional<AtomToken> parse_atom_token(std::string_view t) {
  if (t.size() < 3 || t.front() != '[' || t.back() != ']') return std::nullopt;
  std::string_view body = t.substr(1, t.size() - 2);
  AtomToken a;
  if (body.front() == '=' || body.front() == '#') {
    a.bond_order = body.front() == '=' ? 2 : 3;
    body.remove_prefix(1);
  }
  if (body.empty() || !std::isupper(static_cast<unsigned char>(body.front()))) return std::nullopt;
  std::size_t len = 1;
  if (body.size() > 1 && std::islower(static_cast<unsigned char>(body[1]))) len = 2;
  const auto z = mol::atomic_number_of(body.substr(0, len));
  if (!z || !selfies_element(*z)) return std::nullopt;
  a.atomic_number = *z;
  body.remove_prefix(len);
  auto read_digits = [&](int& out) {
    std::size_t k = 0;
    int v = 0;
    while (k < body.size() && std::isdigit(static_cast<unsigned char>(body[k])) && k < 2) {
      v = v * 10 + (body[k] - '0');
      ++k;
    }
    body.remove_prefix(k);
    out = v;
    return k > 0;
  };
  if (!body.empty() && body.front() == 'H') {
    body.remove_prefix(1);
    a.fixed_h = true;
    int h = 1;
    if (read_digits(h)) a.h = h;
    else a.h = 1;
  }
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    const int sign = body.front() == '+' ? 1 : -1;
    body.remove_prefix(1);
    int mag = 1;
    if (!read_digits(mag)) mag = 1;
    if (mag == 0) return std::nullopt;
    a.charge = sign * mag;
    a.fixed_h = true;
  }
  if (!body.empty()) return std::nullopt;
  if (a.charge < mol::kMinCharge || a.charge > mol::kMaxCharge) return std::nullopt;
  if (mol::allowed_valences(a.atomic_number, a.charge).empty()) return std::nullopt;
  if (a.capacity() < 0) return std::nullopt;
  return a;
}

std::string atom_token_text(const AtomToken& t) {
  std::string s = "[";
  if (t.bond_order == 2) s += '=';
  if (t.bond_order == 3) s += '#';
  s += mol::element_symbol(t.atomic_number);
  if (t.fixed_h) {
    if (t.h > 0 || t.charge == 0) s += "H" + std::to_string(t.h);
    if (t.charge != 0) s += (t.charge > 0 ? "+" : "-") + std::to_string(std::abs(t.charge));
  }
  s += ']';
  return s;
}

bool is_valid_token(std::string_view token) {
  return token == "." || parse_control(token).has_value() || parse_atom_token(token).has_value();
}

const std::vector<std::string>& index_alphabet() {
  static const std::vector<std::string> kIndex = {
      "[C]",       "[Ring1]",   "[Ring2]", "[Branch1]", "[=Branch1]", "[#Branch1]", "[Branch2]", "[=Branch2]",
      "[#Branch2]", "[O]",      "[N]",     "[=N]",      "[=C]",       "[#C]",       "[S]",       "[P]"};
  return kIndex;
}

const std::vector<std::string>& default_alphabet() {
  static const std::vector<std::string> kAlphabet = {
      "[C]",     "[=C]",      "[#C]",       "[N]",        "[=N]",      "[#N]",       "[O]",       "[=O]",
      "[S]",     "[=S]",      "[P]",        "[=P]",       "[F]",       "[Cl]",       "[Br]",      "[I]",
      "[B]",     "[=B]",      "[N+1]",      "[=N+1]",     "[O-1]",     "[Branch1]",  "[=Branch1]",
      "[#Branch1]", "[Branch2]", "[=Branch2]", "[Ring1]",  "[=Ring1]",  "[Ring2]"};
  return kAlphabet;
}

std::vector<std::string> alphabet_from(const std::vector<SelfiesSequence>& sequences) {
  std::vector<std::string> out = default_alphabet();
  std::set<std::string> seen(out.begin(), out.end());
  for (const auto& s : sequences) {
    for (const auto& t : s.tokens) {
      if (t != "." && seen.insert(t).second) out.push_back(t);
    }
  }
  return out;
}

SelfiesSequence parse_selfies(std::string_view text) {
  SelfiesSequence s;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '.') {
      s.tokens.emplace_back(".");
      ++pos;
      continue;
    }
    if (text[pos] != '[') throw SelfiesSyntaxError("expected '[' at position " + std::to_string(pos));
    const auto close = text.find(']', pos);
    if (close == std::string_view::npos) throw SelfiesSyntaxError("unterminated token");
    const std::string token(text.substr(pos, close - pos + 1));
    if (!is_valid_token(token)) throw SelfiesSyntaxError("token outside the alphabet: " + token);
    s.tokens.push_back(token);
    pos = close + 1;
  }
  return s;
}

mol::Molecule decode(const SelfiesSequence& s) {
  Decoder d(s);
  return d.run();
}

// ---------------------------------------------------------------------------
// Encoder

namespace {

class Encoder {
 public:
  explicit Encoder(const mol::Molecule& m) : m_(m) {
    const int n = m.atom_count();
    order_.assign(static_cast<std::size_t>(n), -1);
    parent_bond_.assign(static_cast<std::size_t>(n), -1);
    children_.assign(static_cast<std::size_t>(n), {});
    closing_.assign(static_cast<std::size_t>(n), {});
  }

  SelfiesSequence run() {
    for (int i = 0; i < m_.atom_count(); ++i) {
      const auto& a = m_.atom(i);
      if (!selfies_element(a.atomic_number)) {
        throw mol::UnsupportedElement("element " + std::string(mol::element_symbol(a.atomic_number)) +
                                      " has no SELFIES token");
      }
    }
    SelfiesSequence out;
    for (int r = 0; r < m_.atom_count(); ++r) {
      if (order_[static_cast<std::size_t>(r)] >= 0) continue;
      if (!out.tokens.empty()) out.tokens.emplace_back(".");
      counter_ = 0;
      dfs(r);
      emit(r, 0, out.tokens);
    }
    return out;
  }

 private:
  void dfs(int root) {
    struct Frame {
      int atom;
      std::size_t next = 0;
    };
    std::vector<Frame> stack;
    order_[static_cast<std::size_t>(root)] = counter_++;
    stack.push_back({root});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto nbrs = m_.neighbors(f.atom);
      if (f.next >= nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const auto nb = nbrs[f.next++];
      if (nb.bond == parent_bond_[static_cast<std::size_t>(f.atom)]) continue;
      if (order_[static_cast<std::size_t>(nb.atom)] < 0) {
        order_[static_cast<std::size_t>(nb.atom)] = counter_++;
        parent_bond_[static_cast<std::size_t>(nb.atom)] = nb.bond;
        children_[static_cast<std::size_t>(f.atom)].push_back(nb.atom);
        stack.push_back({nb.atom});
      } else if (order_[static_cast<std::size_t>(nb.atom)] < order_[static_cast<std::size_t>(f.atom)]) {
        auto& c = closing_[static_cast<std::size_t>(f.atom)];
        if (std::find(c.begin(), c.end(), nb.bond) == c.end()) c.push_back(nb.bond);
      }
    }
  }

  std::string atom_token(int i, int bond_order) const {
    const auto& a = m_.atom(i);
    AtomToken t;
    t.atomic_number = a.atomic_number;
    t.bond_order = bond_order;
    t.charge = a.formal_charge;
    const int bond_sum = m_.bond_order_sum(i);
    const auto fit = mol::fitting_valence(a.atomic_number, 0, bond_sum);
    const bool plain = a.formal_charge == 0 && fit && *fit - bond_sum == a.total_h();
    if (!plain) {
      t.fixed_h = true;
      t.h = a.total_h();
    }
    return atom_token_text(t);
  }

  static void append_index(std::vector<std::string>& out, int q, int length) {
    std::vector<std::string> digits;
    for (int k = 0; k < length; ++k) {
      digits.push_back(index_alphabet()[static_cast<std::size_t>(q % 16)]);
      q /= 16;
    }
    out.insert(out.end(), digits.rbegin(), digits.rend());
  }

  static int index_length(int q) {
    if (q < 16) return 1;
    if (q < 256) return 2;
    if (q < 4096) return 3;
    throw mol::ValenceError("branch or ring span too long for SELFIES");
  }

  void emit(int atom, int bond_order, std::vector<std::string>& out) {
    out.push_back(atom_token(atom, bond_order));
    for (int b : closing_[static_cast<std::size_t>(atom)]) {
      const auto& bond = m_.bond(b);
      const int partner = bond.other(atom);
      const int q = order_[static_cast<std::size_t>(atom)] - order_[static_cast<std::size_t>(partner)] - 1;
      const int len = index_length(q);
      out.push_back(control_text(ControlToken::Ring, bond.order, len));
      append_index(out, q, len);
    }
    const auto& kids = children_[static_cast<std::size_t>(atom)];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const int child = kids[k];
      const int order = m_.bond(parent_bond_[static_cast<std::size_t>(child)]).order;
      if (k + 1 == kids.size()) {
        emit(child, order, out);
      } else {
        std::vector<std::string> body;
        emit(child, order, body);
        const int q = static_cast<int>(body.size()) - 1;
        const int len = index_length(q);
        out.push_back(control_text(ControlToken::Branch, order, len));
        append_index(out, q, len);
        out.insert(out.end(), body.begin(), body.end());
      }
    }
  }

  const mol::Molecule& m_;
  std::vector<int> order_;
  std::vector<int> parent_bond_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> closing_;
  int counter_ = 0;
};

}  // namespace

SelfiesSequence encode(const mol::Molecule& m) { return Encoder(m).run(); }

// ---------------------------------------------------------------------------
// Operators

namespace {

std::string draw_token(util::Rng& rng, const std::vector<std::string>& alphabet, const std::vector<double>& weights) {
  if (weights.empty()) return alphabet[util::uniform_index(rng, alphabet.size())];
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double x = util::uniform_real(rng) * total;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    x -= weights[i];
    if (x < 0) return alphabet[i];
  }
  return alphabet.back();
}

}  // namespace

SelfiesSequence mutate(const SelfiesSequence& s, std::uint64_t rng_seed, const MutationOptions& options) {
  const auto& alphabet = options.alphabet.empty() ? default_alphabet() : options.alphabet;
  if (!options.weights.empty() && options.weights.size() != alphabet.size()) {
    throw std::invalid_argument("mutation weights must align with the alphabet");
  }
  util::Rng rng(rng_seed);
  SelfiesSequence out = s;
  const std::size_t n = s.tokens.size();
  int op = options.replace_only ? 2 : static_cast<int>(util::uniform_index(rng, 3));
  if (n == 0) op = 0;
  if (op == 0) {
    const auto pos = util::uniform_index(rng, n + 1);
    out.tokens.insert(out.tokens.begin() + static_cast<std::ptrdiff_t>(pos), draw_token(rng, alphabet, options.weights));
  } else if (op == 1) {
    const auto pos = util::uniform_index(rng, n);
    out.tokens.erase(out.tokens.begin() + static_cast<std::ptrdiff_t>(pos));
  } else {
    const auto pos = util::uniform_index(rng, n);
    const bool can_differ = std::any_of(alphabet.begin(), alphabet.end(),
                                        [&](const std::string& t) { return t != s.tokens[pos]; });
    std::string tok = draw_token(rng, alphabet, options.weights);
    for (int tries = 0; can_differ && tok == s.tokens[pos] && tries < 1000; ++tries) {
      tok = draw_token(rng, alphabet, options.weights);
    }
    out.tokens[pos] = tok;
  }
  return out;
}

SelfiesSequence crossover_at(const SelfiesSequence& a, const SelfiesSequence& b, std::size_t cut) {
  SelfiesSequence out;
  cut = std::min({cut, a.tokens.size(), b.tokens.size()});
  out.tokens.assign(a.tokens.begin(), a.tokens.begin() + static_cast<std::ptrdiff_t>(cut));
  out.tokens.insert(out.tokens.end(), b.tokens.begin() + static_cast<std::ptrdiff_t>(cut), b.tokens.end());
  return out;
}

SelfiesSequence crossover(const SelfiesSequence& a, const SelfiesSequence& b, std::uint64_t rng_seed) {
  util::Rng rng(rng_seed);
  const std::size_t limit = std::min(a.tokens.size(), b.tokens.size());
  return crossover_at(a, b, static_cast<std::size_t>(util::uniform_index(rng, limit + 1)));
}

SelfiesSequence random_sequence(std::size_t length, std::uint64_t rng_seed, const std::vector<std::string>& alphabet) {
  util::Rng rng(rng_seed);
  SelfiesSequence s;
  s.tokens.reserve(length);
  for (std::size_t i = 0; i < length; ++i) s.tokens.push_back(alphabet[util::uniform_index(rng, alphabet.size())]);
  return s;
}

std::vector<mol::Molecule> expand_dataset(const mol::Molecule& seed, const KeepPredicate& keep, int reorderings,
                                          int mutations_per, std::size_t target_size, std::uint64_t rng_seed) {
  std::vector<mol::Molecule> out{seed};
  std::set<std::string> keys{mol::canonical_key(seed)};
  if (target_size <= 1) return out;
  std::vector<std::size_t> frontier{0};
  std::uint64_t stream = 0;
  bool first_cycle = true;
  while (!frontier.empty() && out.size() < target_size) {
    std::vector<std::size_t> next;
    for (std::size_t idx : frontier) {
      const auto variants =
          mol::randomized_smiles(out[idx], reorderings, util::derive_seed(rng_seed, stream++));
      for (const auto& smi : variants) {
        const auto encoded = encode(mol::parse_smiles(smi));
        for (int k = 0; k < mutations_per; ++k) {
          const auto mutated = mutate(encoded, util::derive_seed(rng_seed, stream++));
          auto m = decode(mutated);
          if (m.empty()) continue;
          auto key = mol::canonical_key(m);
          if (keys.count(key) || !keep(m)) continue;
          keys.insert(std::move(key));
          out.push_back(std::move(m));
          next.push_back(out.size() - 1);
          if (out.size() >= target_size) return out;
        }
      }
    }
    if (first_cycle && next.empty()) {
      throw PredicateNeverSatisfied("no mutant of the seed satisfied the predicate in the first cycle");
    }
    first_cycle = false;
    frontier = std::move(next);
  }
  return out;
}

}  // namespace tartarus::selfies
