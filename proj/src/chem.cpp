//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/chem.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace chemscreen::chem {

namespace {

struct ElementInfo {
  const char *symbol;
  int z;
  double mass;
};

// Standard atomic weights (abridged); conventional values for elements
// without stable isotopes.
constexpr std::array<ElementInfo, 118> kElements{{
    {"H", 1, 1.008},     {"He", 2, 4.0026},   {"Li", 3, 6.94},
    {"Be", 4, 9.0122},   {"B", 5, 10.81},     {"C", 6, 12.011},
    {"N", 7, 14.007},    {"O", 8, 15.999},    {"F", 9, 18.998},
    {"Ne", 10, 20.180},  {"Na", 11, 22.990},  {"Mg", 12, 24.305},
    {"Al", 13, 26.982},  {"Si", 14, 28.085},  {"P", 15, 30.974},
    {"S", 16, 32.06},    {"Cl", 17, 35.45},   {"Ar", 18, 39.948},
    {"K", 19, 39.098},   {"Ca", 20, 40.078},  {"Sc", 21, 44.956},
    {"Ti", 22, 47.867},  {"V", 23, 50.942},   {"Cr", 24, 51.996},
    {"Mn", 25, 54.938},  {"Fe", 26, 55.845},  {"Co", 27, 58.933},
    {"Ni", 28, 58.693},  {"Cu", 29, 63.546},  {"Zn", 30, 65.38},
    {"Ga", 31, 69.723},  {"Ge", 32, 72.630},  {"As", 33, 74.922},
    {"Se", 34, 78.971},  {"Br", 35, 79.904},  {"Kr", 36, 83.798},
    {"Rb", 37, 85.468},  {"Sr", 38, 87.62},   {"Y", 39, 88.906},
    {"Zr", 40, 91.224},  {"Nb", 41, 92.906},  {"Mo", 42, 95.95},
    {"Tc", 43, 97.0},    {"Ru", 44, 101.07},  {"Rh", 45, 102.91},
    {"Pd", 46, 106.42},  {"Ag", 47, 107.87},  {"Cd", 48, 112.41},
    {"In", 49, 114.82},  {"Sn", 50, 118.71},  {"Sb", 51, 121.76},
    {"Te", 52, 127.60},  {"I", 53, 126.90},   {"Xe", 54, 131.29},
    {"Cs", 55, 132.91},  {"Ba", 56, 137.33},  {"La", 57, 138.91},
    {"Ce", 58, 140.12},  {"Pr", 59, 140.91},  {"Nd", 60, 144.24},
    {"Pm", 61, 145.0},   {"Sm", 62, 150.36},  {"Eu", 63, 151.96},
    {"Gd", 64, 157.25},  {"Tb", 65, 158.93},  {"Dy", 66, 162.50},
    {"Ho", 67, 164.93},  {"Er", 68, 167.26},  {"Tm", 69, 168.93},
    {"Yb", 70, 173.05},  {"Lu", 71, 174.97},  {"Hf", 72, 178.49},
    {"Ta", 73, 180.95},  {"W", 74, 183.84},   {"Re", 75, 186.21},
    {"Os", 76, 190.23},  {"Ir", 77, 192.22},  {"Pt", 78, 195.08},
    {"Au", 79, 196.97},  {"Hg", 80, 200.59},  {"Tl", 81, 204.38},
    {"Pb", 82, 207.2},   {"Bi", 83, 208.98},  {"Po", 84, 209.0},
    {"At", 85, 210.0},   {"Rn", 86, 222.0},   {"Fr", 87, 223.0},
    {"Ra", 88, 226.0},   {"Ac", 89, 227.0},   {"Th", 90, 232.04},
    {"Pa", 91, 231.04},  {"U", 92, 238.03},   {"Np", 93, 237.0},
    {"Pu", 94, 244.0},   {"Am", 95, 243.0},   {"Cm", 96, 247.0},
    {"Bk", 97, 247.0},   {"Cf", 98, 251.0},   {"Es", 99, 252.0},
    {"Fm", 100, 257.0},  {"Md", 101, 258.0},  {"No", 102, 259.0},
    {"Lr", 103, 262.0},  {"Rf", 104, 267.0},  {"Db", 105, 268.0},
    {"Sg", 106, 269.0},  {"Bh", 107, 270.0},  {"Hs", 108, 269.0},
    {"Mt", 109, 278.0},  {"Ds", 110, 281.0},  {"Rg", 111, 282.0},
    {"Cn", 112, 285.0},  {"Nh", 113, 286.0},  {"Fl", 114, 289.0},
    {"Mc", 115, 290.0},  {"Lv", 116, 293.0},  {"Ts", 117, 294.0},
    {"Og", 118, 294.0},
}};

const ElementInfo *find_element(std::string_view symbol) {
  static const auto *index = [] {
    auto *m = new std::unordered_map<std::string_view, const ElementInfo *>();
    for (const auto &e : kElements) (*m)[e.symbol] = &e;
    return m;
  }();
  const auto it = index->find(symbol);
  return it == index->end() ? nullptr : it->second;
}

bool is_organic_subset(std::string_view el) {
  static constexpr std::array<std::string_view, 10> kOrganic{
      "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};
  return std::find(kOrganic.begin(), kOrganic.end(), el) != kOrganic.end();
}

bool is_aromatic_subset(std::string_view el) {
  static constexpr std::array<std::string_view, 6> kAromatic{"B", "C", "N",
                                                             "O", "P", "S"};
  return std::find(kAromatic.begin(), kAromatic.end(), el) != kAromatic.end();
}

// Bracket atoms additionally allow aromatic se/as.
bool is_bracket_aromatic(std::string_view el) {
  return is_aromatic_subset(el) || el == "Se" || el == "As";
}

const int *standard_valences(std::string_view el, int &count) {
  static constexpr int kB[] = {3};
  static constexpr int kC[] = {4};
  static constexpr int kN[] = {3, 5};
  static constexpr int kO[] = {2};
  static constexpr int kP[] = {3, 5};
  static constexpr int kS[] = {2, 4, 6};
  static constexpr int kHalogen[] = {1};
  if (el == "B") return count = 1, kB;
  if (el == "C") return count = 1, kC;
  if (el == "N") return count = 2, kN;
  if (el == "O") return count = 1, kO;
  if (el == "P") return count = 2, kP;
  if (el == "S") return count = 3, kS;
  if (el == "F" || el == "Cl" || el == "Br" || el == "I") {
    return count = 1, kHalogen;
  }
  count = 0;
  return nullptr;
}

int bond_code(BondOrder order) { return static_cast<int>(order); }

// ---------------------------------------------------------------------------
// Cycle membership via bridge detection (iterative lowpoint DFS). A bond is
// in a cycle iff it is not a bridge; an atom is in a cycle iff it has an
// incident non-bridge bond. This is unbounded, unlike the explicit ring list.
// ---------------------------------------------------------------------------
void mark_cycle_membership(MoleculeGraph &g) {
  const int n = static_cast<int>(g.atoms.size());
  std::vector<int> disc(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  for (auto &bond : g.bonds) bond.in_ring = false;
  for (auto &atom : g.atoms) atom.in_ring = false;

  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next_edge;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[static_cast<std::size_t>(root)] != -1) continue;
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] =
        timer++;
    stack.push_back({root, -1, 0});
    while (!stack.empty()) {
      Frame &f = stack.back();
      const auto &edges = g.adjacency[static_cast<std::size_t>(f.atom)];
      if (f.next_edge < edges.size()) {
        const auto [nbr, bond] = edges[f.next_edge++];
        if (bond == f.parent_bond) continue;
        if (disc[static_cast<std::size_t>(nbr)] == -1) {
          disc[static_cast<std::size_t>(nbr)] =
              low[static_cast<std::size_t>(nbr)] = timer++;
          stack.push_back({nbr, bond, 0});
        } else {
          // Back edge: always part of a cycle.
          g.bonds[static_cast<std::size_t>(bond)].in_ring = true;
          low[static_cast<std::size_t>(f.atom)] =
              std::min(low[static_cast<std::size_t>(f.atom)],
                       disc[static_cast<std::size_t>(nbr)]);
        }
      } else {
        const int atom = f.atom;
        const int parent_bond = f.parent_bond;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          low[static_cast<std::size_t>(parent)] =
              std::min(low[static_cast<std::size_t>(parent)],
                       low[static_cast<std::size_t>(atom)]);
          if (low[static_cast<std::size_t>(atom)] >
              disc[static_cast<std::size_t>(parent)]) {
            // bridge: leave bond.in_ring false
          } else if (parent_bond >= 0) {
            g.bonds[static_cast<std::size_t>(parent_bond)].in_ring = true;
          }
        }
      }
    }
  }
  for (const auto &bond : g.bonds) {
    if (bond.in_ring) {
      g.atoms[static_cast<std::size_t>(bond.a)].in_ring = true;
      g.atoms[static_cast<std::size_t>(bond.b)].in_ring = true;
    }
  }
}

// All simple cycles of size <= kMaxRingSize, each found exactly once: the
// cycle's smallest atom index is the path root, and the two traversal
// directions are deduplicated by requiring path[1] < path.back().
void enumerate_small_rings(MoleculeGraph &g) {
  g.rings.clear();
  const int n = static_cast<int>(g.atoms.size());
  std::vector<char> on_path(static_cast<std::size_t>(n), 0);
  std::vector<int> path;

  auto dfs = [&](auto &&self, int root) -> void {
    const int last = path.back();
    for (const auto &[nbr, bond] : g.adjacency[static_cast<std::size_t>(last)]) {
      (void)bond;
      if (nbr == root && path.size() >= 3 && path[1] < path.back()) {
        std::vector<int> ring = path;
        std::sort(ring.begin(), ring.end());
        g.rings.push_back(std::move(ring));
      } else if (nbr > root && !on_path[static_cast<std::size_t>(nbr)] &&
                 path.size() < static_cast<std::size_t>(kMaxRingSize)) {
        on_path[static_cast<std::size_t>(nbr)] = 1;
        path.push_back(nbr);
        self(self, root);
        path.pop_back();
        on_path[static_cast<std::size_t>(nbr)] = 0;
      }
    }
  };

  for (int v = 0; v < n; ++v) {
    path.assign(1, v);
    on_path[static_cast<std::size_t>(v)] = 1;
    dfs(dfs, v);
    on_path[static_cast<std::size_t>(v)] = 0;
  }
}

void rebuild_adjacency(MoleculeGraph &g) {
  g.adjacency.assign(g.atoms.size(), {});
  for (std::size_t i = 0; i < g.bonds.size(); ++i) {
    const Bond &bond = g.bonds[i];
    g.adjacency[static_cast<std::size_t>(bond.a)].emplace_back(
        bond.b, static_cast<int>(i));
    g.adjacency[static_cast<std::size_t>(bond.b)].emplace_back(
        bond.a, static_cast<int>(i));
  }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct RingOpening {
  int atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

struct Parser {
  std::string_view src;
  std::size_t i = 0;
  MoleculeGraph g;
  std::vector<ParseDiagnostic> diags;
  std::vector<std::size_t> atom_offsets;
  std::vector<char> bond_symbol_written;  // per bond: order was explicit
  int prev = -1;
  std::optional<BondOrder> pending;
  std::size_t pending_offset = 0;
  std::vector<std::pair<int, std::size_t>> branch_stack;  // (prev, '(' offset)
  std::vector<std::size_t> branch_atom_count;
  std::map<int, RingOpening> open_rings;
  bool after_dot = false;

  bool fail(std::size_t offset, std::string message) {
    diags.push_back({offset, std::move(message),
                     ParseDiagnostic::Severity::kError});
    return false;
  }

  void warn(std::size_t offset, std::string message) {
    diags.push_back({offset, std::move(message),
                     ParseDiagnostic::Severity::kWarning});
  }

  bool add_atom(Atom atom, std::size_t offset) {
    atom.index = static_cast<int>(g.atoms.size());
    g.atoms.push_back(std::move(atom));
    atom_offsets.push_back(offset);
    const int cur = static_cast<int>(g.atoms.size()) - 1;
    if (prev >= 0) {
      if (!connect(prev, cur, pending, pending.has_value(), offset)) {
        return false;
      }
    } else if (pending) {
      return fail(pending_offset, "bond symbol without preceding atom");
    }
    pending.reset();
    prev = cur;
    after_dot = false;
    return true;
  }

  bool connect(int a, int b, std::optional<BondOrder> order, bool explicit_sym,
               std::size_t offset) {
    if (a == b) return fail(offset, "ring bond connects atom to itself");
    for (const auto &bond : g.bonds) {
      if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) {
        return fail(offset, "duplicate bond between the same atom pair");
      }
    }
    BondOrder resolved;
    if (order) {
      resolved = *order;
    } else {
      const bool both_aromatic = g.atoms[static_cast<std::size_t>(a)].aromatic &&
                                 g.atoms[static_cast<std::size_t>(b)].aromatic;
      resolved = both_aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
    }
    g.bonds.push_back({a, b, resolved, false});
    bond_symbol_written.push_back(explicit_sym ? 1 : 0);
    return true;
  }

  bool ring_digit(int digit, std::size_t offset) {
    if (prev < 0) {
      return fail(offset, "ring-closure digit before any atom");
    }
    const auto it = open_rings.find(digit);
    if (it == open_rings.end()) {
      open_rings[digit] = {prev, pending, offset};
      pending.reset();
      return true;
    }
    RingOpening opening = it->second;
    open_rings.erase(it);
    std::optional<BondOrder> order;
    bool explicit_sym = false;
    if (opening.order && pending && *opening.order != *pending) {
      return fail(offset, "conflicting bond orders on ring closure");
    }
    if (opening.order) {
      order = opening.order;
      explicit_sym = true;
    }
    if (pending) {
      order = pending;
      explicit_sym = true;
    }
    pending.reset();
    return connect(opening.atom, prev, order, explicit_sym, offset);
  }

  bool set_pending(BondOrder order, std::size_t offset) {
    if (pending) return fail(offset, "two consecutive bond symbols");
    pending = order;
    pending_offset = offset;
    return true;
  }

  bool parse_bracket();
  bool scan();
  bool finalize();
};

bool Parser::parse_bracket() {
  const std::size_t start = i;
  ++i;  // '['
  Atom atom;

  // isotope
  std::size_t digits = 0;
  int isotope = 0;
  while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])) &&
         digits < 4) {
    isotope = isotope * 10 + (src[i] - '0');
    ++i;
    ++digits;
  }
  if (digits > 0) {
    if (isotope <= 0) return fail(start + 1, "isotope must be positive");
    atom.isotope = isotope;
  }

  // element symbol
  if (i >= src.size()) return fail(start, "malformed bracket atom");
  if (std::islower(static_cast<unsigned char>(src[i]))) {
    std::string sym(1, src[i]);
    if (i + 1 < src.size() && (src.compare(i, 2, "se") == 0 ||
                               src.compare(i, 2, "as") == 0)) {
      sym = src.substr(i, 2);
      i += 2;
    } else {
      ++i;
    }
    sym[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sym[0])));
    if (!is_bracket_aromatic(sym) || !is_known_element(sym)) {
      return fail(i - 1, "unknown aromatic element symbol in bracket");
    }
    atom.element = sym;
    atom.aromatic = true;
  } else if (std::isupper(static_cast<unsigned char>(src[i]))) {
    std::string sym(1, src[i]);
    if (i + 1 < src.size() &&
        std::islower(static_cast<unsigned char>(src[i + 1]))) {
      const std::string two = sym + src[i + 1];
      if (is_known_element(two)) {
        sym = two;
        ++i;
      }
    }
    ++i;
    if (!is_known_element(sym)) {
      return fail(start + 1, "unknown element symbol: " + sym);
    }
    atom.element = sym;
  } else {
    return fail(i, "malformed bracket atom: expected element symbol");
  }

  // chirality, accepted then discarded
  if (i < src.size() && src[i] == '@') {
    std::size_t at = i;
    ++i;
    if (i < src.size() && src[i] == '@') ++i;
    warn(at, "stereochemistry marker ignored");
  }

  // hydrogen count
  int hcount = 0;
  if (i < src.size() && src[i] == 'H') {
    ++i;
    hcount = 1;
    int value = 0;
    std::size_t hdigits = 0;
    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])) &&
           hdigits < 2) {
      value = value * 10 + (src[i] - '0');
      ++i;
      ++hdigits;
    }
    if (hdigits > 0) hcount = value;
  }
  atom.explicit_h = hcount;

  // charge
  if (i < src.size() && (src[i] == '+' || src[i] == '-')) {
    const char sign = src[i];
    int magnitude = 0;
    while (i < src.size() && src[i] == sign) {
      ++magnitude;
      ++i;
    }
    if (magnitude == 1 && i < src.size() &&
        std::isdigit(static_cast<unsigned char>(src[i]))) {
      magnitude = 0;
      std::size_t cdigits = 0;
      while (i < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[i])) && cdigits < 2) {
        magnitude = magnitude * 10 + (src[i] - '0');
        ++i;
        ++cdigits;
      }
    }
    if (magnitude > 15) return fail(start, "unreasonable formal charge");
    atom.formal_charge = (sign == '+') ? magnitude : -magnitude;
  }

  // atom class, parsed and discarded
  if (i < src.size() && src[i] == ':') {
    ++i;
    std::size_t cdigits = 0;
    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
      ++i;
      ++cdigits;
    }
    if (cdigits == 0) return fail(i, "malformed atom class in bracket");
  }

  if (i >= src.size() || src[i] != ']') {
    return fail(start, "malformed bracket atom: missing ']'");
  }
  ++i;
  return add_atom(std::move(atom), start);
}

bool Parser::scan() {
  while (i < src.size()) {
    const char c = src[i];
    const std::size_t offset = i;
    if (std::isspace(static_cast<unsigned char>(c))) {
      return fail(offset, "unexpected whitespace in SMILES");
    }
    switch (c) {
      case '=':
        if (!set_pending(BondOrder::kDouble, offset)) return false;
        ++i;
        break;
      case '#':
        if (!set_pending(BondOrder::kTriple, offset)) return false;
        ++i;
        break;
      case '-':
        if (!set_pending(BondOrder::kSingle, offset)) return false;
        ++i;
        break;
      case ':':
        if (!set_pending(BondOrder::kAromatic, offset)) return false;
        ++i;
        break;
      case '/':
      case '\\':
        warn(offset, "stereochemistry bond marker treated as single bond");
        if (!set_pending(BondOrder::kSingle, offset)) return false;
        ++i;
        break;
      case '(':
        if (prev < 0) return fail(offset, "branch before any atom");
        if (pending) return fail(offset, "bond symbol before '('");
        branch_stack.emplace_back(prev, offset);
        branch_atom_count.push_back(g.atoms.size());
        ++i;
        break;
      case ')':
        if (branch_stack.empty()) return fail(offset, "unbalanced branch: ')'");
        if (pending) return fail(pending_offset, "dangling bond before ')'");
        if (g.atoms.size() == branch_atom_count.back()) {
          return fail(offset, "empty branch");
        }
        prev = branch_stack.back().first;
        branch_stack.pop_back();
        branch_atom_count.pop_back();
        ++i;
        break;
      case '.':
        if (!branch_stack.empty()) return fail(offset, "dot inside branch");
        if (pending) return fail(pending_offset, "bond symbol before '.'");
        if (prev < 0) return fail(offset, "dot without preceding component");
        prev = -1;
        after_dot = true;
        ++i;
        break;
      case '%': {
        if (i + 2 >= src.size() ||
            !std::isdigit(static_cast<unsigned char>(src[i + 1])) ||
            !std::isdigit(static_cast<unsigned char>(src[i + 2]))) {
          return fail(offset, "'%' ring closure requires two digits");
        }
        const int digit = (src[i + 1] - '0') * 10 + (src[i + 2] - '0');
        i += 3;
        if (!ring_digit(digit, offset)) return false;
        break;
      }
      case '[':
        if (!parse_bracket()) return false;
        break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          ++i;
          if (!ring_digit(c - '0', offset)) return false;
          break;
        }
        if (std::isupper(static_cast<unsigned char>(c))) {
          std::string sym(1, c);
          if ((c == 'C' && i + 1 < src.size() && src[i + 1] == 'l') ||
              (c == 'B' && i + 1 < src.size() && src[i + 1] == 'r')) {
            sym += src[i + 1];
          }
          if (!is_organic_subset(sym)) {
            return fail(offset, "element not in organic subset: " + sym +
                                    " (use brackets)");
          }
          i += sym.size();
          Atom atom;
          atom.element = sym;
          if (!add_atom(std::move(atom), offset)) return false;
          break;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
          std::string sym(1, static_cast<char>(std::toupper(
                                 static_cast<unsigned char>(c))));
          if (!is_aromatic_subset(sym)) {
            return fail(offset, std::string("unknown aromatic atom: ") + c);
          }
          ++i;
          Atom atom;
          atom.element = sym;
          atom.aromatic = true;
          if (!add_atom(std::move(atom), offset)) return false;
          break;
        }
        return fail(offset, std::string("unexpected character: '") + c + "'");
    }
  }
  return true;
}

bool Parser::finalize() {
  bool ok = true;
  if (pending) {
    ok = fail(pending_offset, "dangling bond at end of input");
  }
  for (const auto &[prev_atom, offset] : branch_stack) {
    (void)prev_atom;
    fail(offset, "unbalanced branch: '(' never closed");
    ok = false;
  }
  for (const auto &[digit, opening] : open_rings) {
    fail(opening.offset,
         "unclosed ring-closure digit " + std::to_string(digit));
    ok = false;
  }
  if (after_dot) {
    ok = fail(src.size() - 1, "trailing dot");
  }
  if (!ok) return false;

  rebuild_adjacency(g);
  mark_cycle_membership(g);

  // Default-order bonds between two aromatic atoms were resolved to aromatic
  // during scanning; outside any cycle (e.g. a biphenyl bridge) they are
  // really single bonds. Explicit ':' bonds must lie in a cycle.
  for (std::size_t bi = 0; bi < g.bonds.size(); ++bi) {
    Bond &bond = g.bonds[bi];
    if (bond.order != BondOrder::kAromatic) continue;
    if (bond_symbol_written[bi]) {
      const Atom &a = g.atoms[static_cast<std::size_t>(bond.a)];
      const Atom &b = g.atoms[static_cast<std::size_t>(bond.b)];
      if (!a.aromatic || !b.aromatic) {
        ok = fail(atom_offsets[static_cast<std::size_t>(bond.b)],
                  "aromatic bond between non-aromatic atoms");
      } else if (!bond.in_ring) {
        ok = fail(atom_offsets[static_cast<std::size_t>(bond.b)],
                  "aromatic bond outside any ring");
      }
    } else if (!bond.in_ring) {
      bond.order = BondOrder::kSingle;
    }
  }
  for (std::size_t ai = 0; ai < g.atoms.size(); ++ai) {
    if (g.atoms[ai].aromatic && !g.atoms[ai].in_ring) {
      ok = fail(atom_offsets[ai], "aromatic atom outside any ring");
    }
  }
  if (!ok) return false;

  enumerate_small_rings(g);
  return true;
}

}  // namespace

std::string ParseResult::first_error() const {
  for (const auto &d : diagnostics) {
    if (d.severity == ParseDiagnostic::Severity::kError) return d.message;
  }
  return {};
}

bool is_known_element(std::string_view symbol) {
  return find_element(symbol) != nullptr;
}

int atomic_number(std::string_view symbol) {
  const ElementInfo *e = find_element(symbol);
  return e ? e->z : 0;
}

double atomic_mass(std::string_view symbol) {
  const ElementInfo *e = find_element(symbol);
  return e ? e->mass : 0.0;
}

int total_hydrogens(const MoleculeGraph &g, int atom_index) {
  const Atom &atom = g.atoms[static_cast<std::size_t>(atom_index)];
  if (atom.explicit_h) return *atom.explicit_h;

  int count = 0;
  const int *valences = standard_valences(atom.element, count);
  if (valences == nullptr) return 0;

  if (atom.aromatic) {
    // Lowest valence, bonds counted once, plus one pi bond for elements that
    // carry a formal double bond in every Kekule structure (B, C, N, P).
    int used = 0;
    for (const auto &[nbr, bond] : g.adjacency[static_cast<std::size_t>(
             atom_index)]) {
      (void)nbr;
      const BondOrder order = g.bonds[static_cast<std::size_t>(bond)].order;
      used += (order == BondOrder::kAromatic) ? 1 : bond_code(order);
    }
    if (atom.element == "B" || atom.element == "C" || atom.element == "N" ||
        atom.element == "P") {
      used += 1;
    }
    return std::max(0, valences[0] - used);
  }

  int used = 0;
  for (const auto &[nbr, bond] : g.adjacency[static_cast<std::size_t>(
           atom_index)]) {
    (void)nbr;
    used += bond_code(g.bonds[static_cast<std::size_t>(bond)].order);
  }
  for (int k = 0; k < count; ++k) {
    if (valences[k] >= used) return valences[k] - used;
  }
  return 0;
}

ParseResult parse(std::string_view smiles) {
  ParseResult result;
  if (smiles.empty()) {
    result.diagnostics.push_back(
        {0, "empty SMILES string", ParseDiagnostic::Severity::kError});
    return result;
  }
  if (smiles.size() > kMaxInputBytes) {
    result.diagnostics.push_back(
        {kMaxInputBytes,
         "input exceeds maximum length of " + std::to_string(kMaxInputBytes) +
             " bytes",
         ParseDiagnostic::Severity::kError});
    return result;
  }

  Parser parser;
  parser.src = smiles;
  const bool ok = parser.scan() && parser.finalize();
  result.diagnostics = std::move(parser.diags);
  if (ok) result.graph = std::move(parser.g);
  return result;
}

void perceive_rings(MoleculeGraph &g) {
  rebuild_adjacency(g);
  mark_cycle_membership(g);
  enumerate_small_rings(g);
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

namespace {

std::vector<int> dense_rank(const std::vector<std::vector<int>> &keys) {
  const std::size_t n = keys.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&keys](int a, int b) {
    return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
  });
  std::vector<int> ranks(n, 0);
  int rank = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && keys[static_cast<std::size_t>(order[k])] !=
                     keys[static_cast<std::size_t>(order[k - 1])]) {
      ++rank;
    }
    ranks[static_cast<std::size_t>(order[k])] = rank;
  }
  return ranks;
}

int distinct_count(const std::vector<int> &ranks) {
  if (ranks.empty()) return 0;
  return 1 + *std::max_element(ranks.begin(), ranks.end());
}

std::vector<int> refine(const MoleculeGraph &g, std::vector<int> ranks) {
  const std::size_t n = g.atoms.size();
  while (true) {
    std::vector<std::vector<int>> keys(n);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<std::pair<int, int>> nbrs;
      nbrs.reserve(g.adjacency[a].size());
      for (const auto &[nbr, bond] : g.adjacency[a]) {
        nbrs.emplace_back(bond_code(g.bonds[static_cast<std::size_t>(bond)].order),
                          ranks[static_cast<std::size_t>(nbr)]);
      }
      std::sort(nbrs.begin(), nbrs.end());
      auto &key = keys[a];
      key.push_back(ranks[a]);
      for (const auto &[code, r] : nbrs) {
        key.push_back(code);
        key.push_back(r);
      }
    }
    std::vector<int> next = dense_rank(keys);
    if (next == ranks) return ranks;
    ranks = std::move(next);
  }
}

std::vector<int> canonical_ranks(const MoleculeGraph &g) {
  const std::size_t n = g.atoms.size();
  std::vector<std::vector<int>> keys(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Atom &atom = g.atoms[a];
    keys[a] = {atomic_number(atom.element), atom.aromatic ? 1 : 0,
               atom.formal_charge, g.degree(static_cast<int>(a)),
               total_hydrogens(g, static_cast<int>(a))};
  }
  std::vector<int> ranks = dense_rank(keys);

  while (true) {
    ranks = refine(g, std::move(ranks));
    if (distinct_count(ranks) == static_cast<int>(n)) return ranks;

    // Break a residual tie: in the lowest-ranked tied cell, promote one atom.
    // Atoms left tied after refinement are treated as interchangeable.
    int tied_rank = -1;
    std::vector<int> cell_size(n, 0);
    for (int r : ranks) ++cell_size[static_cast<std::size_t>(r)];
    for (std::size_t r = 0; r < n; ++r) {
      if (cell_size[r] > 1) {
        tied_rank = static_cast<int>(r);
        break;
      }
    }
    int chosen = -1;
    for (std::size_t a = 0; a < n; ++a) {
      if (ranks[a] == tied_rank) {
        chosen = static_cast<int>(a);
        break;
      }
    }
    std::vector<std::vector<int>> tie_keys(n);
    for (std::size_t a = 0; a < n; ++a) {
      tie_keys[a] = {ranks[a], (static_cast<int>(a) == chosen) ? 0 : 1};
    }
    ranks = dense_rank(tie_keys);
  }
}

struct Writer {
  const MoleculeGraph &g;
  const std::vector<int> &ranks;
  std::vector<char> visited;
  std::vector<int> visit_order;
  int clock = 0;

  // per atom: tree children as (bond, child); ring closures as (bond, partner)
  std::vector<std::vector<std::pair<int, int>>> children;
  std::vector<std::vector<std::pair<int, int>>> ring_at;
  std::vector<char> bond_seen;

  std::map<int, int> digit_of_bond;
  std::vector<char> digit_in_use;

  explicit Writer(const MoleculeGraph &graph, const std::vector<int> &r)
      : g(graph),
        ranks(r),
        visited(graph.atoms.size(), 0),
        visit_order(graph.atoms.size(), 0),
        children(graph.atoms.size()),
        ring_at(graph.atoms.size()),
        bond_seen(graph.bonds.size(), 0),
        digit_in_use(100, 0) {}

  std::vector<int> sorted_neighbors(int atom) const {
    std::vector<int> idx;
    const auto &edges = g.adjacency[static_cast<std::size_t>(atom)];
    idx.resize(edges.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int x, int y) {
      return ranks[static_cast<std::size_t>(edges[static_cast<std::size_t>(x)]
                                                .first)] <
             ranks[static_cast<std::size_t>(edges[static_cast<std::size_t>(y)]
                                                .first)];
    });
    return idx;
  }

  void classify(int atom, int parent_bond) {
    visited[static_cast<std::size_t>(atom)] = 1;
    visit_order[static_cast<std::size_t>(atom)] = clock++;
    const auto &edges = g.adjacency[static_cast<std::size_t>(atom)];
    for (int k : sorted_neighbors(atom)) {
      const auto [nbr, bond] = edges[static_cast<std::size_t>(k)];
      if (bond == parent_bond || bond_seen[static_cast<std::size_t>(bond)]) {
        continue;
      }
      if (visited[static_cast<std::size_t>(nbr)]) {
        bond_seen[static_cast<std::size_t>(bond)] = 1;
        ring_at[static_cast<std::size_t>(nbr)].emplace_back(bond, atom);
        ring_at[static_cast<std::size_t>(atom)].emplace_back(bond, nbr);
      } else {
        bond_seen[static_cast<std::size_t>(bond)] = 1;
        children[static_cast<std::size_t>(atom)].emplace_back(bond, nbr);
        classify(nbr, bond);
      }
    }
  }

  std::string bond_symbol(int bond_index) const {
    const Bond &bond = g.bonds[static_cast<std::size_t>(bond_index)];
    switch (bond.order) {
      case BondOrder::kDouble:
        return "=";
      case BondOrder::kTriple:
        return "#";
      case BondOrder::kAromatic:
        return "";
      case BondOrder::kSingle: {
        const bool both_arom =
            g.atoms[static_cast<std::size_t>(bond.a)].aromatic &&
            g.atoms[static_cast<std::size_t>(bond.b)].aromatic;
        return both_arom ? "-" : "";
      }
    }
    return "";
  }

  std::string atom_token(int atom_index) const {
    const Atom &atom = g.atoms[static_cast<std::size_t>(atom_index)];
    const int hydrogens = total_hydrogens(g, atom_index);

    bool bare_ok = atom.formal_charge == 0 && !atom.isotope &&
                   (atom.aromatic ? is_aromatic_subset(atom.element)
                                  : is_organic_subset(atom.element));
    if (bare_ok && atom.explicit_h) {
      // A bracket-specified H count can drop out when it matches the count
      // a bare atom would be assigned on re-parse.
      MoleculeGraph probe = g;  // cheap for molecule-sized graphs
      probe.atoms[static_cast<std::size_t>(atom_index)].explicit_h.reset();
      bare_ok = total_hydrogens(probe, atom_index) == hydrogens;
    }

    std::string element = atom.element;
    if (atom.aromatic) {
      element[0] = static_cast<char>(
          std::tolower(static_cast<unsigned char>(element[0])));
    }
    if (bare_ok) return element;

    std::string token = "[";
    if (atom.isotope) token += std::to_string(*atom.isotope);
    token += element;
    if (hydrogens == 1) {
      token += "H";
    } else if (hydrogens > 1) {
      token += "H" + std::to_string(hydrogens);
    }
    if (atom.formal_charge == 1) {
      token += "+";
    } else if (atom.formal_charge == -1) {
      token += "-";
    } else if (atom.formal_charge > 1) {
      token += "+" + std::to_string(atom.formal_charge);
    } else if (atom.formal_charge < -1) {
      token += "-" + std::to_string(-atom.formal_charge);
    }
    token += "]";
    return token;
  }

  std::string ring_token(int digit) const {
    if (digit < 10) return std::to_string(digit);
    return "%" + std::to_string(digit);
  }

  void emit(int atom, int parent_bond, std::string &out) {
    if (parent_bond >= 0) out += bond_symbol(parent_bond);
    out += atom_token(atom);

    auto ring_bonds = ring_at[static_cast<std::size_t>(atom)];
    std::sort(ring_bonds.begin(), ring_bonds.end(),
              [&](const auto &x, const auto &y) {
                return visit_order[static_cast<std::size_t>(x.second)] <
                       visit_order[static_cast<std::size_t>(y.second)];
              });
    std::vector<int> freed;
    for (const auto &[bond, partner] : ring_bonds) {
      const auto it = digit_of_bond.find(bond);
      if (it != digit_of_bond.end()) {
        out += ring_token(it->second);  // closing; symbol was emitted opening
        freed.push_back(it->second);
        digit_of_bond.erase(it);
      } else {
        int digit = 1;
        while (digit < 100 &&
               (digit_in_use[static_cast<std::size_t>(digit)] ||
                std::find(freed.begin(), freed.end(), digit) != freed.end())) {
          ++digit;
        }
        if (digit >= 100) {
          throw std::runtime_error("more than 99 concurrently open ring bonds");
        }
        digit_in_use[static_cast<std::size_t>(digit)] = 1;
        digit_of_bond[bond] = digit;
        out += bond_symbol(bond);
        out += ring_token(digit);
      }
    }
    for (int digit : freed) digit_in_use[static_cast<std::size_t>(digit)] = 0;

    const auto &kids = children[static_cast<std::size_t>(atom)];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const auto [bond, child] = kids[k];
      if (k + 1 < kids.size()) {
        out += "(";
        emit(child, bond, out);
        out += ")";
      } else {
        emit(child, bond, out);
      }
    }
  }
};

}  // namespace

std::string canonicalize(const MoleculeGraph &graph) {
  MoleculeGraph g = graph;
  perceive_rings(g);
  if (g.atoms.empty()) return {};

  const std::vector<int> ranks = canonical_ranks(g);

  // Components, each rooted at its lowest-ranked atom.
  const std::size_t n = g.atoms.size();
  std::vector<int> component(n, -1);
  int n_components = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (component[a] != -1) continue;
    std::vector<int> queue{static_cast<int>(a)};
    component[a] = n_components;
    while (!queue.empty()) {
      const int cur = queue.back();
      queue.pop_back();
      for (const auto &[nbr, bond] : g.adjacency[static_cast<std::size_t>(cur)]) {
        (void)bond;
        if (component[static_cast<std::size_t>(nbr)] == -1) {
          component[static_cast<std::size_t>(nbr)] = n_components;
          queue.push_back(nbr);
        }
      }
    }
    ++n_components;
  }

  std::vector<int> root(static_cast<std::size_t>(n_components), -1);
  for (std::size_t a = 0; a < n; ++a) {
    int &r = root[static_cast<std::size_t>(component[a])];
    if (r == -1 || ranks[a] < ranks[static_cast<std::size_t>(r)]) {
      r = static_cast<int>(a);
    }
  }

  Writer writer(g, ranks);
  std::vector<std::string> parts;
  parts.reserve(static_cast<std::size_t>(n_components));
  for (int c = 0; c < n_components; ++c) {
    writer.classify(root[static_cast<std::size_t>(c)], -1);
  }
  for (int c = 0; c < n_components; ++c) {
    std::string part;
    writer.emit(root[static_cast<std::size_t>(c)], -1, part);
    parts.push_back(std::move(part));
  }
  std::sort(parts.begin(), parts.end());

  std::string out;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (p > 0) out += ".";
    out += parts[p];
  }
  return out;
}

}  // namespace chemscreen::chem
