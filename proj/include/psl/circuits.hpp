#pragma once
// Composable p-bit circuit blocks and the solver networks built from them.
//
// A Block is a named group of p-bits with a local coupling matrix and named
// ports. Blocks are joined by wires that drive the destination's input
// capacitors, so a wire has a direction: Forward couples the destination to
// the source's output, Reverse the other way round, Bidirectional both.
// Clamping a port adds a strong bias (8 units by default) or pins the node
// outright, depending on the flatten mode.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "psl/core.hpp"
#include "psl/synthesis.hpp"

namespace psl {

// Truth table of a 1-bit full adder: inputs Ci, B, A; outputs S, Co.
inline TruthTable full_adder_table() {
  TruthTable t;
  t.var_names = {"Ci", "B", "A", "S", "Co"};
  for (int k = 0; k < 8; ++k) {
    const int ci = (k >> 2) & 1, b = (k >> 1) & 1, a = k & 1;
    t.rows.push_back({ci, b, a, ci ^ b ^ a, (ci + b + a) >= 2 ? 1 : 0});
  }
  return t;
}

struct Block {
  std::string name;
  std::vector<std::string> node_names;
  Square<int> J;                      // local couplings, zero diagonal
  std::map<std::string, int> ports;   // port name -> local node index
  int clamp_weight = 8;

  int size() const { return static_cast<int>(node_names.size()); }

  void validate() const {
    if (name.empty()) throw std::invalid_argument("Block: empty name");
    if (J.n != size()) throw std::invalid_argument("Block '" + name + "': J size mismatch");
    if (!J.zero_diagonal()) throw std::invalid_argument("Block '" + name + "': J diagonal must be zero");
    for (const auto& [port, idx] : ports)
      if (idx < 0 || idx >= size())
        throw std::invalid_argument("Block '" + name + "': port '" + port + "' out of range");
  }
};

// The 5-p-bit invertible full adder. Couplings come from truth-table
// synthesis and are verified against the table once per process.
inline Block full_adder(std::string name = "fa") {
  static const SynthesisResult synth = [] {
    SynthesisResult r = synthesize(full_adder_table());
    const GroundStateReport rep =
        verify_ground_states(r.J_int, std::vector<double>(5, 0.0), full_adder_table());
    if (!rep.ok) throw std::runtime_error("full_adder: synthesized couplings failed verification");
    return r;
  }();
  Block b;
  b.name = std::move(name);
  b.node_names = {"Ci", "B", "A", "S", "Co"};
  b.J = synth.J_int;
  for (int i = 0; i < 5; ++i) b.ports[b.node_names[i]] = i;
  return b;
}

enum class WireDir { Forward, Reverse, Bidirectional };

inline std::string to_string(WireDir d) {
  switch (d) {
    case WireDir::Forward: return "forward";
    case WireDir::Reverse: return "reverse";
    default: return "bidirectional";
  }
}

inline WireDir wire_dir_from_string(const std::string& s) {
  if (s == "forward") return WireDir::Forward;
  if (s == "reverse") return WireDir::Reverse;
  if (s == "bidirectional") return WireDir::Bidirectional;
  throw std::invalid_argument("unknown wire direction '" + s + "'");
}

struct PortRef {
  std::string block;
  std::string port;
  auto operator<=>(const PortRef&) const = default;
  std::string str() const { return block + "." + port; }
};

struct Wire {
  PortRef from;
  PortRef to;
  int weight = 1;
  WireDir dir = WireDir::Forward;
};

class Composite {
 public:
  Composite& add(Block b) {
    b.validate();
    if (index_of_.count(b.name))
      throw std::invalid_argument("Composite: duplicate block '" + b.name + "'");
    index_of_[b.name] = blocks_.size();
    blocks_.push_back(std::move(b));
    return *this;
  }

  Composite& connect(PortRef from, PortRef to, int weight, WireDir dir) {
    if (weight <= 0) throw std::invalid_argument("connect: wire weight must be positive");
    require_port(from);
    require_port(to);
    if (from == to) throw std::invalid_argument("connect: self-wire on " + from.str());
    wires_.push_back(Wire{std::move(from), std::move(to), weight, dir});
    return *this;
  }

  Composite& clamp(PortRef p, int bit) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("clamp: bit must be 0 or 1");
    require_port(p);
    if (clamps_.count(p)) throw std::invalid_argument("clamp: " + p.str() + " already clamped");
    clamps_[p] = bit;
    return *this;
  }

  const Block& block(const std::string& name) const {
    auto it = index_of_.find(name);
    if (it == index_of_.end()) throw std::invalid_argument("Composite: no block '" + name + "'");
    return blocks_[it->second];
  }

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Wire>& wires() const { return wires_; }
  const std::map<PortRef, int>& clamps() const { return clamps_; }

 private:
  void require_port(const PortRef& p) const {
    const Block& b = block(p.block);
    if (!b.ports.count(p.port))
      throw std::invalid_argument("Composite: block '" + p.block + "' has no port '" + p.port + "'");
  }

  std::vector<Block> blocks_;
  std::vector<Wire> wires_;
  std::map<PortRef, int> clamps_;
  std::map<std::string, std::size_t> index_of_;
};

enum class ClampMode {
  Hard,  // clamped nodes are pinned and never updated
  Soft,  // clamps become a +-clamp_weight bias, as the hardware realizes them
};

struct Flattened {
  Network net;
  std::vector<std::string> labels;          // "block.node" per global index
  std::map<PortRef, int> index;             // (block, node name) -> global index

  int at(const PortRef& p) const {
    auto it = index.find(p);
    if (it == index.end()) throw std::invalid_argument("Flattened: unknown node " + p.str());
    return it->second;
  }
};

// Node order: blocks in insertion order, local order within each block.
inline Flattened flatten(const Composite& c, ClampMode mode = ClampMode::Hard) {
  Flattened out;
  int total = 0;
  for (const auto& b : c.blocks()) total += b.size();
  out.net = Network(total);

  int offset = 0;
  std::map<std::string, int> block_offset;
  for (const auto& b : c.blocks()) {
    block_offset[b.name] = offset;
    for (int i = 0; i < b.size(); ++i) {
      out.labels.push_back(b.name + "." + b.node_names[i]);
      out.index[PortRef{b.name, b.node_names[i]}] = offset + i;
      for (int j = 0; j < b.size(); ++j) out.net.J(offset + i, offset + j) = b.J(i, j);
    }
    offset += b.size();
  }

  for (const auto& w : c.wires()) {
    const int f = out.at(w.from);
    const int t = out.at(w.to);
    if (w.dir == WireDir::Forward || w.dir == WireDir::Bidirectional) out.net.J(t, f) += w.weight;
    if (w.dir == WireDir::Reverse || w.dir == WireDir::Bidirectional) out.net.J(f, t) += w.weight;
  }

  for (const auto& [port, bit] : c.clamps()) {
    const int idx = out.at(port);
    const Spin s = spin_from_bit(bit);
    if (mode == ClampMode::Hard) {
      out.net.clamps[idx] = s;
    } else {
      out.net.h[idx] += c.block(port.block).clamp_weight * static_cast<double>(s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adder stacks.

struct RippleCircuit {
  Composite comp;
  std::vector<PortRef> a_bits, b_bits;  // inputs, LSB first
  std::vector<PortRef> s_bits;          // sum, LSB first, width bits+1
  int bits = 0;
};

// Single row of chained full adders computing S = A + B. The carry-in of
// stage 0 is clamped to 0 and each carry-out drives the next carry-in.
inline RippleCircuit ripple_adder(int bits, int wire_weight = 1, const std::string& prefix = "fa") {
  if (bits < 1) throw std::invalid_argument("ripple_adder: need at least one bit");
  RippleCircuit rc;
  rc.bits = bits;
  for (int k = 0; k < bits; ++k) rc.comp.add(full_adder(prefix + std::to_string(k)));
  for (int k = 0; k + 1 < bits; ++k)
    rc.comp.connect({prefix + std::to_string(k), "Co"}, {prefix + std::to_string(k + 1), "Ci"},
                    wire_weight, WireDir::Forward);
  rc.comp.clamp({prefix + "0", "Ci"}, 0);
  for (int k = 0; k < bits; ++k) {
    rc.a_bits.push_back({prefix + std::to_string(k), "A"});
    rc.b_bits.push_back({prefix + std::to_string(k), "B"});
    rc.s_bits.push_back({prefix + std::to_string(k), "S"});
  }
  rc.s_bits.push_back({prefix + std::to_string(bits - 1), "Co"});
  return rc;
}

struct AdderCircuit {
  Composite comp;
  std::vector<PortRef> a_bits, b_bits, c_bits;  // input words, LSB first
  std::vector<PortRef> s_bits;                  // sum word, LSB first, width bits+2
  int bits = 0;
};

// Two rows of full adders computing S = (A + B) + C. Row 1 (bits blocks)
// adds A and B; its sum word X feeds row 2 (bits+1 blocks), which adds C.
// `interlayer` sets the direction of the X wires between the rows; `carry`
// sets the direction of the carry chains inside each row. `feedback` adds a
// weaker opposing wire on the inter-layer links (0 = none).
inline AdderCircuit three_sum(int bits = 4, int wire_weight = 1,
                              WireDir interlayer = WireDir::Forward, int feedback = 0,
                              WireDir carry = WireDir::Forward) {
  if (bits < 1) throw std::invalid_argument("three_sum: need at least one bit");
  if (feedback < 0) throw std::invalid_argument("three_sum: feedback weight must be nonnegative");
  AdderCircuit ac;
  ac.bits = bits;
  Composite& c = ac.comp;

  const auto r1 = [](int k) { return "r1f" + std::to_string(k); };
  const auto r2 = [](int k) { return "r2f" + std::to_string(k); };

  for (int k = 0; k < bits; ++k) c.add(full_adder(r1(k)));
  for (int k = 0; k <= bits; ++k) c.add(full_adder(r2(k)));

  for (int k = 0; k + 1 < bits; ++k)
    c.connect({r1(k), "Co"}, {r1(k + 1), "Ci"}, wire_weight, carry);
  for (int k = 0; k < bits; ++k)
    c.connect({r2(k), "Co"}, {r2(k + 1), "Ci"}, wire_weight, carry);

  // X word: row-1 sums plus the final row-1 carry, into the row-2 A inputs.
  // Feedback only applies to directed inter-layer wiring.
  const bool directed = interlayer != WireDir::Bidirectional;
  const WireDir opposing = interlayer == WireDir::Forward ? WireDir::Reverse : WireDir::Forward;
  for (int k = 0; k <= bits; ++k) {
    const PortRef src = k < bits ? PortRef{r1(k), "S"} : PortRef{r1(bits - 1), "Co"};
    const PortRef dst{r2(k), "A"};
    c.connect(src, dst, wire_weight, interlayer);
    if (feedback > 0 && directed) c.connect(src, dst, feedback, opposing);
  }

  c.clamp({r1(0), "Ci"}, 0);
  c.clamp({r2(0), "Ci"}, 0);
  c.clamp({r2(bits), "B"}, 0);  // C has no bit at position `bits`

  for (int k = 0; k < bits; ++k) {
    ac.a_bits.push_back({r1(k), "A"});
    ac.b_bits.push_back({r1(k), "B"});
    ac.c_bits.push_back({r2(k), "B"});
  }
  for (int k = 0; k <= bits; ++k) ac.s_bits.push_back({r2(k), "S"});
  ac.s_bits.push_back({r2(bits), "Co"});
  return ac;
}

// Subset-sum instance over a 3-element set. Elements are assigned to the
// input words largest first; every bit position where an element has a zero
// is clamped to 0, leaving one free selector bit per element, so each word
// reads either 0 or its element. The sum word is clamped to the target.
// Inter-layer wires default to Reverse: the clamped target drives the input
// side, which is what makes the search converge on the consistent subset.
inline AdderCircuit subset_sum(std::vector<int> elements, int bits, int target,
                               int wire_weight = 1, WireDir interlayer = WireDir::Reverse,
                               int feedback = 0) {
  if (elements.size() != 3)
    throw std::invalid_argument("subset_sum: exactly three elements are supported");
  std::sort(elements.rbegin(), elements.rend());
  for (int g : elements) {
    if (g < 1 || g >= (1 << bits))
      throw std::invalid_argument("subset_sum: element " + std::to_string(g) +
                                  " not representable in " + std::to_string(bits) + " bits");
    if ((g & (g - 1)) != 0)
      throw std::invalid_argument("subset_sum: element " + std::to_string(g) +
                                  " has more than one set bit (bit tying is not supported)");
  }
  if (target < 0 || target >= (1 << (bits + 2)))
    throw std::invalid_argument("subset_sum: target " + std::to_string(target) +
                                " not representable in the sum word");

  AdderCircuit ac = three_sum(bits, wire_weight, interlayer, feedback);
  const std::vector<const std::vector<PortRef>*> words{&ac.a_bits, &ac.b_bits, &ac.c_bits};
  for (std::size_t w = 0; w < 3; ++w)
    for (int k = 0; k < bits; ++k)
      if (((elements[w] >> k) & 1) == 0) ac.comp.clamp((*words[w])[k], 0);
  for (int k = 0; k < bits + 2; ++k) ac.comp.clamp(ac.s_bits[k], (target >> k) & 1);
  return ac;
}

// ---------------------------------------------------------------------------
// Text serialization.

inline void write_composite(std::ostream& out, const Composite& c) {
  out << "# psl composite\n";
  out << "blocks " << c.blocks().size() << "\n";
  for (const auto& b : c.blocks()) {
    out << "block " << b.name << " " << b.size() << " clamp_weight=" << b.clamp_weight << "\n";
    out << "nodes";
    for (const auto& nm : b.node_names) out << " " << nm;
    out << "\nports";
    for (const auto& [port, idx] : b.ports) out << " " << port << ":" << idx;
    out << "\nJ";
    for (int i = 0; i < b.size(); ++i)
      for (int j = 0; j < b.size(); ++j) out << " " << b.J(i, j);
    out << "\n";
  }
  out << "wires " << c.wires().size() << "\n";
  for (const auto& w : c.wires())
    out << "wire " << w.from.str() << " " << w.to.str() << " w=" << w.weight
        << " dir=" << to_string(w.dir) << "\n";
  out << "clamps " << c.clamps().size() << "\n";
  for (const auto& [port, bit] : c.clamps()) out << "clamp " << port.str() << " " << bit << "\n";
  out << "end\n";
}

namespace detail {

inline PortRef parse_port_ref(const std::string& s) {
  const auto dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
    throw std::invalid_argument("composite: bad port reference '" + s + "'");
  return PortRef{s.substr(0, dot), s.substr(dot + 1)};
}

}  // namespace detail

inline Composite read_composite(std::istream& in) {
  Composite c;
  std::string line;
  const auto next_tokens = [&](std::vector<std::string>& tokens) {
    tokens.clear();
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      for (std::string tok; ls >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  };

  std::vector<std::string> tok;
  while (next_tokens(tok)) {
    if (tok[0] == "blocks" || tok[0] == "wires" || tok[0] == "clamps") continue;
    if (tok[0] == "end") break;
    if (tok[0] == "block") {
      Block b;
      b.name = tok.at(1);
      const int n = std::stoi(tok.at(2));
      if (tok.size() > 3 && tok[3].rfind("clamp_weight=", 0) == 0)
        b.clamp_weight = std::stoi(tok[3].substr(13));
      if (!next_tokens(tok) || tok[0] != "nodes")
        throw std::invalid_argument("composite: expected nodes line");
      b.node_names.assign(tok.begin() + 1, tok.end());
      if (static_cast<int>(b.node_names.size()) != n)
        throw std::invalid_argument("composite: node count mismatch in block " + b.name);
      if (!next_tokens(tok) || tok[0] != "ports")
        throw std::invalid_argument("composite: expected ports line");
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto colon = tok[i].find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("composite: bad port entry '" + tok[i] + "'");
        b.ports[tok[i].substr(0, colon)] = std::stoi(tok[i].substr(colon + 1));
      }
      if (!next_tokens(tok) || tok[0] != "J" || tok.size() != 1 + std::size_t(n) * n)
        throw std::invalid_argument("composite: bad J line in block " + b.name);
      b.J = Square<int>(n);
      for (int i = 0; i < n * n; ++i) b.J.a[i] = std::stoi(tok[1 + i]);
      c.add(std::move(b));
    } else if (tok[0] == "wire") {
      if (tok.size() != 5) throw std::invalid_argument("composite: bad wire line");
      int weight = 0;
      WireDir dir = WireDir::Forward;
      if (tok[3].rfind("w=", 0) != 0 || tok[4].rfind("dir=", 0) != 0)
        throw std::invalid_argument("composite: bad wire line");
      weight = std::stoi(tok[3].substr(2));
      dir = wire_dir_from_string(tok[4].substr(4));
      c.connect(detail::parse_port_ref(tok[1]), detail::parse_port_ref(tok[2]), weight, dir);
    } else if (tok[0] == "clamp") {
      if (tok.size() != 3) throw std::invalid_argument("composite: bad clamp line");
      c.clamp(detail::parse_port_ref(tok[1]), std::stoi(tok[2]));
    } else {
      throw std::invalid_argument("composite: unexpected token '" + tok[0] + "'");
    }
  }
  return c;
}

}  // namespace psl
