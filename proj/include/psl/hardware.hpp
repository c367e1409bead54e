#pragma once
// Electrical model of the weighted p-bit.
//
// Each node is a stochastic output stage (supply rails +-V_DD/2, sigmoid
// width V0) fed by a capacitive voltage adder: the outputs of other nodes
// drive banks of unit capacitors C0 on a floating input, together with bias
// capacitors tied to +-V_DD/2 and grounded padding capacitors. An inverter
// with transfer width nu0 amplifies the attenuated divider voltage before it
// reaches the output stage. Weights are integer capacitor counts; negative
// weights tap the complementary output V- instead of V+. Padding every node
// to the same total load K makes the effective behavioral gain
//
//     I0 = (V_DD / 2 nu0) (V_DD / 2 V0) / (Cg/C0 + K)
//
// independent of the node, which is what ties this model to the behavioral
// network: m = V_out / (V_DD/2), I = V_in / V0, J = signed capacitor counts.

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "psl/core.hpp"

namespace psl {

struct DeviceParams {
  double v_dd = 0.8;        // supply, rails at +-v_dd/2 [V]
  double v0 = 0.022;        // output-stage sigmoid width [V]
  double nu0 = 0.05;        // inverter transfer width [V]
  double c0 = 100e-18;      // unit capacitor [F]
  double cg = 100e-18;      // intrinsic gate capacitance of the adder inverter [F]
  double g0_inv = 62e3;     // tunnel-junction resistance [ohm]; informational only

  double rail() const { return v_dd / 2.0; }
  double amplification() const { return (v_dd / (2.0 * nu0)) * (v_dd / (2.0 * v0)); }

  void validate() const {
    if (v_dd <= 0 || v0 <= 0 || nu0 <= 0 || c0 <= 0 || cg <= 0 || g0_inv <= 0)
      throw std::invalid_argument("DeviceParams: all parameters must be positive");
    if (amplification() <= 10.0)
      throw std::invalid_argument("DeviceParams: amplification factor must exceed 10");
  }
};

// Integer capacitor allocation for one network. Weights w and their signs
// carry the couplings, b/bias_sign the biases, z the grounded padding; every
// node's total count b + z + sum(w) equals the same K.
struct CapAllocation {
  int n = 0;
  Square<int> w;                // unit-capacitor counts |J_ij|, zero diagonal
  Square<int> sign;             // -1/0/+1: which output (V- or V+) drives the input
  std::vector<int> b;           // bias capacitor counts
  std::vector<int> bias_sign;   // -1/0/+1: bias tied to -V_DD/2 or +V_DD/2
  std::vector<int> z;           // grounded capacitor counts
  int k = 0;

  int row_load(int i) const {
    int load = b[i] + z[i];
    for (int j = 0; j < n; ++j) load += w(i, j);
    return load;
  }

  void validate() const {
    if (w.n != n || sign.n != n || static_cast<int>(b.size()) != n ||
        static_cast<int>(bias_sign.size()) != n || static_cast<int>(z.size()) != n)
      throw std::invalid_argument("CapAllocation: inconsistent sizes");
    if (!w.zero_diagonal()) throw std::invalid_argument("CapAllocation: w diagonal must be zero");
    for (int i = 0; i < n; ++i) {
      if (b[i] < 0 || z[i] < 0) throw std::invalid_argument("CapAllocation: negative capacitor count");
      if (b[i] > 0 && bias_sign[i] == 0)
        throw std::invalid_argument("CapAllocation: bias capacitors need a bias sign");
      for (int j = 0; j < n; ++j) {
        if (w(i, j) < 0) throw std::invalid_argument("CapAllocation: negative weight count");
        if (w(i, j) > 0 && sign(i, j) == 0)
          throw std::invalid_argument("CapAllocation: wired input needs a sign");
      }
      if (row_load(i) != k)
        throw std::invalid_argument("CapAllocation: node " + std::to_string(i) +
                                    " violates the constant-K rule");
    }
  }
};

// Divider voltage at the floating input of node i given the output voltages
// of all nodes. Sign taps realize negative weights by using V- of the source.
inline double vbar(int i, const std::vector<double>& vout, const CapAllocation& a,
                   const DeviceParams& p) {
  if (i < 0 || i >= a.n) throw std::out_of_range("vbar: node index out of range");
  if (static_cast<int>(vout.size()) != a.n)
    throw std::invalid_argument("vbar: output vector size does not match allocation");
  double num = a.bias_sign[i] * p.rail() * a.b[i] * p.c0;
  double cap_sum = 0.0;
  for (int j = 0; j < a.n; ++j) {
    num += a.sign(i, j) * vout[j] * a.w(i, j) * p.c0;
    cap_sum += a.w(i, j);
  }
  const double den = p.cg + (a.z[i] + a.b[i] + cap_sum) * p.c0;
  return num / den;
}

// Inverter gain stage: (V_DD/2) tanh(vb / nu0); linear with slope
// V_DD / (2 nu0) for small inputs.
inline double inverter(double vb, const DeviceParams& p) {
  return p.rail() * std::tanh(vb / p.nu0);
}

// Stochastic output stage: +-V_DD/2 with P(+) = (1 + tanh(vin/V0)) / 2.
inline double pbit_output(double vin, const DeviceParams& p, RngStream& rng) {
  const double r = rng.uniform_pm1();
  return (r + std::tanh(vin / p.v0)) >= 0.0 ? p.rail() : -p.rail();
}

// Builds the allocation for integer couplings J and biases h. k_target is
// the common per-node load (a larger value lowers the effective gain); it
// must cover the largest row's own demand so the grounded padding z stays
// nonnegative.
inline CapAllocation allocate(const Square<int>& J, const std::vector<int>& h, int k_target) {
  const int n = J.n;
  if (static_cast<int>(h.size()) != n)
    throw std::invalid_argument("allocate: h size does not match J");
  if (!J.zero_diagonal()) throw std::invalid_argument("allocate: J diagonal must be zero");

  CapAllocation a;
  a.n = n;
  a.w = Square<int>(n);
  a.sign = Square<int>(n);
  a.b.resize(n);
  a.bias_sign.resize(n);
  a.z.resize(n);
  a.k = k_target;

  int max_load = 0;
  for (int i = 0; i < n; ++i) {
    a.b[i] = std::abs(h[i]);
    a.bias_sign[i] = h[i] > 0 ? 1 : (h[i] < 0 ? -1 : 0);
    int load = a.b[i];
    for (int j = 0; j < n; ++j) {
      a.w(i, j) = std::abs(J(i, j));
      a.sign(i, j) = J(i, j) > 0 ? 1 : (J(i, j) < 0 ? -1 : 0);
      load += a.w(i, j);
    }
    a.z[i] = k_target - load;
    max_load = std::max(max_load, load);
  }
  if (k_target < max_load)
    throw std::invalid_argument("allocate: k_target " + std::to_string(k_target) +
                                " is below the maximum row load " + std::to_string(max_load));
  a.validate();
  return a;
}

inline double effective_I0(const CapAllocation& a, const DeviceParams& p) {
  a.validate();
  p.validate();
  return p.amplification() / (p.cg / p.c0 + a.k);
}

// Behavioral view of an allocation: signed counts as J and h, and the
// common gain as I0.
inline Network map_to_behavioral(const CapAllocation& a, const DeviceParams& p) {
  a.validate();
  Network net(a.n);
  for (int i = 0; i < a.n; ++i) {
    net.h[i] = a.bias_sign[i] * static_cast<double>(a.b[i]);
    for (int j = 0; j < a.n; ++j) net.J(i, j) = a.sign(i, j) * static_cast<double>(a.w(i, j));
  }
  net.I0 = effective_I0(a, p);
  return net;
}

// S/D/Q terminal split of one weight: units of 4, then 2, then 1.
struct TerminalDecomposition {
  int q = 0, d = 0, s = 0;
  int total() const { return 4 * q + 2 * d + s; }
};

inline TerminalDecomposition decompose_terminals(int weight) {
  if (weight < 0) throw std::invalid_argument("decompose_terminals: negative weight");
  TerminalDecomposition t;
  t.q = weight / 4;
  t.d = (weight % 4) / 2;
  t.s = weight % 2;
  return t;
}

// One sweep of the electrical chain: divider -> inverter -> output stage per
// unclamped node, sequential like the behavioral sweep. Clamped nodes are
// held at their rail.
inline std::vector<double> hardware_sweep(std::vector<double> vout, const CapAllocation& a,
                                          const DeviceParams& p, const std::map<int, Spin>& clamps,
                                          UpdateSchedule sched, RngStream& rng) {
  if (static_cast<int>(vout.size()) != a.n)
    throw std::invalid_argument("hardware_sweep: state size does not match allocation");
  std::vector<int> order;
  for (int i = 0; i < a.n; ++i)
    if (!clamps.count(i)) order.push_back(i);
  if (sched == UpdateSchedule::RandomSequential) shuffle(order, rng);
  for (int i : order) vout[i] = pbit_output(inverter(vbar(i, vout, a, p), p), p, rng);
  return vout;
}

// Runs the electrical chain and records thresholded states so results are
// directly comparable with behavioral trajectories.
inline Trajectory hardware_run(const CapAllocation& a, const DeviceParams& p, long sweeps,
                               long burn_in, const std::map<int, Spin>& clamps, RngStream& rng,
                               UpdateSchedule sched = UpdateSchedule::RandomSequential) {
  a.validate();
  p.validate();
  if (burn_in < 0 || sweeps <= burn_in)
    throw std::invalid_argument("hardware_run: need sweeps > burn_in >= 0");

  std::vector<double> vout(a.n);
  for (int i = 0; i < a.n; ++i) {
    auto it = clamps.find(i);
    vout[i] = (it != clamps.end() ? it->second : rng.random_spin()) * p.rail();
  }
  std::vector<int> order;
  for (int i = 0; i < a.n; ++i)
    if (!clamps.count(i)) order.push_back(i);

  Trajectory traj;
  traj.burn_in = burn_in;
  traj.states.reserve(static_cast<std::size_t>(sweeps - burn_in));
  for (long s = 0; s < sweeps; ++s) {
    std::vector<int> ord = order;
    if (sched == UpdateSchedule::RandomSequential) shuffle(ord, rng);
    for (int i : ord) vout[i] = pbit_output(inverter(vbar(i, vout, a, p), p), p, rng);
    if (s >= burn_in) {
      SpinState m(a.n);
      for (int i = 0; i < a.n; ++i) m[i] = vout[i] >= 0.0 ? Spin{1} : Spin{-1};
      traj.states.push_back(std::move(m));
    }
  }
  return traj;
}

namespace detail {

inline std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace detail

// Line-oriented netlist: one line per unit capacitor, tagged with the S/D/Q
// terminal it belongs to (weights split into 4C, 2C, 1C terminals), plus
// BIAS and GND padding lines. Deterministic ordering, so re-export of the
// same allocation is byte-identical. Every node emits exactly K lines.
inline void export_netlist(std::ostream& out, const CapAllocation& a, const DeviceParams& p) {
  if (a.n > 0) a.validate();
  p.validate();
  out << "# capacitive p-bit netlist\n";
  out << "# v_dd=" << detail::format_g(p.v_dd) << " v0=" << detail::format_g(p.v0)
      << " nu0=" << detail::format_g(p.nu0) << " c0=" << detail::format_g(p.c0)
      << " cg=" << detail::format_g(p.cg) << " g0_inv=" << detail::format_g(p.g0_inv) << "\n";
  out << "# n=" << a.n << " k=" << a.k << " unit_caps=" << static_cast<long>(a.n) * a.k << "\n";
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) {
      if (a.w(i, j) == 0) continue;
      const std::string src = (a.sign(i, j) > 0 ? "V+" : "V-") + std::to_string(j);
      const TerminalDecomposition t = decompose_terminals(a.w(i, j));
      for (int u = 0; u < 4 * t.q; ++u) out << "node=" << i << " class=Q src=" << src << "\n";
      for (int u = 0; u < 2 * t.d; ++u) out << "node=" << i << " class=D src=" << src << "\n";
      for (int u = 0; u < t.s; ++u) out << "node=" << i << " class=S src=" << src << "\n";
    }
    const std::string bias_src = a.bias_sign[i] >= 0 ? "VBIAS+" : "VBIAS-";
    for (int u = 0; u < a.b[i]; ++u) out << "node=" << i << " class=BIAS src=" << bias_src << "\n";
    for (int u = 0; u < a.z[i]; ++u) out << "node=" << i << " class=GND src=GND\n";
  }
}

inline std::string export_netlist(const CapAllocation& a, const DeviceParams& p) {
  std::ostringstream ss;
  export_netlist(ss, a, p);
  return ss.str();
}

}  // namespace psl
