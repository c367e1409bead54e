#pragma once
// Behavioral engine for networks of binary stochastic neurons (p-bits).
//
// A p-bit flips between -1 and +1 with a bias set by the tanh of its input;
// the input of node i is I0 * (h_i + sum_j J_ij * m_j). Updates are strictly
// sequential (each update sees the latest state of every other node), which
// for symmetric J makes a sweep a Gibbs pass over the Boltzmann distribution
// exp(-I0 * E). Exact enumeration of that distribution is provided as an
// oracle for small networks.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "psl/rng.hpp"

namespace psl {

using Spin = std::int8_t;  // -1 or +1
using SpinState = std::vector<Spin>;

inline Spin spin_from_bit(int bit) { return bit ? Spin{1} : Spin{-1}; }

// Dense square matrix, row-major.
template <typename T>
struct Square {
  int n = 0;
  std::vector<T> a;

  Square() = default;
  explicit Square(int size, T fill = T{}) : n(size), a(static_cast<std::size_t>(size) * size, fill) {}

  T operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const T* row(int i) const { return a.data() + static_cast<std::size_t>(i) * n; }

  bool zero_diagonal() const {
    for (int i = 0; i < n; ++i)
      if ((*this)(i, i) != T{}) return false;
    return true;
  }
  bool symmetric() const {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }
};

enum class UpdateSchedule {
  RandomSequential,  // fresh uniform permutation of the free nodes each sweep
  FixedSequential,   // free nodes in index order
};

struct Network {
  int n = 0;
  Square<double> J;             // couplings, zero diagonal, may be asymmetric
  std::vector<double> h;        // per-node bias
  double I0 = 1.0;              // global gain; acts like an inverse temperature
  std::map<int, Spin> clamps;   // nodes pinned to a value and never updated

  Network() = default;
  explicit Network(int nodes) : n(nodes), J(nodes), h(nodes, 0.0) {}

  bool symmetric() const { return J.symmetric(); }

  std::vector<int> free_nodes() const {
    std::vector<int> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
      if (!clamps.count(i)) out.push_back(i);
    return out;
  }

  void validate() const {
    if (n < 0) throw std::invalid_argument("Network: negative node count");
    if (J.n != n || static_cast<int>(h.size()) != n)
      throw std::invalid_argument("Network: J/h size does not match node count");
    if (!J.zero_diagonal()) throw std::invalid_argument("Network: J diagonal must be zero");
    if (I0 < 0) throw std::invalid_argument("Network: I0 must be nonnegative");
    for (const auto& [node, value] : clamps) {
      if (node < 0 || node >= n) throw std::invalid_argument("Network: clamp node out of range");
      if (value != 1 && value != -1) throw std::invalid_argument("Network: clamp value must be +-1");
    }
  }
};

// Input of node i: I0 * (h_i + sum_j J_ij * m_j). The diagonal is zero, so
// summing over all j equals the sum over j != i.
inline double compute_input(int i, const SpinState& m, const Network& net) {
  if (i < 0 || i >= net.n) throw std::out_of_range("compute_input: node index out of range");
  if (static_cast<int>(m.size()) != net.n)
    throw std::invalid_argument("compute_input: state size does not match network");
  double field = net.h[i];
  const double* row = net.J.row(i);
  for (int j = 0; j < net.n; ++j) field += row[j] * m[j];
  return net.I0 * field;
}

// One stochastic update: sgn(rand(-1,1) + tanh(I)), with sgn(0) = +1 so runs
// are reproducible bit for bit. Implies P(+1) = (1 + tanh I) / 2.
inline Spin sample_pbit(double input, RngStream& rng) {
  const double r = rng.uniform_pm1();
  return (r + std::tanh(input)) >= 0.0 ? Spin{1} : Spin{-1};
}

namespace detail {

inline void update_node(SpinState& m, const Network& net, int i, RngStream& rng) {
  double field = net.h[i];
  const double* row = net.J.row(i);
  for (int j = 0; j < net.n; ++j) field += row[j] * m[j];
  m[i] = sample_pbit(net.I0 * field, rng);
}

inline void sweep_in_place(SpinState& m, const Network& net, std::vector<int>& order,
                           UpdateSchedule sched, RngStream& rng) {
  if (sched == UpdateSchedule::RandomSequential) shuffle(order, rng);
  for (int i : order) update_node(m, net, i, rng);
}

}  // namespace detail

// One sweep: every unclamped node updated once, in schedule order, each
// update using the latest values of all other nodes.
inline SpinState sweep(SpinState m, const Network& net, UpdateSchedule sched, RngStream& rng) {
  net.validate();
  if (static_cast<int>(m.size()) != net.n)
    throw std::invalid_argument("sweep: state size does not match network");
  std::vector<int> order = net.free_nodes();
  detail::sweep_in_place(m, net, order, sched, rng);
  return m;
}

struct Trajectory {
  std::vector<SpinState> states;  // one snapshot per post-burn-in sweep
  long burn_in = 0;
};

// Runs `sweeps` sweeps from `init` (or a random state drawn from rng) and
// records the states after the first `burn_in` sweeps are discarded.
inline Trajectory run(const Network& net, long sweeps, long burn_in, RngStream& rng,
                      UpdateSchedule sched = UpdateSchedule::RandomSequential,
                      std::optional<SpinState> init = std::nullopt) {
  net.validate();
  if (burn_in < 0 || sweeps <= burn_in)
    throw std::invalid_argument("run: need sweeps > burn_in >= 0");

  SpinState m;
  if (init) {
    m = std::move(*init);
    if (static_cast<int>(m.size()) != net.n)
      throw std::invalid_argument("run: init state size does not match network");
  } else {
    m.resize(net.n);
    for (int i = 0; i < net.n; ++i) m[i] = net.clamps.count(i) ? Spin{0} : rng.random_spin();
  }
  for (const auto& [node, value] : net.clamps) m[node] = value;
  for (Spin s : m)
    if (s != 1 && s != -1) throw std::invalid_argument("run: init spins must be -1 or +1");

  Trajectory traj;
  traj.burn_in = burn_in;
  traj.states.reserve(static_cast<std::size_t>(sweeps - burn_in));
  std::vector<int> order = net.free_nodes();
  for (long s = 0; s < sweeps; ++s) {
    detail::sweep_in_place(m, net, order, sched, rng);
    if (s >= burn_in) traj.states.push_back(m);
  }
  return traj;
}

// Ising-style energy -(h.m + m.J.m / 2). Only defined for symmetric J; the
// gain I0 is excluded (it scales the distribution, not the landscape).
inline double energy(const SpinState& m, const Network& net) {
  net.validate();
  if (static_cast<int>(m.size()) != net.n)
    throw std::invalid_argument("energy: state size does not match network");
  if (!net.symmetric())
    throw std::invalid_argument("energy: undefined for asymmetric (directed) J");
  double field_term = 0.0;
  double pair_term = 0.0;
  for (int i = 0; i < net.n; ++i) {
    field_term += net.h[i] * m[i];
    const double* row = net.J.row(i);
    double s = 0.0;
    for (int j = 0; j < net.n; ++j) s += row[j] * m[j];
    pair_term += m[i] * s;
  }
  return -(field_term + 0.5 * pair_term);
}

// Exact Boltzmann distribution over the unclamped nodes: P ~ exp(-I0 * E)
// with clamped nodes held fixed inside the energy.
struct ExactDistribution {
  std::vector<int> free_nodes;  // ascending node indices
  std::vector<double> prob;     // indexed by bitmask; bit k set = free_nodes[k] is +1

  SpinState state_for(std::size_t index, const Network& net) const {
    SpinState m(net.n, Spin{0});
    for (const auto& [node, value] : net.clamps) m[node] = value;
    for (std::size_t k = 0; k < free_nodes.size(); ++k)
      m[free_nodes[k]] = (index >> k) & 1u ? Spin{1} : Spin{-1};
    return m;
  }
};

inline ExactDistribution boltzmann_exact(const Network& net) {
  net.validate();
  if (!net.symmetric())
    throw std::invalid_argument("boltzmann_exact: undefined for asymmetric (directed) J");

  ExactDistribution dist;
  dist.free_nodes = net.free_nodes();
  const int f = static_cast<int>(dist.free_nodes.size());
  if (f > 20)
    throw std::invalid_argument("boltzmann_exact: " + std::to_string(f) +
                                " free nodes exceeds the enumeration limit of 20");

  const std::size_t count = std::size_t{1} << f;
  std::vector<double> energies(count);

  SpinState m(net.n, Spin{-1});
  for (const auto& [node, value] : net.clamps) m[node] = value;
  double e = energy(m, net);
  energies[0] = e;

  // Gray-code walk: one spin flip per step, O(n) energy delta.
  std::size_t gray = 0;
  for (std::size_t k = 1; k < count; ++k) {
    const int bit = std::countr_zero(k);
    const int node = dist.free_nodes[bit];
    double field = net.h[node];
    const double* row = net.J.row(node);
    for (int j = 0; j < net.n; ++j) field += row[j] * m[j];
    e += 2.0 * m[node] * field;
    m[node] = static_cast<Spin>(-m[node]);
    gray ^= std::size_t{1} << bit;
    energies[gray] = e;
  }

  double emin = energies[0];
  for (double x : energies) emin = std::min(emin, x);
  dist.prob.resize(count);
  double z = 0.0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    dist.prob[idx] = std::exp(-net.I0 * (energies[idx] - emin));
    z += dist.prob[idx];
  }
  for (double& p : dist.prob) p /= z;
  return dist;
}

}  // namespace psl
