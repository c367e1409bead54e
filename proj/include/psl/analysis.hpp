#pragma once
// Post-processing of sampled trajectories: thresholding to logic levels,
// word decoding, histograms keyed by decoded word tuples, total-variation
// comparison against exact distributions, and solver statistics.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "psl/core.hpp"

namespace psl {

// Voltage (or spin) to logic level: negative reads 0, positive reads 1.
// Exactly zero reads 1, matching the sampler's sgn(0) = +1 convention.
inline int threshold(double v) { return v >= 0.0 ? 1 : 0; }
inline int threshold(Spin m) { return m >= 0 ? 1 : 0; }

struct WordSpec {
  std::string name;
  std::vector<std::pair<int, int>> bits;  // (node index, bit position)
  bool msb_first = true;

  // Nodes given most-significant first.
  static WordSpec from_msb_nodes(std::string name, const std::vector<int>& nodes) {
    WordSpec w;
    w.name = std::move(name);
    w.msb_first = true;
    const int width = static_cast<int>(nodes.size());
    for (int k = 0; k < width; ++k) w.bits.push_back({nodes[k], width - 1 - k});
    return w;
  }

  // Nodes given least-significant first.
  static WordSpec from_lsb_nodes(std::string name, const std::vector<int>& nodes) {
    WordSpec w;
    w.name = std::move(name);
    w.msb_first = false;
    for (int k = 0; k < static_cast<int>(nodes.size()); ++k) w.bits.push_back({nodes[k], k});
    return w;
  }

  int width() const { return static_cast<int>(bits.size()); }

  void validate() const {
    std::vector<bool> seen;
    for (const auto& [node, pos] : bits) {
      if (pos < 0) throw std::invalid_argument("WordSpec '" + name + "': negative bit position");
      if (static_cast<std::size_t>(pos) >= seen.size()) seen.resize(pos + 1, false);
      if (seen[pos]) throw std::invalid_argument("WordSpec '" + name + "': duplicate bit position");
      seen[pos] = true;
      if (node < 0) throw std::invalid_argument("WordSpec '" + name + "': negative node index");
    }
  }

  std::uint64_t decode(const SpinState& m) const {
    std::uint64_t v = 0;
    for (const auto& [node, pos] : bits)
      if (threshold(m.at(node))) v |= std::uint64_t{1} << pos;
    return v;
  }
};

using WordKey = std::vector<std::uint64_t>;

inline WordKey decode(const std::vector<WordSpec>& words, const SpinState& m) {
  WordKey key;
  key.reserve(words.size());
  for (const auto& w : words) key.push_back(w.decode(m));
  return key;
}

struct Histogram {
  std::map<WordKey, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const WordKey& key) {
    ++counts[key];
    ++total;
  }
  double frequency(const WordKey& key) const {
    auto it = counts.find(key);
    return it == counts.end() || total == 0 ? 0.0 : static_cast<double>(it->second) / total;
  }
  // Most frequent key; ties resolve to the smallest key for determinism.
  WordKey argmax() const {
    WordKey best;
    std::uint64_t best_count = 0;
    for (const auto& [key, count] : counts)
      if (count > best_count) {
        best = key;
        best_count = count;
      }
    return best;
  }
};

inline Histogram histogram(const Trajectory& traj, const std::vector<WordSpec>& words) {
  if (traj.states.empty()) throw std::invalid_argument("histogram: empty trajectory");
  for (const auto& w : words) w.validate();
  Histogram h;
  for (const auto& m : traj.states) h.add(decode(words, m));
  return h;
}

using ProbTable = std::map<WordKey, double>;

// Exact distribution of the decoded words under the Boltzmann law.
inline ProbTable exact_word_distribution(const Network& net, const std::vector<WordSpec>& words) {
  const ExactDistribution dist = boltzmann_exact(net);
  ProbTable table;
  for (std::size_t idx = 0; idx < dist.prob.size(); ++idx)
    table[decode(words, dist.state_for(idx, net))] += dist.prob[idx];
  return table;
}

// Total variation distance (1/2) sum |p - q| over the union of supports.
inline double tv_distance(const Histogram& emp, const ProbTable& exact) {
  double tv = 0.0;
  for (const auto& [key, p] : exact) tv += std::abs(emp.frequency(key) - p);
  for (const auto& [key, count] : emp.counts)
    if (!exact.count(key)) tv += static_cast<double>(count) / emp.total;
  return 0.5 * tv;
}

inline double tv_distance(const Histogram& a, const Histogram& b) {
  double tv = 0.0;
  for (const auto& [key, count] : a.counts) tv += std::abs(a.frequency(key) - b.frequency(key));
  for (const auto& [key, count] : b.counts)
    if (!a.counts.count(key)) tv += b.frequency(key);
  return 0.5 * tv;
}

struct SolverStats {
  double satisfying_mass = 0.0;          // fraction of recorded states satisfying the predicate
  std::optional<long> first_solution;    // post-burn-in sweep index of the first hit
  bool argmax_satisfies = false;         // does the most frequent bin satisfy it
};

inline SolverStats solver_stats(const Trajectory& traj, const std::vector<WordSpec>& words,
                                const std::function<bool(const WordKey&)>& predicate) {
  if (traj.states.empty()) throw std::invalid_argument("solver_stats: empty trajectory");
  SolverStats stats;
  Histogram h;
  long hits = 0;
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const WordKey key = decode(words, traj.states[s]);
    h.add(key);
    if (predicate(key)) {
      ++hits;
      if (!stats.first_solution) stats.first_solution = static_cast<long>(s);
    }
  }
  stats.satisfying_mass = static_cast<double>(hits) / traj.states.size();
  stats.argmax_satisfies = h.total > 0 && predicate(h.argmax());
  return stats;
}

// CSV export: one column per word, then count and frequency; rows sorted by
// descending count, ties by ascending key.
inline void write_histogram_csv(std::ostream& out, const Histogram& h,
                                const std::vector<WordSpec>& words) {
  for (const auto& w : words) out << w.name << ",";
  out << "count,frequency\n";
  std::vector<std::pair<WordKey, std::uint64_t>> rows(h.counts.begin(), h.counts.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  char buf[32];
  for (const auto& [key, count] : rows) {
    for (std::uint64_t v : key) out << v << ",";
    std::snprintf(buf, sizeof buf, "%.9f", static_cast<double>(count) / h.total);
    out << count << "," << buf << "\n";
  }
}

}  // namespace psl
