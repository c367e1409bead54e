// Acceptance suite: end-to-end checks of the sampler law, the enumeration
// oracles, the solver networks and the hardware mapping, each at a pinned
// tolerance. Prints one pass/fail line per criterion and exits nonzero if
// any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "psl/analysis.hpp"
#include "psl/circuits.hpp"
#include "psl/experiment.hpp"
#include "psl/hardware.hpp"

using namespace psl;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Criterion> g_results;

template <typename F>
void criterion(int id, const std::string& name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  g_results.push_back({id, name, pass, detail, secs});
  std::printf("[%s] %2d %-24s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
}

Network fa_network(double i0) {
  static const SynthesisResult synth = synthesize(full_adder_table());
  return synth.network(i0);
}

std::vector<WordSpec> fa_words() {
  std::vector<WordSpec> words;
  const std::vector<std::string> names{"Ci", "B", "A", "S", "Co"};
  for (int i = 0; i < 5; ++i) words.push_back(WordSpec::from_msb_nodes(names[i], {i}));
  return words;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --------------------------------------------------------------------------

bool c1_sampler_law(std::string& detail) {
  double worst = 0.0;
  for (int iv = -2; iv <= 2; ++iv) {
    RngStream rng(100 + iv);
    const int n = 100000;
    int plus = 0;
    for (int i = 0; i < n; ++i)
      if (sample_pbit(iv, rng) == 1) ++plus;
    const double expected = (1.0 + std::tanh(static_cast<double>(iv))) / 2.0;
    worst = std::max(worst, std::abs(static_cast<double>(plus) / n - expected));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |P_emp - P| = %.4f over I in {-2..2} (tol 0.01)", worst);
  detail = buf;
  return worst <= 0.01;
}

bool c2_gibbs_oracle(std::string& detail) {
  const Network net = fa_network(1.0);
  const std::vector<WordSpec> words = fa_words();
  const ProbTable exact = exact_word_distribution(net, words);
  double worst = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    RngStream rng(seed);
    const Trajectory traj = run(net, 1000000, 100000, rng);
    worst = std::max(worst, tv_distance(histogram(traj, words), exact));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst TV over 3 seeds = %.4f (tol 0.02, 1e6 sweeps)", worst);
  detail = buf;
  return worst < 0.02;
}

bool c3_synthesis(std::string& detail) {
  const TruthTable table = full_adder_table();
  const SynthesisResult synth = synthesize(table);
  if (!synth.J_int.symmetric() || !synth.J_int.zero_diagonal()) {
    detail = "couplings not symmetric / zero-diagonal";
    return false;
  }
  const GroundStateReport rep =
      verify_ground_states(synth.J_int, std::vector<double>(5, 0.0), table);
  std::set<std::uint32_t> want;
  for (std::size_t r = 0; r < table.rows.size(); ++r) want.insert(table.row_id(r));
  const bool exact =
      rep.ok && std::set<std::uint32_t>(rep.ground_states.begin(), rep.ground_states.end()) == want;
  detail = "ground set == 8 truth lines over 32 states, scale " + std::to_string(synth.scale);
  return exact;
}

bool c4_fa_directed(std::string& detail) {
  const TruthTable table = full_adder_table();
  double worst_tv = 0.0;
  for (int k = 0; k < 8; ++k) {
    Composite comp;
    comp.add(full_adder("fa"));
    comp.clamp({"fa", "Ci"}, (k >> 2) & 1).clamp({"fa", "B"}, (k >> 1) & 1).clamp({"fa", "A"}, k & 1);
    Flattened fl = flatten(comp, ClampMode::Hard);
    fl.net.I0 = 1.0;
    const std::vector<WordSpec> words{
        WordSpec::from_msb_nodes("S", {fl.at({"fa", "S"})}),
        WordSpec::from_msb_nodes("Co", {fl.at({"fa", "Co"})})};
    RngStream rng(200 + k);
    const Trajectory traj = run(fl.net, 1000000, 100000, rng);
    const Histogram hist = histogram(traj, words);
    const WordKey want{static_cast<std::uint64_t>(table.rows[k][3]),
                       static_cast<std::uint64_t>(table.rows[k][4])};
    if (hist.argmax() != want) {
      detail = "wrong argmax for input combination " + std::to_string(k);
      return false;
    }
    worst_tv = std::max(worst_tv, tv_distance(hist, exact_word_distribution(fl.net, words)));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "8/8 argmax correct, worst TV = %.4f (tol 0.03)", worst_tv);
  detail = buf;
  return worst_tv < 0.03;
}

bool c5_fa_inverted(std::string& detail) {
  Composite comp;
  comp.add(full_adder("fa"));
  comp.clamp({"fa", "S"}, 0).clamp({"fa", "Co"}, 1);
  Flattened fl = flatten(comp, ClampMode::Hard);
  fl.net.I0 = 1.0;
  const std::vector<WordSpec> words{WordSpec::from_msb_nodes(
      "CiBA", {fl.at({"fa", "Ci"}), fl.at({"fa", "B"}), fl.at({"fa", "A"})})};
  RngStream rng(210);
  const Trajectory traj = run(fl.net, 1000000, 100000, rng);
  const Histogram hist = histogram(traj, words);

  std::vector<std::pair<std::uint64_t, WordKey>> ranked;
  for (const auto& [key, count] : hist.counts) ranked.push_back({count, key});
  std::sort(ranked.rbegin(), ranked.rend());
  std::set<std::uint64_t> top3;
  for (int r = 0; r < 3 && r < static_cast<int>(ranked.size()); ++r)
    top3.insert(ranked[r].second[0]);
  const double tv = tv_distance(hist, exact_word_distribution(fl.net, words));
  char buf[96];
  std::snprintf(buf, sizeof buf, "top-3 = {011,101,110}, TV = %.4f (tol 0.03)", tv);
  detail = buf;
  return top3 == std::set<std::uint64_t>{0b011, 0b101, 0b110} && tv < 0.03;
}

bool c6_three_sum(std::string& detail) {
  const int sum = 15;
  int seeds_with_solution = 0;
  int big_bins = 0, big_bins_satisfying = 0;
  double min_mass = 1.0;
  for (int seed = 301; seed <= 310; ++seed) {
    AdderCircuit ac = three_sum(4, 2, WireDir::Forward, 0);
    for (int k = 0; k < 6; ++k) ac.comp.clamp(ac.s_bits[k], (sum >> k) & 1);
    Flattened fl = flatten(ac.comp, ClampMode::Hard);
    fl.net.I0 = 2.0;
    const auto nodes_of = [&](const std::vector<PortRef>& refs) {
      std::vector<int> nodes;
      for (const auto& r : refs) nodes.push_back(fl.at(r));
      return nodes;
    };
    const std::vector<WordSpec> words{WordSpec::from_lsb_nodes("A", nodes_of(ac.a_bits)),
                                      WordSpec::from_lsb_nodes("B", nodes_of(ac.b_bits)),
                                      WordSpec::from_lsb_nodes("C", nodes_of(ac.c_bits))};
    RngStream rng(seed);
    const Trajectory traj = run(fl.net, 100000, 10000, rng);
    const auto satisfies = [&](const WordKey& k) {
      return k[0] + k[1] + k[2] == static_cast<std::uint64_t>(sum);
    };
    const SolverStats st = solver_stats(traj, words, satisfies);
    if (st.first_solution) ++seeds_with_solution;
    min_mass = std::min(min_mass, st.satisfying_mass);
    const Histogram hist = histogram(traj, words);
    for (const auto& [key, count] : hist.counts)
      if (static_cast<double>(count) / hist.total > 0.01) {
        ++big_bins;
        if (satisfies(key)) ++big_bins_satisfying;
      }
  }
  const double frac = big_bins == 0 ? 1.0 : static_cast<double>(big_bins_satisfying) / big_bins;
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "%d/10 seeds solved, bins>1%%: %d (%d satisfying, frac %.2f), min mass %.3f",
                seeds_with_solution, big_bins, big_bins_satisfying, frac, min_mass);
  detail = buf;
  return seeds_with_solution == 10 && frac >= 0.8;
}

int ssp_successes(int target, WireDir dir, int base_seed) {
  // unique subset of {4, 2, 1} summing to the target, as (A, B, C) words
  WordKey want(3, 0);
  for (int mask = 0; mask < 8; ++mask) {
    const int s = (mask & 1 ? 4 : 0) + (mask & 2 ? 2 : 0) + (mask & 4 ? 1 : 0);
    if (s == target) want = {mask & 1 ? 4u : 0u, mask & 2 ? 2u : 0u, mask & 4 ? 1u : 0u};
  }
  int wins = 0;
  for (int seed = base_seed + 1; seed <= base_seed + 10; ++seed) {
    const AdderCircuit sc = subset_sum({1, 2, 4}, 3, target, 1, dir, 0);
    Flattened fl = flatten(sc.comp, ClampMode::Hard);
    fl.net.I0 = 1.0;
    const auto nodes_of = [&](const std::vector<PortRef>& refs) {
      std::vector<int> nodes;
      for (const auto& r : refs) nodes.push_back(fl.at(r));
      return nodes;
    };
    const std::vector<WordSpec> words{WordSpec::from_lsb_nodes("A", nodes_of(sc.a_bits)),
                                      WordSpec::from_lsb_nodes("B", nodes_of(sc.b_bits)),
                                      WordSpec::from_lsb_nodes("C", nodes_of(sc.c_bits))};
    RngStream rng(seed);
    const Trajectory traj = run(fl.net, 100000, 10000, rng);
    if (histogram(traj, words).argmax() == want) ++wins;
  }
  return wins;
}

bool c7_subset_sum(std::string& detail) {
  int reverse_total = 0, forward_total = 0;
  bool per_target_ok = true;
  std::string per;
  for (int target : {3, 5, 6}) {
    const int rev = ssp_successes(target, WireDir::Reverse, 400 + 10 * target);
    const int fwd = ssp_successes(target, WireDir::Forward, 400 + 10 * target);
    reverse_total += rev;
    forward_total += fwd;
    if (rev < 9) per_target_ok = false;
    per += " t" + std::to_string(target) + ":" + std::to_string(rev) + "/10";
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "reverse%s fwd_total %d < rev_total %d", per.c_str(),
                forward_total, reverse_total);
  detail = buf;
  return per_target_ok && forward_total < reverse_total;
}

bool c8_hardware_mapping(std::string& detail) {
  const DeviceParams params;
  RngStream rng(800);
  // (a) + (b): 100 random integer networks, exact round trip and constant K
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(5));
    Square<int> j(n);
    std::vector<int> h(n);
    for (int i = 0; i < n; ++i) {
      h[i] = static_cast<int>(rng.next_below(17)) - 8;
      for (int c = i + 1; c < n; ++c) {
        const int w = static_cast<int>(rng.next_below(9)) - 4;
        j(i, c) = w;
        j(c, i) = w;
      }
    }
    int max_load = 0;
    for (int i = 0; i < n; ++i) {
      int load = std::abs(h[i]);
      for (int c = 0; c < n; ++c) load += std::abs(j(i, c));
      max_load = std::max(max_load, load);
    }
    const int k_target = max_load + static_cast<int>(rng.next_below(6));
    const CapAllocation alloc = allocate(j, h, k_target);
    for (int i = 0; i < n; ++i)
      if (alloc.row_load(i) != alloc.k) {
        detail = "constant-K violated";
        return false;
      }
    const Network net = map_to_behavioral(alloc, params);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(std::lround(net.h[i])) != h[i]) {
        detail = "round trip lost h";
        return false;
      }
      for (int c = 0; c < n; ++c)
        if (static_cast<int>(std::lround(net.J(i, c))) != j(i, c)) {
          detail = "round trip lost J";
          return false;
        }
    }
  }

  // (c) linear-regime match within 2%
  double max_rel_err = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(4));
    Square<int> j(n);
    for (int i = 0; i < n; ++i)
      for (int c = i + 1; c < n; ++c) {
        const int w = static_cast<int>(rng.next_below(9)) - 4;
        j(i, c) = w;
        j(c, i) = w;
      }
    int max_load = 0;
    for (int i = 0; i < n; ++i) {
      int load = 0;
      for (int c = 0; c < n; ++c) load += std::abs(j(i, c));
      max_load = std::max(max_load, load);
    }
    const CapAllocation alloc = allocate(j, std::vector<int>(n, 0), std::max(1, max_load));
    const Network net = map_to_behavioral(alloc, params);
    std::vector<double> vout(n);
    for (int i = 0; i < n; ++i) vout[i] = rng.random_spin() * params.rail();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(vbar(i, vout, alloc, params)));
    const double scale = worst > 0 ? std::min(1.0, 0.2 * params.nu0 / worst) : 1.0;
    for (double& v : vout) v *= scale;
    for (int i = 0; i < n; ++i) {
      const double chain = inverter(vbar(i, vout, alloc, params), params) / params.v0;
      double acc = 0.0;
      for (int c = 0; c < n; ++c) acc += net.J(i, c) * (vout[c] / params.rail());
      const double behavioral = net.I0 * acc;
      if (std::abs(behavioral) > 1e-9)
        max_rel_err = std::max(max_rel_err, std::abs(chain - behavioral) / std::abs(behavioral));
    }
  }
  if (max_rel_err >= 0.02) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "linear-regime error %.4f >= 0.02", max_rel_err);
    detail = buf;
    return false;
  }

  // (d) reference operating point
  Square<int> j1(1);
  const double i0 = effective_I0(allocate(j1, {144}, 144), params);
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "100 round trips exact, lin-err %.4f < 0.02, I0(K=144) = %.6f (1.003 +- 1e-3)",
                max_rel_err, i0);
  detail = buf;
  return std::abs(i0 - 1.003) <= 1e-3;
}

bool c9_hardware_vs_behavioral(std::string& detail) {
  const DeviceParams params;
  const SynthesisResult synth = synthesize(full_adder_table());
  const CapAllocation alloc = allocate(synth.J_int, std::vector<int>(5, 0), 144);
  const double i0 = effective_I0(alloc, params);
  Network net = synth.network(i0);
  const std::vector<WordSpec> words = fa_words();

  double worst = 0.0;
  for (std::uint64_t seed : {7, 8, 9}) {
    RngStream rng_hw(seed);
    const Trajectory hw = hardware_run(alloc, params, 500000, 50000, {}, rng_hw);
    RngStream rng_bh(seed + 100);
    const Trajectory bh = run(net, 500000, 50000, rng_bh);
    worst = std::max(worst, tv_distance(histogram(hw, words), histogram(bh, words)));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst TV over 3 seeds = %.4f (tol 0.05, I0_eff %.4f)", worst, i0);
  detail = buf;
  return worst < 0.05;
}

bool c10_determinism(std::string& detail) {
  const fs::path base = fs::temp_directory_path() / "psl-acceptance-det";
  fs::remove_all(base);
  int pairs = 0;
  for (const ExperimentKind kind :
       {ExperimentKind::FaDirect, ExperimentKind::FaInvert, ExperimentKind::ThreeSum,
        ExperimentKind::Ssp, ExperimentKind::Synth, ExperimentKind::MapCheck,
        ExperimentKind::GibbsOracle}) {
    ExperimentConfig cfg = default_config(kind);
    cfg.seed = 99;
    if (cfg.sweeps > 0) cfg.sweeps = 20000;
    if (kind == ExperimentKind::MapCheck) cfg.trials = 20;
    const fs::path dir_a = base / (to_string(kind) + "-a");
    const fs::path dir_b = base / (to_string(kind) + "-b");
    cfg.out_dir = dir_a.string();
    const ExperimentResult ra = run_experiment(cfg);
    cfg.out_dir = dir_b.string();
    run_experiment(cfg);
    for (const std::string& name : ra.artifacts) {
      if (name == "resolved.cfg") continue;  // differs in out_dir by construction
      if (slurp(dir_a / name) != slurp(dir_b / name)) {
        detail = to_string(kind) + "/" + name + " differs between identical runs";
        fs::remove_all(base);
        return false;
      }
      ++pairs;
    }
  }
  fs::remove_all(base);
  detail = std::to_string(pairs) + " artifact pairs byte-identical across 7 experiment kinds";
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion(1, "sampler-law", c1_sampler_law);
  criterion(2, "gibbs-oracle", c2_gibbs_oracle);
  criterion(3, "synthesis", c3_synthesis);
  criterion(4, "fa-directed", c4_fa_directed);
  criterion(5, "fa-inverted", c5_fa_inverted);
  criterion(6, "three-sum", c6_three_sum);
  criterion(7, "subset-sum", c7_subset_sum);
  criterion(8, "hardware-mapping", c8_hardware_mapping);
  criterion(9, "hardware-vs-behavioral", c9_hardware_vs_behavioral);
  criterion(10, "determinism", c10_determinism);

  int failed = 0;
  for (const auto& c : g_results)
    if (!c.pass) ++failed;
  std::printf("%zu/%zu criteria passed\n", g_results.size() - failed, g_results.size());
  return failed == 0 ? 0 : 1;
}
