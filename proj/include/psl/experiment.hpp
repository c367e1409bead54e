#pragma once
// Config-driven experiment runner behind the CLI.
//
// Experiments are described by INI-style files (key = value, optional
// [clamps] section). Each run writes a histogram CSV, a stats JSON and a
// re-parseable echo of the resolved configuration into the output
// directory; everything is deterministic given the seed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psl/analysis.hpp"
#include "psl/circuits.hpp"
#include "psl/hardware.hpp"

namespace psl {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Network text format (owned by the CLI layer).

inline void write_network(std::ostream& out, const Network& net) {
  char buf[32];
  const auto g = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << "# psl network\n";
  out << "n = " << net.n << "\n";
  out << "I0 = " << g(net.I0) << "\n";
  out << "J =";
  for (int i = 0; i < net.n; ++i)
    for (int j = 0; j < net.n; ++j) out << " " << g(net.J(i, j));
  out << "\n";
  out << "h =";
  for (int i = 0; i < net.n; ++i) out << " " << g(net.h[i]);
  out << "\n";
  if (!net.clamps.empty()) {
    out << "clamps =";
    for (const auto& [node, value] : net.clamps) out << " " << node << ":" << (value > 0 ? 1 : 0);
    out << "\n";
  }
}

inline Network read_network(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    kv[key] = value;
  }
  if (!kv.count("n")) throw std::invalid_argument("network file: missing field 'n'");
  Network net(std::stoi(kv.at("n")));
  if (kv.count("I0")) net.I0 = std::stod(kv.at("I0"));
  const auto parse_doubles = [](const std::string& s) {
    std::istringstream ss(s);
    std::vector<double> out;
    for (double x; ss >> x;) out.push_back(x);
    return out;
  };
  if (kv.count("J")) {
    const auto vals = parse_doubles(kv.at("J"));
    if (static_cast<int>(vals.size()) != net.n * net.n)
      throw std::invalid_argument("network file: field 'J' needs n*n entries");
    net.J.a = vals;
  }
  if (kv.count("h")) {
    const auto vals = parse_doubles(kv.at("h"));
    if (static_cast<int>(vals.size()) != net.n)
      throw std::invalid_argument("network file: field 'h' needs n entries");
    net.h = vals;
  }
  if (kv.count("clamps")) {
    std::istringstream ss(kv.at("clamps"));
    for (std::string tok; ss >> tok;) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("network file: bad clamp entry '" + tok + "'");
      net.clamps[std::stoi(tok.substr(0, colon))] = spin_from_bit(std::stoi(tok.substr(colon + 1)));
    }
  }
  net.validate();
  return net;
}

// ---------------------------------------------------------------------------
// Experiment configuration.

enum class ExperimentKind { FaDirect, FaInvert, ThreeSum, Ssp, Synth, MapCheck, GibbsOracle };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::FaDirect: return "fa-direct";
    case ExperimentKind::FaInvert: return "fa-invert";
    case ExperimentKind::ThreeSum: return "threesum";
    case ExperimentKind::Ssp: return "ssp";
    case ExperimentKind::Synth: return "synth";
    case ExperimentKind::MapCheck: return "mapcheck";
    default: return "gibbs-oracle";
  }
}

inline ExperimentKind kind_from_string(const std::string& s) {
  if (s == "fa-direct") return ExperimentKind::FaDirect;
  if (s == "fa-invert") return ExperimentKind::FaInvert;
  if (s == "threesum") return ExperimentKind::ThreeSum;
  if (s == "ssp") return ExperimentKind::Ssp;
  if (s == "synth") return ExperimentKind::Synth;
  if (s == "mapcheck") return ExperimentKind::MapCheck;
  if (s == "gibbs-oracle") return ExperimentKind::GibbsOracle;
  throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::FaInvert;
  std::uint64_t seed = 1;
  long sweeps = 0;
  long burn_in = -1;  // -1 resolves to sweeps / 10
  std::optional<double> i0;
  std::optional<int> cap_padding;  // per-node load target K ("M"); exclusive with I0
  bool hardware = false;
  std::string out_dir;

  std::map<std::string, int> clamps;  // fa kinds: port -> bit
  int bits = 0;                       // threesum / ssp word width
  int sum_clamp = 0;                  // threesum target sum S
  std::vector<int> elements;          // ssp set G
  int target = 0;                     // ssp target
  std::string wiring = "reverse";     // ssp: reverse | forward
  int wire_weight = 1;
  int feedback = 0;
  int trials = 100;                   // mapcheck
  std::optional<std::string> table_path;  // synth input table

  long resolved_burn_in() const { return burn_in >= 0 ? burn_in : sweeps / 10; }
};

inline ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.out_dir = "out/" + to_string(kind);
  switch (kind) {
    case ExperimentKind::FaDirect:
      c.sweeps = 1000000;
      c.i0 = 1.0;
      c.clamps = {{"Ci", 0}, {"B", 1}, {"A", 1}};
      break;
    case ExperimentKind::FaInvert:
      c.sweeps = 1000000;
      c.i0 = 1.0;
      c.clamps = {{"S", 0}, {"Co", 1}};
      break;
    case ExperimentKind::ThreeSum:
      c.sweeps = 100000;
      c.i0 = 2.0;
      c.bits = 4;
      c.sum_clamp = 15;
      c.wire_weight = 2;
      break;
    case ExperimentKind::Ssp:
      c.sweeps = 100000;
      c.i0 = 1.0;
      c.bits = 3;
      c.elements = {1, 2, 4};
      c.target = 3;
      c.wire_weight = 1;
      break;
    case ExperimentKind::Synth:
      c.sweeps = 0;
      break;
    case ExperimentKind::MapCheck:
      c.sweeps = 0;
      c.cap_padding = 144;
      break;
    case ExperimentKind::GibbsOracle:
      c.sweeps = 1000000;
      c.i0 = 1.0;
      break;
  }
  return c;
}

namespace detail {

struct RawConfig {
  std::map<std::string, std::string> top;
  std::map<std::string, std::map<std::string, std::string>> sections;
};

inline RawConfig parse_ini(std::istream& in) {
  RawConfig raw;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      raw.sections[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    auto& dst = section.empty() ? raw.top : raw.sections[section];
    if (dst.count(key))
      throw std::invalid_argument("config: duplicate key '" + key + "'");
    dst[key] = value;
  }
  return raw;
}

inline long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: field '" + key + "' is not an integer: '" + value + "'");
  }
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: field '" + key + "' is not a number: '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: field '" + key + "' is not a boolean: '" + value + "'");
}

}  // namespace detail

// Applies a parsed config on top of the per-kind defaults. Unknown keys and
// sections are rejected with the offending name.
inline ExperimentConfig interpret_config(const detail::RawConfig& raw,
                                         std::optional<ExperimentKind> requested = std::nullopt) {
  ExperimentKind kind;
  if (raw.top.count("kind")) {
    kind = kind_from_string(raw.top.at("kind"));
    if (requested && kind != *requested)
      throw std::invalid_argument("config: kind '" + to_string(kind) +
                                  "' does not match the requested command '" +
                                  to_string(*requested) + "'");
  } else if (requested) {
    kind = *requested;
  } else {
    throw std::invalid_argument("config: missing field 'kind'");
  }

  ExperimentConfig cfg = default_config(kind);

  static const std::set<std::string> common{"kind",     "seed",    "sweeps", "burn_in",
                                            "I0",       "M",       "hardware", "out_dir"};
  std::set<std::string> allowed = common;
  const bool fa_kind = kind == ExperimentKind::FaDirect || kind == ExperimentKind::FaInvert;
  switch (kind) {
    case ExperimentKind::ThreeSum:
      allowed.insert({"bits", "S", "wire_weight"});
      break;
    case ExperimentKind::Ssp:
      allowed.insert({"bits", "G", "target", "wiring", "wire_weight", "feedback"});
      break;
    case ExperimentKind::Synth:
      allowed.insert({"table"});
      break;
    case ExperimentKind::MapCheck:
      allowed.insert({"trials"});
      break;
    default:
      break;
  }

  for (const auto& [key, value] : raw.top) {
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "' for kind '" +
                                  to_string(kind) + "'");
    if (key == "kind") continue;
    if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_long(key, value));
    else if (key == "sweeps") cfg.sweeps = detail::parse_long(key, value);
    else if (key == "burn_in") cfg.burn_in = detail::parse_long(key, value);
    else if (key == "I0") cfg.i0 = detail::parse_double(key, value);
    else if (key == "M") cfg.cap_padding = static_cast<int>(detail::parse_long(key, value));
    else if (key == "hardware") cfg.hardware = detail::parse_bool(key, value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "bits") cfg.bits = static_cast<int>(detail::parse_long(key, value));
    else if (key == "S") cfg.sum_clamp = static_cast<int>(detail::parse_long(key, value));
    else if (key == "target") cfg.target = static_cast<int>(detail::parse_long(key, value));
    else if (key == "wiring") {
      if (value != "reverse" && value != "forward")
        throw std::invalid_argument("config: field 'wiring' must be reverse or forward");
      cfg.wiring = value;
    } else if (key == "wire_weight") cfg.wire_weight = static_cast<int>(detail::parse_long(key, value));
    else if (key == "feedback") cfg.feedback = static_cast<int>(detail::parse_long(key, value));
    else if (key == "trials") cfg.trials = static_cast<int>(detail::parse_long(key, value));
    else if (key == "table") cfg.table_path = value;
    else if (key == "G") {
      std::istringstream ss(value);
      std::vector<int> g;
      for (std::string tok; ss >> tok;) g.push_back(static_cast<int>(detail::parse_long(key, tok)));
      if (g.empty()) throw std::invalid_argument("config: field 'G' is empty");
      cfg.elements = g;
    }
  }

  for (const auto& [section, entries] : raw.sections) {
    if (section == "clamps" && fa_kind) {
      cfg.clamps.clear();
      for (const auto& [port, value] : entries) {
        static const std::set<std::string> ports{"Ci", "B", "A", "S", "Co"};
        if (!ports.count(port))
          throw std::invalid_argument("config: unknown clamp port '" + port + "'");
        const long bit = detail::parse_long("clamps." + port, value);
        if (bit != 0 && bit != 1)
          throw std::invalid_argument("config: clamp '" + port + "' must be 0 or 1");
        cfg.clamps[port] = static_cast<int>(bit);
      }
    } else {
      throw std::invalid_argument("config: unknown section '[" + section + "]' for kind '" +
                                  to_string(kind) + "'");
    }
  }

  if (cfg.i0 && cfg.cap_padding && raw.top.count("I0") && raw.top.count("M"))
    throw std::invalid_argument("config: fields 'I0' and 'M' are mutually exclusive");
  if (raw.top.count("M")) cfg.i0.reset();       // M decides the gain
  else if (raw.top.count("I0")) cfg.cap_padding.reset();
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path,
                                          std::optional<ExperimentKind> requested = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  return interpret_config(detail::parse_ini(in), requested);
}

// ---------------------------------------------------------------------------
// Experiment runner.

struct ExperimentResult {
  int exit_code = 0;
  Json stats;
  std::vector<std::string> artifacts;  // files written, relative to out_dir
  std::string summary;                 // one-line human summary
};

namespace detail {

inline std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// K and effective I0 for a flattened integer network under the standard
// device parameters. If no padding is requested, the gain target decides it.
struct OperatingPoint {
  int k = 0;
  double i0 = 1.0;
  bool from_hardware = false;
};

inline OperatingPoint resolve_operating_point(const Square<int>& j, const std::vector<int>& h,
                                              const ExperimentConfig& cfg, const DeviceParams& p) {
  OperatingPoint op;
  int max_load = 0;
  for (int i = 0; i < j.n; ++i) {
    int load = std::abs(h[i]);
    for (int c = 0; c < j.n; ++c) load += std::abs(j(i, c));
    max_load = std::max(max_load, load);
  }
  if (cfg.cap_padding) {
    op.k = std::max(max_load, *cfg.cap_padding);
    op.from_hardware = true;
    op.i0 = p.amplification() / (p.cg / p.c0 + op.k);
  } else {
    op.i0 = cfg.i0.value_or(1.0);
    // nearest padding that realizes the requested gain, for reporting
    op.k = std::max(max_load, static_cast<int>(std::lround(p.amplification() / op.i0 - p.cg / p.c0)));
    if (cfg.hardware) op.i0 = p.amplification() / (p.cg / p.c0 + op.k);
  }
  return op;
}

inline void to_int_network(const Network& net, Square<int>& j, std::vector<int>& h) {
  j = Square<int>(net.n);
  h.assign(net.n, 0);
  for (int i = 0; i < net.n; ++i) {
    h[i] = static_cast<int>(std::lround(net.h[i]));
    for (int c = 0; c < net.n; ++c) j(i, c) = static_cast<int>(std::lround(net.J(i, c)));
  }
}

inline void write_resolved_config(std::ostream& out, const ExperimentConfig& cfg,
                                  const OperatingPoint* op) {
  out << "# resolved configuration\n";
  out << "kind = " << to_string(cfg.kind) << "\n";
  out << "seed = " << cfg.seed << "\n";
  if (cfg.sweeps > 0) {
    out << "sweeps = " << cfg.sweeps << "\n";
    out << "burn_in = " << cfg.resolved_burn_in() << "\n";
  }
  if (cfg.cap_padding) out << "M = " << *cfg.cap_padding << "\n";
  else if (cfg.i0) out << "I0 = " << format17(*cfg.i0) << "\n";
  out << "hardware = " << (cfg.hardware ? "true" : "false") << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  switch (cfg.kind) {
    case ExperimentKind::ThreeSum:
      out << "bits = " << cfg.bits << "\n";
      out << "S = " << cfg.sum_clamp << "\n";
      out << "wire_weight = " << cfg.wire_weight << "\n";
      break;
    case ExperimentKind::Ssp: {
      out << "bits = " << cfg.bits << "\n";
      out << "G =";
      for (int g : cfg.elements) out << " " << g;
      out << "\n";
      out << "target = " << cfg.target << "\n";
      out << "wiring = " << cfg.wiring << "\n";
      out << "wire_weight = " << cfg.wire_weight << "\n";
      out << "feedback = " << cfg.feedback << "\n";
      break;
    }
    case ExperimentKind::MapCheck:
      out << "trials = " << cfg.trials << "\n";
      break;
    case ExperimentKind::Synth:
      if (cfg.table_path) out << "table = " << *cfg.table_path << "\n";
      break;
    default:
      break;
  }
  if (!cfg.clamps.empty()) {
    out << "\n[clamps]\n";
    for (const auto& [port, bit] : cfg.clamps) out << port << " = " << bit << "\n";
  }
  if (op) {
    out << "\n# derived: K = " << op->k << "\n";
    out << "# derived: effective_I0 = " << format17(op->i0) << "\n";
  }
}

struct RunArtifacts {
  Histogram hist;
  std::vector<WordSpec> words;
  Trajectory traj;
  OperatingPoint op;
};

// Shared behavioral/hardware run of a flattened composite.
inline RunArtifacts run_flattened(const Flattened& fl_hard, const Flattened& fl_soft,
                                  const std::vector<WordSpec>& words, const ExperimentConfig& cfg,
                                  const DeviceParams& params) {
  RunArtifacts out;
  out.words = words;
  Square<int> j;
  std::vector<int> h;
  to_int_network(fl_soft.net, j, h);
  out.op = resolve_operating_point(j, h, cfg, params);

  RngStream rng(cfg.seed);
  if (cfg.hardware) {
    const CapAllocation alloc = allocate(j, h, out.op.k);
    out.traj = hardware_run(alloc, params, cfg.sweeps, cfg.resolved_burn_in(), {}, rng);
  } else {
    Network net = fl_hard.net;
    net.I0 = out.op.i0;
    out.traj = run(net, cfg.sweeps, cfg.resolved_burn_in(), rng);
  }
  out.hist = histogram(out.traj, words);
  return out;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  ExperimentResult result;
  const DeviceParams params;
  fs::create_directories(cfg.out_dir);

  const auto write_file = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name + " in " + cfg.out_dir);
    out << content;
    result.artifacts.push_back(name);
  };

  Json stats;
  stats["kind"] = to_string(cfg.kind);
  stats["seed"] = cfg.seed;

  std::optional<detail::OperatingPoint> op;
  std::optional<Flattened> soft_for_netlist;

  switch (cfg.kind) {
    case ExperimentKind::FaDirect:
    case ExperimentKind::FaInvert: {
      Composite comp;
      comp.add(full_adder("fa"));
      for (const auto& [port, bit] : cfg.clamps) comp.clamp({"fa", port}, bit);
      const Flattened hard = flatten(comp, ClampMode::Hard);
      const Flattened soft = flatten(comp, ClampMode::Soft);
      soft_for_netlist = soft;

      std::vector<WordSpec> words;
      for (const char* port : {"Ci", "B", "A", "S", "Co"})
        words.push_back(WordSpec::from_msb_nodes(port, {hard.at({"fa", port})}));

      const detail::RunArtifacts ra = detail::run_flattened(hard, soft, words, cfg, params);
      op = ra.op;

      std::ostringstream csv;
      write_histogram_csv(csv, ra.hist, words);
      write_file("histogram.csv", csv.str());

      stats["sweeps"] = cfg.sweeps;
      stats["burn_in"] = cfg.resolved_burn_in();
      stats["hardware"] = cfg.hardware;
      stats["K"] = ra.op.k;
      stats["effective_I0"] = ra.op.i0;
      stats["clamps"] = cfg.clamps;
      Json names = Json::array(), argmax = Json::array();
      for (const auto& w : words) names.push_back(w.name);
      for (std::uint64_t v : ra.hist.argmax()) argmax.push_back(v);
      stats["words"] = names;
      stats["argmax"] = argmax;
      if (!cfg.hardware) {
        Network net = hard.net;
        net.I0 = ra.op.i0;
        stats["tv_vs_exact"] = tv_distance(ra.hist, exact_word_distribution(net, words));
      }
      result.summary = to_string(cfg.kind) + ": argmax " + stats["argmax"].dump() +
                       (stats.count("tv_vs_exact")
                            ? " tv=" + std::to_string(double(stats["tv_vs_exact"]))
                            : "");
      break;
    }

    case ExperimentKind::ThreeSum:
    case ExperimentKind::Ssp: {
      const bool is_ssp = cfg.kind == ExperimentKind::Ssp;
      AdderCircuit ac;
      std::uint64_t wanted_sum = 0;
      if (is_ssp) {
        const WireDir dir = cfg.wiring == "reverse" ? WireDir::Reverse : WireDir::Forward;
        ac = subset_sum(cfg.elements, cfg.bits, cfg.target, cfg.wire_weight, dir, cfg.feedback);
        wanted_sum = static_cast<std::uint64_t>(cfg.target);
      } else {
        ac = three_sum(cfg.bits, cfg.wire_weight, WireDir::Forward, 0);
        if (cfg.sum_clamp < 0 || cfg.sum_clamp >= (1 << (cfg.bits + 2)))
          throw std::invalid_argument("config: field 'S' is not representable in the sum word");
        for (int k = 0; k < cfg.bits + 2; ++k)
          ac.comp.clamp(ac.s_bits[k], (cfg.sum_clamp >> k) & 1);
        wanted_sum = static_cast<std::uint64_t>(cfg.sum_clamp);
      }
      const Flattened hard = flatten(ac.comp, ClampMode::Hard);
      const Flattened soft = flatten(ac.comp, ClampMode::Soft);
      soft_for_netlist = soft;

      const auto nodes_of = [&](const std::vector<PortRef>& refs) {
        std::vector<int> nodes;
        for (const auto& r : refs) nodes.push_back(hard.at(r));
        return nodes;
      };
      std::vector<WordSpec> words{WordSpec::from_lsb_nodes("A", nodes_of(ac.a_bits)),
                                  WordSpec::from_lsb_nodes("B", nodes_of(ac.b_bits)),
                                  WordSpec::from_lsb_nodes("C", nodes_of(ac.c_bits))};

      const detail::RunArtifacts ra = detail::run_flattened(hard, soft, words, cfg, params);
      op = ra.op;

      std::ostringstream csv;
      write_histogram_csv(csv, ra.hist, words);
      write_file("histogram.csv", csv.str());

      std::ostringstream circuit;
      write_composite(circuit, ac.comp);
      write_file("circuit.txt", circuit.str());

      const auto satisfies = [&](const WordKey& k) { return k[0] + k[1] + k[2] == wanted_sum; };
      const SolverStats st = solver_stats(ra.traj, words, satisfies);

      int big_bins = 0, big_bins_satisfying = 0;
      for (const auto& [key, count] : ra.hist.counts)
        if (static_cast<double>(count) / ra.hist.total > 0.01) {
          ++big_bins;
          if (satisfies(key)) ++big_bins_satisfying;
        }

      stats["sweeps"] = cfg.sweeps;
      stats["burn_in"] = cfg.resolved_burn_in();
      stats["hardware"] = cfg.hardware;
      stats["K"] = ra.op.k;
      stats["effective_I0"] = ra.op.i0;
      stats["bits"] = cfg.bits;
      if (is_ssp) {
        Json g = Json::array();
        std::vector<int> sorted = cfg.elements;
        std::sort(sorted.rbegin(), sorted.rend());
        for (int x : sorted) g.push_back(x);
        stats["G"] = g;
        stats["target"] = cfg.target;
        stats["wiring"] = cfg.wiring;
        // unique subset, if any, as the expected (A, B, C) reading
        int match_count = 0;
        WordKey expected(3, 0);
        for (int mask = 0; mask < 8; ++mask) {
          std::uint64_t sum = 0;
          WordKey key(3, 0);
          for (int w = 0; w < 3; ++w)
            if (mask & (1 << w)) {
              key[w] = static_cast<std::uint64_t>(sorted[w]);
              sum += key[w];
            }
          if (sum == static_cast<std::uint64_t>(cfg.target)) {
            ++match_count;
            expected = key;
          }
        }
        if (match_count == 1) {
          Json e = Json::array();
          for (std::uint64_t v : expected) e.push_back(v);
          stats["expected_subset"] = e;
          stats["argmax_correct"] = ra.hist.argmax() == expected;
        }
      } else {
        stats["S"] = cfg.sum_clamp;
        Json triples = Json::array();
        for (const auto& [key, count] : ra.hist.counts)
          if (satisfies(key)) triples.push_back(Json::array({key[0], key[1], key[2]}));
        stats["satisfying_triples_observed"] = triples;
      }
      Json argmax = Json::array();
      for (std::uint64_t v : ra.hist.argmax()) argmax.push_back(v);
      stats["words"] = Json::array({"A", "B", "C"});
      stats["argmax"] = argmax;
      stats["argmax_satisfies"] = st.argmax_satisfies;
      stats["satisfying_mass"] = st.satisfying_mass;
      if (st.first_solution) stats["first_solution_sweep"] = *st.first_solution;
      else stats["first_solution_sweep"] = nullptr;
      stats["bins_above_1pct"] = big_bins;
      stats["bins_above_1pct_satisfying"] = big_bins_satisfying;

      char mass[32];
      std::snprintf(mass, sizeof mass, "%.3f", st.satisfying_mass);
      result.summary = to_string(cfg.kind) + ": argmax " + argmax.dump() + " satisfying_mass=" + mass;
      break;
    }

    case ExperimentKind::GibbsOracle: {
      const SynthesisResult synth = synthesize(full_adder_table());
      Network net = synth.network(cfg.i0.value_or(1.0));
      std::vector<WordSpec> words;
      const std::vector<std::string> names{"Ci", "B", "A", "S", "Co"};
      for (int i = 0; i < 5; ++i) words.push_back(WordSpec::from_msb_nodes(names[i], {i}));

      RngStream rng(cfg.seed);
      const Trajectory traj = run(net, cfg.sweeps, cfg.resolved_burn_in(), rng);
      const Histogram hist = histogram(traj, words);
      const double tv = tv_distance(hist, exact_word_distribution(net, words));

      std::ostringstream csv;
      write_histogram_csv(csv, hist, words);
      write_file("histogram.csv", csv.str());

      stats["sweeps"] = cfg.sweeps;
      stats["burn_in"] = cfg.resolved_burn_in();
      stats["I0"] = net.I0;
      stats["tv_vs_exact"] = tv;
      stats["ok"] = tv < 0.02;
      if (!(tv < 0.02)) result.exit_code = 1;
      char buf[64];
      std::snprintf(buf, sizeof buf, "gibbs-oracle: tv=%.5f (threshold 0.02)", tv);
      result.summary = buf;
      break;
    }

    case ExperimentKind::Synth: {
      TruthTable table;
      if (cfg.table_path) {
        std::ifstream in(*cfg.table_path);
        if (!in) throw std::invalid_argument("config: cannot open table '" + *cfg.table_path + "'");
        table = read_truth_table(in);
      } else {
        table = full_adder_table();
      }
      const SynthesisResult synth = synthesize(table);
      const GroundStateReport rep = verify_ground_states(
          synth.J_int, std::vector<double>(table.width(), 0.0), table);

      std::ostringstream net_text;
      write_network(net_text, synth.network(cfg.i0.value_or(1.0)));
      write_file("network.psl", net_text.str());

      stats["n"] = table.width();
      stats["rows"] = table.rows.size();
      stats["scale"] = synth.scale;
      stats["used_full_table"] = synth.used_full_table;
      stats["ground_states"] = rep.ground_states.size();
      stats["verified"] = rep.ok;
      if (!rep.ok) result.exit_code = 1;
      result.summary = "synth: n=" + std::to_string(table.width()) +
                       " scale=" + std::to_string(synth.scale) +
                       (rep.ok ? " verified" : " FAILED verification");
      break;
    }

    case ExperimentKind::MapCheck: {
      RngStream rng(cfg.seed);
      int round_trip_ok = 0;
      bool constant_k_ok = true;
      double max_rel_err = 0.0;
      for (int trial = 0; trial < cfg.trials; ++trial) {
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
          if (alloc.row_load(i) != alloc.k) constant_k_ok = false;
        const Network net = map_to_behavioral(alloc, params);
        bool same = true;
        for (int i = 0; i < n && same; ++i) {
          if (static_cast<int>(std::lround(net.h[i])) != h[i]) same = false;
          for (int c = 0; c < n && same; ++c)
            if (static_cast<int>(std::lround(net.J(i, c))) != j(i, c)) same = false;
        }
        if (same) ++round_trip_ok;

        // linear-regime check on a bias-free copy: inverter chain vs I0 * (J x)
        const CapAllocation free_alloc = allocate(j, std::vector<int>(n, 0), k_target);
        const Network free_net = map_to_behavioral(free_alloc, params);
        std::vector<double> vout(n);
        for (int i = 0; i < n; ++i) vout[i] = rng.random_spin() * params.rail();
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
          worst = std::max(worst, std::abs(vbar(i, vout, free_alloc, params)));
        const double scale = worst > 0 ? std::min(1.0, 0.2 * params.nu0 / worst) : 1.0;
        for (double& v : vout) v *= scale;
        for (int i = 0; i < n; ++i) {
          const double chain = inverter(vbar(i, vout, free_alloc, params), params) / params.v0;
          double acc = 0.0;
          for (int c = 0; c < n; ++c) acc += free_net.J(i, c) * (vout[c] / params.rail());
          const double behavioral = free_net.I0 * acc;
          if (std::abs(behavioral) > 1e-9)
            max_rel_err = std::max(max_rel_err, std::abs(chain - behavioral) / std::abs(behavioral));
        }
      }
      Square<int> j1(1);
      const double i0_ref = effective_I0(allocate(j1, {144}, 144), params);

      stats["trials"] = cfg.trials;
      stats["round_trip_ok"] = round_trip_ok;
      stats["constant_K_ok"] = constant_k_ok;
      stats["linear_regime_max_rel_err"] = max_rel_err;
      stats["effective_I0_at_K144"] = i0_ref;
      const bool ok = round_trip_ok == cfg.trials && constant_k_ok && max_rel_err < 0.02;
      stats["ok"] = ok;
      if (!ok) result.exit_code = 1;
      result.summary = "mapcheck: round_trip " + std::to_string(round_trip_ok) + "/" +
                       std::to_string(cfg.trials) + (ok ? " ok" : " FAILED");
      break;
    }
  }

  if (cfg.hardware && soft_for_netlist) {
    // netlist echo of the allocation actually simulated
    Square<int> j;
    std::vector<int> h;
    detail::to_int_network(soft_for_netlist->net, j, h);
    const detail::OperatingPoint point = detail::resolve_operating_point(j, h, cfg, params);
    write_file("netlist.txt", export_netlist(allocate(j, h, point.k), params));
  }

  std::ostringstream cfg_echo;
  detail::write_resolved_config(cfg_echo, cfg, op ? &*op : nullptr);
  write_file("resolved.cfg", cfg_echo.str());

  result.stats = stats;
  write_file("stats.json", stats.dump(2) + "\n");
  if (result.summary.empty()) result.summary = to_string(cfg.kind) + ": done";
  return result;
}

// ---------------------------------------------------------------------------
// Selfcheck: the oracle suite behind `psl selfcheck`.

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

inline std::vector<CheckResult> selfcheck() {
  std::vector<CheckResult> checks;
  char buf[160];

  {  // single p-bit law against the closed form
    RngStream rng(11);
    const int n = 100000;
    int plus = 0;
    for (int i = 0; i < n; ++i)
      if (sample_pbit(1.0, rng) == 1) ++plus;
    const double emp = static_cast<double>(plus) / n;
    const double expected = (1.0 + std::tanh(1.0)) / 2.0;
    std::snprintf(buf, sizeof buf, "P(+1)=%.4f expected %.4f over 1e5 draws", emp, expected);
    checks.push_back({"sampler-law", std::abs(emp - expected) < 0.005, buf});
  }

  {  // full-adder synthesis ground states
    const SynthesisResult synth = synthesize(full_adder_table());
    const GroundStateReport rep =
        verify_ground_states(synth.J_int, std::vector<double>(5, 0.0), full_adder_table());
    std::snprintf(buf, sizeof buf, "scale=%d ground_states=%zu of 32", synth.scale,
                  rep.ground_states.size());
    checks.push_back({"fa-ground-states", rep.ok, buf});
  }

  {  // sampled distribution vs exact enumeration
    const SynthesisResult synth = synthesize(full_adder_table());
    const Network net = synth.network(1.0);
    std::vector<WordSpec> words{WordSpec::from_msb_nodes("word", {0, 1, 2, 3, 4})};
    RngStream rng(12);
    const Trajectory traj = run(net, 200000, 20000, rng);
    const double tv = tv_distance(histogram(traj, words), exact_word_distribution(net, words));
    std::snprintf(buf, sizeof buf, "tv=%.4f threshold 0.03 (2e5 sweeps)", tv);
    checks.push_back({"boltzmann-tv", tv < 0.03, buf});
  }

  {  // hardware mapping round trip
    const DeviceParams params;
    RngStream rng(13);
    bool all = true;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_below(4));
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
      const CapAllocation alloc = allocate(j, h, max_load + 2);
      const Network net = map_to_behavioral(alloc, params);
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(std::lround(net.h[i])) != h[i]) all = false;
        for (int c = 0; c < n; ++c)
          if (static_cast<int>(std::lround(net.J(i, c))) != j(i, c)) all = false;
      }
      for (int i = 0; i < n; ++i)
        if (alloc.row_load(i) != alloc.k) all = false;
    }
    checks.push_back({"map-round-trip", all, "20 random integer networks, exact"});
  }

  {  // netlist export stability
    const DeviceParams params;
    Square<int> j(2);
    j(0, 1) = j(1, 0) = 2;
    const CapAllocation alloc = allocate(j, {1, -1}, 4);
    const std::string a = export_netlist(alloc, params);
    const std::string b = export_netlist(alloc, params);
    checks.push_back({"netlist-stable", a == b && !a.empty(), "re-export byte-identical"});
  }

  {  // seeded determinism
    const SynthesisResult synth = synthesize(full_adder_table());
    const Network net = synth.network(1.0);
    RngStream a(14), b(14);
    const Trajectory ta = run(net, 2000, 200, a);
    const Trajectory tb = run(net, 2000, 200, b);
    checks.push_back({"run-determinism", ta.states == tb.states, "same seed, bit-identical states"});
  }

  return checks;
}

inline std::string selfcheck_report(const std::vector<CheckResult>& checks) {
  std::ostringstream out;
  int passed = 0;
  for (const auto& c : checks) {
    out << (c.ok ? "[ok]   " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    if (c.ok) ++passed;
  }
  out << passed << "/" << checks.size() << " checks passed\n";
  return out.str();
}

}  // namespace psl
