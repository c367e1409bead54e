#pragma once
// Truth-table synthesis: embed the rows of a boolean truth table as the
// exact ground states of a symmetric integer coupling matrix.
//
// Pipeline: encode rows as bipolar vectors, keep one representative per
// complement pair (complement-closed tables need no bias), orthonormalize
// with Gram-Schmidt, form the projection sum of outer products, zero the
// diagonal, and round scale*J to integers. The scale is searched upward and
// every candidate is checked by exhaustive enumeration; the verifier, not
// the construction, is the arbiter of correctness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "psl/core.hpp"

namespace psl {

struct TruthTable {
  std::vector<std::string> var_names;
  std::vector<std::vector<int>> rows;  // entries 0/1, row length == var_names.size()

  int width() const { return static_cast<int>(var_names.size()); }

  void validate() const {
    if (var_names.empty()) throw std::invalid_argument("TruthTable: no variables");
    if (rows.empty()) throw std::invalid_argument("TruthTable: no rows");
    std::set<std::vector<int>> seen;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != width())
        throw std::invalid_argument("TruthTable: row length does not match variable count");
      for (int b : row)
        if (b != 0 && b != 1) throw std::invalid_argument("TruthTable: entries must be 0/1");
      if (!seen.insert(row).second) throw std::invalid_argument("TruthTable: duplicate row");
    }
  }

  // Row id with variable 0 as the most significant bit (reads like the word).
  std::uint32_t row_id(std::size_t r) const {
    std::uint32_t id = 0;
    for (int i = 0; i < width(); ++i) id |= static_cast<std::uint32_t>(rows[r][i]) << (width() - 1 - i);
    return id;
  }
};

// Text format: a header line of variable names, then one binary word per line.
inline TruthTable read_truth_table(std::istream& in) {
  TruthTable t;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (t.var_names.empty()) {
      t.var_names = tokens;
      continue;
    }
    if (tokens.size() != 1)
      throw std::invalid_argument("truth table: expected one binary word per line");
    std::vector<int> row;
    for (char c : tokens[0]) {
      if (c != '0' && c != '1') throw std::invalid_argument("truth table: rows must be binary words");
      row.push_back(c - '0');
    }
    t.rows.push_back(std::move(row));
  }
  t.validate();
  return t;
}

inline void write_truth_table(std::ostream& out, const TruthTable& t) {
  for (std::size_t i = 0; i < t.var_names.size(); ++i)
    out << (i ? " " : "") << t.var_names[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (int b : row) out << b;
    out << "\n";
  }
}

// 0 -> -1, 1 -> +1, row-wise.
inline std::vector<std::vector<double>> encode_bipolar(const TruthTable& t) {
  t.validate();
  std::vector<std::vector<double>> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    std::vector<double> v(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) v[i] = row[i] ? 1.0 : -1.0;
    out.push_back(std::move(v));
  }
  return out;
}

struct HalfTable {
  TruthTable table;
  bool complement_closed = true;  // false means the fallback (all rows) was used
};

// One representative per complement pair, keeping first occurrences. Tables
// that are not closed under global complement fall back to all rows.
inline HalfTable half_table(const TruthTable& t) {
  t.validate();
  const std::uint32_t mask = (t.width() >= 32) ? 0xffffffffu : ((1u << t.width()) - 1u);
  std::set<std::uint32_t> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) ids.insert(t.row_id(r));
  bool closed = true;
  for (std::uint32_t id : ids)
    if (!ids.count(~id & mask)) {
      closed = false;
      break;
    }
  if (!closed) return {t, false};

  HalfTable out;
  out.table.var_names = t.var_names;
  std::set<std::uint32_t> taken;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::uint32_t id = t.row_id(r);
    if (taken.count(~id & mask)) continue;
    taken.insert(id);
    out.table.rows.push_back(t.rows[r]);
  }
  return out;
}

struct GramSchmidtResult {
  std::vector<std::vector<double>> basis;  // orthonormal, spans the input rows
  int dropped = 0;                         // linearly dependent rows removed
};

inline GramSchmidtResult gram_schmidt(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("gram_schmidt: no input rows");
  const std::size_t dim = rows[0].size();
  const auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  GramSchmidtResult out;
  for (const auto& r : rows) {
    if (r.size() != dim) throw std::invalid_argument("gram_schmidt: inconsistent row lengths");
    const double input_norm = std::sqrt(dot(r, r));
    if (input_norm < 1e-12) throw std::invalid_argument("gram_schmidt: zero input vector");

    std::vector<double> v = r;
    for (int pass = 0; pass < 2; ++pass)  // re-orthogonalize once for tight tolerances
      for (const auto& u : out.basis) {
        const double d = dot(u, v);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= d * u[i];
      }
    const double norm = std::sqrt(dot(v, v));
    if (norm <= 1e-9 * input_norm) {
      ++out.dropped;
      continue;
    }
    for (double& x : v) x /= norm;
    out.basis.push_back(std::move(v));
  }
  return out;
}

// Sum of outer products of the basis vectors with the diagonal zeroed.
inline Square<double> projection_couplings(const std::vector<std::vector<double>>& basis) {
  if (basis.empty()) throw std::invalid_argument("projection_couplings: empty basis");
  const int n = static_cast<int>(basis[0].size());
  Square<double> j(n);
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      double s = 0.0;
      for (const auto& u : basis) s += u[i] * u[k];
      j(i, k) = s;
      j(k, i) = s;
    }
  return j;
}

struct SynthesisResult {
  Square<double> J_real;   // projection couplings, symmetric, zero diagonal
  Square<int> J_int;       // round(scale * J_real)
  int scale = 0;
  bool used_full_table = false;  // half-table fallback was taken

  Network network(double i0 = 1.0) const {
    Network net(J_int.n);
    for (int i = 0; i < J_int.n; ++i)
      for (int j = 0; j < J_int.n; ++j) net.J(i, j) = J_int(i, j);
    net.I0 = i0;
    return net;
  }
};

// Fixed-scale rounding (round half away from zero).
inline SynthesisResult build_J(const std::vector<std::vector<double>>& basis, int scale) {
  if (scale < 1) throw std::invalid_argument("build_J: scale must be positive");
  SynthesisResult out;
  out.J_real = projection_couplings(basis);
  out.scale = scale;
  const int n = out.J_real.n;
  out.J_int = Square<int>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int w = static_cast<int>(std::lround(scale * out.J_real(i, j)));
      out.J_int(i, j) = w;
      out.J_int(j, i) = w;
    }
  return out;
}

struct GroundStateReport {
  bool ok = false;
  std::vector<std::uint32_t> ground_states;                   // ids, ascending
  std::vector<std::pair<std::uint32_t, double>> energies;     // (id, E) sorted by E then id
};

// Exhaustive check that the minimum-energy states of (J, h) are exactly the
// table rows. Tractable for node counts up to 20.
inline GroundStateReport verify_ground_states(const Square<int>& J, const std::vector<double>& h,
                                              const TruthTable& table) {
  table.validate();
  const int n = J.n;
  if (table.width() != n)
    throw std::invalid_argument("verify_ground_states: table width does not match J");
  if (static_cast<int>(h.size()) != n)
    throw std::invalid_argument("verify_ground_states: h size does not match J");
  if (n > 20) throw std::invalid_argument("verify_ground_states: enumeration limited to 20 nodes");

  GroundStateReport rep;
  const std::uint32_t count = 1u << n;
  rep.energies.reserve(count);
  std::vector<int> m(n);
  for (std::uint32_t id = 0; id < count; ++id) {
    for (int i = 0; i < n; ++i) m[i] = (id >> (n - 1 - i)) & 1u ? 1 : -1;
    double pair_term = 0.0, field_term = 0.0;
    for (int i = 0; i < n; ++i) {
      field_term += h[i] * m[i];
      for (int j = 0; j < n; ++j) pair_term += J(i, j) * m[i] * m[j];
    }
    rep.energies.emplace_back(id, -(field_term + 0.5 * pair_term));
  }
  std::sort(rep.energies.begin(), rep.energies.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second : a.first < b.first;
            });

  const double emin = rep.energies.front().second;
  for (const auto& [id, e] : rep.energies) {
    if (e != emin) break;  // integer-valued energies compare exactly
    rep.ground_states.push_back(id);
  }

  std::set<std::uint32_t> want;
  for (std::size_t r = 0; r < table.rows.size(); ++r) want.insert(table.row_id(r));
  rep.ok = want == std::set<std::uint32_t>(rep.ground_states.begin(), rep.ground_states.end());
  return rep;
}

// Scale search: smallest integer scale in [1, 16] whose rounded couplings
// reproduce the table as the exact ground-state set.
inline SynthesisResult build_J(const std::vector<std::vector<double>>& basis,
                               const TruthTable& target) {
  const std::vector<double> h0(target.width(), 0.0);
  for (int scale = 1; scale <= 16; ++scale) {
    SynthesisResult cand = build_J(basis, scale);
    if (verify_ground_states(cand.J_int, h0, target).ok) return cand;
  }
  throw std::runtime_error("build_J: no integer scale in [1,16] reproduces the table ground states");
}

// Full pipeline: encode -> half-table -> orthonormalize -> verified rounding.
inline SynthesisResult synthesize(const TruthTable& table) {
  const HalfTable half = half_table(table);
  const GramSchmidtResult gs = gram_schmidt(encode_bipolar(half.table));
  SynthesisResult out = build_J(gs.basis, table);
  out.used_full_table = !half.complement_closed;
  return out;
}

}  // namespace psl
