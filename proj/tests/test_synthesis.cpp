#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "psl/circuits.hpp"
#include "psl/synthesis.hpp"

using namespace psl;

TEST_CASE("bipolar encoding") {
  TruthTable t;
  t.var_names = {"x", "y"};
  t.rows = {{0, 1}};
  const auto enc = encode_bipolar(t);
  CHECK(enc[0] == std::vector<double>{-1.0, 1.0});

  SUBCASE("full adder line") {
    const TruthTable fa = full_adder_table();
    const auto rows = encode_bipolar(fa);
    CHECK(rows[3] == std::vector<double>{-1.0, 1.0, 1.0, -1.0, 1.0});  // 01101
  }
  SUBCASE("full adder halves are complementary") {
    const TruthTable fa = full_adder_table();
    const auto rows = encode_bipolar(fa);
    for (int k = 0; k < 8; ++k)
      for (int i = 0; i < 5; ++i) CHECK(rows[k][i] == -rows[7 - k][i]);
  }
}

TEST_CASE("half_table") {
  SUBCASE("full adder keeps the first four lines") {
    const TruthTable fa = full_adder_table();
    const HalfTable h = half_table(fa);
    CHECK(h.complement_closed);
    REQUIRE(h.table.rows.size() == 4);
    for (int r = 0; r < 4; ++r) CHECK(h.table.rows[r] == fa.rows[r]);
  }
  SUBCASE("two complementary lines reduce to one") {
    TruthTable t;
    t.var_names = {"x", "y"};
    t.rows = {{0, 1}, {1, 0}};
    const HalfTable h = half_table(t);
    CHECK(h.complement_closed);
    REQUIRE(h.table.rows.size() == 1);
    CHECK(h.table.rows[0] == std::vector<int>{0, 1});
  }
  SUBCASE("non-closed table falls back to all rows") {
    TruthTable t;
    t.var_names = {"x", "y"};
    t.rows = {{0, 0}, {0, 1}};
    const HalfTable h = half_table(t);
    CHECK_FALSE(h.complement_closed);
    CHECK(h.table.rows == t.rows);
  }
}

TEST_CASE("gram_schmidt") {
  SUBCASE("already orthogonal pair is normalized in place") {
    const auto gs = gram_schmidt({{1, 1}, {1, -1}});
    REQUIRE(gs.basis.size() == 2);
    CHECK(gs.dropped == 0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(gs.basis[0][0] == doctest::Approx(r).epsilon(1e-12));
    CHECK(gs.basis[0][1] == doctest::Approx(r).epsilon(1e-12));
    CHECK(gs.basis[1][0] == doctest::Approx(r).epsilon(1e-12));
    CHECK(gs.basis[1][1] == doctest::Approx(-r).epsilon(1e-12));
  }
  SUBCASE("single row normalizes to itself") {
    const auto gs = gram_schmidt({{3, 0, 4}});
    REQUIRE(gs.basis.size() == 1);
    CHECK(gs.basis[0][0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(gs.basis[0][2] == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("full-adder half-table gives four orthonormal 5-vectors") {
    const auto gs = gram_schmidt(encode_bipolar(half_table(full_adder_table()).table));
    REQUIRE(gs.basis.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        double d = 0.0;
        for (int k = 0; k < 5; ++k) d += gs.basis[i][k] * gs.basis[j][k];
        if (i == j)
          CHECK(std::abs(d - 1.0) < 1e-10);
        else
          CHECK(std::abs(d) < 1e-10);
      }
  }
  SUBCASE("zero vector is rejected") {
    CHECK_THROWS_AS(gram_schmidt({{0.0, 0.0}}), std::invalid_argument);
  }
  SUBCASE("dependent rows are dropped") {
    const auto gs = gram_schmidt({{1, 0}, {2, 0}, {0, 1}});
    CHECK(gs.basis.size() == 2);
    CHECK(gs.dropped == 1);
  }
}

TEST_CASE("build_J") {
  SUBCASE("single pattern at explicit scale 2") {
    const double r = 1.0 / std::sqrt(2.0);
    const SynthesisResult res = build_J({{r, r}}, 2);
    CHECK(res.J_real(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.J_int(0, 1) == 1);
    CHECK(res.J_int(1, 0) == 1);
    CHECK(res.J_int(0, 0) == 0);
  }
  SUBCASE("full adder projection matches the null-space formula") {
    // The encoded half-table spans the orthogonal complement of
    // v = (1, 1, 1, -1, -2), so the projection is I - v v^T / 8.
    const auto gs = gram_schmidt(encode_bipolar(half_table(full_adder_table()).table));
    const Square<double> j = projection_couplings(gs.basis);
    const double v[5] = {1, 1, 1, -1, -2};
    for (int i = 0; i < 5; ++i)
      for (int k = 0; k < 5; ++k) {
        const double want = i == k ? 0.0 : -v[i] * v[k] / 8.0;
        CHECK(std::abs(j(i, k) - want) < 1e-12);
      }
  }
  SUBCASE("full adder synthesis lands on the known integer couplings") {
    const SynthesisResult res = synthesize(full_adder_table());
    const int want[5][5] = {{0, -1, -1, 1, 2},
                            {-1, 0, -1, 1, 2},
                            {-1, -1, 0, 1, 2},
                            {1, 1, 1, 0, -2},
                            {2, 2, 2, -2, 0}};
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) CHECK(res.J_int(i, j) == want[i][j]);
    CHECK(res.J_int.symmetric());
    CHECK(res.J_int.zero_diagonal());
    CHECK_FALSE(res.used_full_table);
  }
}

TEST_CASE("verify_ground_states") {
  SUBCASE("two-spin ferromagnet against {00, 11}") {
    Square<int> j(2);
    j(0, 1) = j(1, 0) = 1;
    TruthTable t;
    t.var_names = {"x", "y"};
    t.rows = {{0, 0}, {1, 1}};
    const GroundStateReport rep = verify_ground_states(j, {0.0, 0.0}, t);
    CHECK(rep.ok);
    CHECK(rep.ground_states == std::vector<std::uint32_t>{0, 3});

    TruthTable wrong;
    wrong.var_names = {"x", "y"};
    wrong.rows = {{0, 1}};
    CHECK_FALSE(verify_ground_states(j, {0.0, 0.0}, wrong).ok);
  }
  SUBCASE("synthesized full adder has exactly the eight truth lines as minima") {
    const TruthTable fa = full_adder_table();
    const SynthesisResult res = synthesize(fa);
    const GroundStateReport rep = verify_ground_states(res.J_int, std::vector<double>(5, 0.0), fa);
    CHECK(rep.ok);
    REQUIRE(rep.ground_states.size() == 8);
    std::set<std::uint32_t> want;
    for (std::size_t r = 0; r < fa.rows.size(); ++r) want.insert(fa.row_id(r));
    CHECK(std::set<std::uint32_t>(rep.ground_states.begin(), rep.ground_states.end()) == want);
    CHECK(rep.energies.size() == 32);
    CHECK(rep.energies.front().second < rep.energies.back().second);
  }
}

TEST_CASE("node inputs point along the state on every truth line") {
  const TruthTable fa = full_adder_table();
  const SynthesisResult res = synthesize(fa);
  const Network net = res.network(1.0);
  for (std::size_t r = 0; r < fa.rows.size(); ++r) {
    SpinState m(5);
    for (int i = 0; i < 5; ++i) m[i] = spin_from_bit(fa.rows[r][i]);
    for (int i = 0; i < 5; ++i) {
      const double input = compute_input(i, m, net);
      CHECK(input * m[i] > 0.0);
    }
  }
}

TEST_CASE("truth table text round trip") {
  const TruthTable fa = full_adder_table();
  std::stringstream ss;
  write_truth_table(ss, fa);
  const TruthTable back = read_truth_table(ss);
  CHECK(back.var_names == fa.var_names);
  CHECK(back.rows == fa.rows);

  SUBCASE("rejects malformed rows") {
    std::stringstream bad("x y\n012\n");
    CHECK_THROWS_AS(read_truth_table(bad), std::invalid_argument);
  }
}
