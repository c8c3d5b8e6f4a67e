#include "doctest.h"

#include <set>

#include "creditnet/generators.hpp"
#include "creditnet/operations.hpp"
#include "support/oracles.hpp"

using namespace creditnet;

namespace {

CreditNetwork figure1() {
  return new_network({"i", "j", "k"},
                     {{0, 5, 0}, {0, 0, 5}, {0, 0, 0}}, {6, 2, 3});
}

CreditNetwork two_cycle() {
  return new_network({"a", "b"}, {{0, 10}, {6, 0}}, {2, 0});
}

CreditNetwork complete3() {
  return new_network({"a", "b", "c"},
                     {{0, 4, 5}, {6, 0, 7}, {8, 9, 0}}, {1, 1, 1});
}

}  // namespace

TEST_SUITE("operations") {

TEST_CASE("acyclic networks have no cycles") {
  CHECK(enumerate_simple_cycles(figure1()).empty());
}

TEST_CASE("two firm loop yields one cycle") {
  const auto cycles = enumerate_simple_cycles(two_cycle());
  REQUIRE(cycles.size() == 1);
  CHECK(cycles[0].firms == std::vector<std::size_t>{0, 1});
  CHECK(cycles[0].min_liability == 6.0);
}

TEST_CASE("complete bidirectional triangle has five cycles") {
  const auto cycles = enumerate_simple_cycles(complete3());
  REQUIRE(cycles.size() == 5);
  // Ordered by length descending, then lexicographic.
  CHECK(cycles[0].firms == std::vector<std::size_t>{0, 1, 2});
  CHECK(cycles[1].firms == std::vector<std::size_t>{0, 2, 1});
  CHECK(cycles[2].firms == std::vector<std::size_t>{0, 1});
  CHECK(cycles[3].firms == std::vector<std::size_t>{0, 2});
  CHECK(cycles[4].firms == std::vector<std::size_t>{1, 2});
  CHECK(cycles[0].min_liability == 4.0);  // 0->1 (4), 1->2 (7), 2->0 (8)
  CHECK(cycles[2].min_liability == 4.0);  // 0->1 (4), 1->0 (6)
}

TEST_CASE("length cap filters longer cycles") {
  const auto cycles = enumerate_simple_cycles(complete3(), 2);
  REQUIRE(cycles.size() == 3);
  for (const auto& cycle : cycles) CHECK(cycle.length() == 2);
}

TEST_CASE("cycle count cap raises CycleLimitExceeded") {
  CHECK_THROWS_WITH_AS(enumerate_simple_cycles(complete3(), std::nullopt, 3),
                       doctest::Contains("CycleLimitExceeded"), Error);
}

TEST_CASE("enumeration agrees with brute force on small networks") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    TopologySpec spec;
    spec.kind = TopologyKind::erdos_renyi;
    spec.n = 2 + seed % 5;  // up to 6 firms
    spec.edge_probability = 0.25 + 0.1 * static_cast<double>(seed % 4);
    spec.seed = 7000 + seed;
    const CreditNetwork net = generate(spec);

    const auto expected = testing::brute_force_cycles(net, net.size());
    const auto actual = enumerate_simple_cycles(net);
    REQUIRE(actual.size() == expected.size());
    for (std::size_t k = 0; k < actual.size(); ++k)
      CHECK(actual[k].firms == expected[k]);

    // Same agreement under a length cap.
    const auto capped_expected = testing::brute_force_cycles(net, 3);
    const auto capped_actual = enumerate_simple_cycles(net, 3);
    REQUIRE(capped_actual.size() == capped_expected.size());
    for (std::size_t k = 0; k < capped_actual.size(); ++k)
      CHECK(capped_actual[k].firms == capped_expected[k]);
  }
}

TEST_CASE("make_cycle validates and canonicalizes") {
  const CreditNetwork net = complete3();
  const DebtCycle cycle = make_cycle(net, {2, 0, 1});
  CHECK(cycle.firms == std::vector<std::size_t>{0, 1, 2});
  CHECK(cycle.min_liability == 4.0);
  CHECK_THROWS_WITH_AS(make_cycle(net, {0}), doctest::Contains("InvalidPlan"),
                       Error);
  CHECK_THROWS_WITH_AS(make_cycle(net, {0, 0}),
                       doctest::Contains("InvalidPlan"), Error);
  CHECK_THROWS_WITH_AS(make_cycle(net, {0, 7}),
                       doctest::Contains("InvalidPlan"), Error);
  CHECK_THROWS_WITH_AS(make_cycle(figure1(), {0, 1}),
                       doctest::Contains("InvalidPlan"), Error);
}

TEST_CASE("compressing the two firm loop zeroes the smaller edge") {
  const CreditNetwork net = two_cycle();
  const auto outcome =
      compress_cycles(net, enumerate_simple_cycles(net), 0);
  CHECK(outcome.network.liability(0, 1) == 4.0);
  CHECK(outcome.network.liability(1, 0) == 0.0);
  REQUIRE(outcome.report.applications.size() == 1);
  CHECK(outcome.report.applications[0].mu_applied == 6.0);
  CHECK_FALSE(outcome.report.applications[0].skipped);
  CHECK(outcome.network.external_assets() == net.external_assets());
}

TEST_CASE("three firm cycle mirrors the worked compression") {
  const CreditNetwork net = new_network(
      {"a", "b", "c"}, {{0, 5, 0}, {0, 0, 2}, {7, 0, 0}}, {1, 1, 1});
  const auto outcome = compress_cycles(net, enumerate_simple_cycles(net), 0);
  CHECK(outcome.network.liability(0, 1) == 3.0);
  CHECK(outcome.network.liability(1, 2) == 0.0);
  CHECK(outcome.network.liability(2, 0) == 5.0);
  CHECK(outcome.report.applications[0].mu_applied == 2.0);
}

TEST_CASE("overlapping cycles skip once the shared edge is gone") {
  // Cycles (0,1) and (0,1,2) share edge 0->1; the 3-cycle goes first and
  // zeroes it, so the 2-cycle must be skipped.
  const CreditNetwork net = new_network(
      {"a", "b", "c"}, {{0, 5, 0}, {5, 0, 7}, {9, 0, 0}}, {1, 1, 1});
  const auto cycles = enumerate_simple_cycles(net);
  REQUIRE(cycles.size() == 2);
  const auto outcome = compress_cycles(net, cycles, 0);
  REQUIRE(outcome.report.applications.size() == 2);
  CHECK(outcome.report.applications[0].cycle.length() == 3);
  CHECK(outcome.report.applications[0].mu_applied == 5.0);
  CHECK(outcome.report.applications[1].cycle.length() == 2);
  CHECK(outcome.report.applications[1].skipped);
  CHECK(outcome.network.liability(0, 1) == 0.0);
  CHECK(outcome.network.liability(1, 0) == 5.0);
  CHECK(outcome.network.liability(1, 2) == 2.0);
  CHECK(outcome.network.liability(2, 0) == 4.0);
}

TEST_CASE("stale cycles are rejected up front") {
  const CreditNetwork net = two_cycle();
  DebtCycle missing;
  missing.firms = {0, 1};
  const CreditNetwork removed = remove_debts(net, {{1, 0}});
  CHECK_THROWS_WITH_AS(compress_cycles(removed, {missing}, 0),
                       doctest::Contains("StaleCycle"), Error);
}

TEST_CASE("equal length ordering is seed deterministic") {
  const CreditNetwork net = complete3();
  const auto cycles = enumerate_simple_cycles(net, 2);
  const auto a = compress_cycles(net, cycles, 13);
  const auto b = compress_cycles(net, cycles, 13);
  REQUIRE(a.report.applications.size() == b.report.applications.size());
  for (std::size_t k = 0; k < a.report.applications.size(); ++k)
    CHECK(a.report.applications[k].cycle.firms ==
          b.report.applications[k].cycle.firms);
  CHECK(a.network == b.network);
  // The request order does not matter, only the set and the seed.
  auto reversed = cycles;
  std::reverse(reversed.begin(), reversed.end());
  const auto c = compress_cycles(net, reversed, 13);
  CHECK(c.network == a.network);
  for (std::size_t k = 0; k < a.report.applications.size(); ++k)
    CHECK(c.report.applications[k].cycle.firms ==
          a.report.applications[k].cycle.firms);
}

TEST_CASE("compression conserves net positions and zeroes an edge") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    TopologySpec spec;
    spec.kind = TopologyKind::erdos_renyi;
    spec.n = 6;
    spec.edge_probability = 0.45;
    spec.seed = 8800 + seed;
    const CreditNetwork net = testing::snap_to_grid(generate(spec));
    const auto cycles = enumerate_simple_cycles(net);
    if (cycles.empty()) continue;

    // Replay the batch one application at a time.
    const auto outcome = compress_cycles(net, cycles, seed);
    CreditNetwork rolling = net;
    for (const auto& app : outcome.report.applications) {
      if (app.skipped) {
        // The replayed network must indeed lack an on-cycle edge.
        bool lost = false;
        for (std::size_t k = 0; k < app.cycle.length(); ++k)
          if (rolling.liability(app.cycle.firms[k],
                                app.cycle.firms[(k + 1) % app.cycle.length()]) ==
              0.0)
            lost = true;
        CHECK(lost);
        continue;
      }
      const auto step = compress_cycles(rolling, {app.cycle}, seed);
      REQUIRE(step.report.applications.size() == 1);
      CHECK_FALSE(step.report.applications[0].skipped);
      CHECK(step.report.applications[0].mu_applied == app.mu_applied);
      bool zeroed = false;
      for (std::size_t k = 0; k < app.cycle.length(); ++k) {
        const std::size_t from = app.cycle.firms[k];
        const std::size_t to = app.cycle.firms[(k + 1) % app.cycle.length()];
        CHECK(step.network.liability(from, to) <= rolling.liability(from, to));
        if (step.network.liability(from, to) == 0.0 &&
            rolling.liability(from, to) > 0.0)
          zeroed = true;
      }
      CHECK(zeroed);
      for (std::size_t firm = 0; firm < net.size(); ++firm)
        CHECK(testing::net_position(step.network, firm) ==
              testing::net_position(rolling, firm));
      rolling = step.network;
    }
    CHECK(rolling == outcome.network);
  }
}

TEST_CASE("remove_debts zeroes exactly the listed edges") {
  const CreditNetwork net = figure1();
  const CreditNetwork removed = remove_debts(net, {{0, 1}});
  CHECK(removed.liability(0, 1) == 0.0);
  CHECK(removed.liability(1, 2) == 5.0);
  CHECK(removed.external_assets() == net.external_assets());
}

TEST_CASE("removing nothing is the identity") {
  const CreditNetwork net = figure1();
  CHECK(remove_debts(net, {}) == net);
}

TEST_CASE("removing both loop edges empties the matrix") {
  const CreditNetwork net = two_cycle();
  const CreditNetwork removed = remove_debts(net, {{0, 1}, {1, 0}});
  CHECK(removed.liability(0, 1) == 0.0);
  CHECK(removed.liability(1, 0) == 0.0);
}

TEST_CASE("remove_debts validates the edge list") {
  const CreditNetwork net = figure1();
  CHECK_THROWS_WITH_AS(remove_debts(net, {{0, 2}}),
                       doctest::Contains("NoSuchDebt"), Error);
  CHECK_THROWS_WITH_AS(remove_debts(net, {{0, 1}, {0, 1}}),
                       doctest::Contains("DuplicateEdge"), Error);
  CHECK_THROWS_WITH_AS(remove_debts(net, {{0, 9}}),
                       doctest::Contains("NoSuchDebt"), Error);
}

TEST_CASE("removal is idempotent and order independent") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TopologySpec spec;
    spec.kind = TopologyKind::erdos_renyi;
    spec.n = 6;
    spec.edge_probability = 0.5;
    spec.seed = 9100 + seed;
    const CreditNetwork net = generate(spec);
    std::vector<DebtEdge> edges;
    for (std::size_t i = 0; i < net.size() && edges.size() < 3; ++i)
      for (std::size_t j = 0; j < net.size() && edges.size() < 3; ++j)
        if (net.liability(i, j) > 0.0) edges.push_back({i, j});
    if (edges.size() < 2) continue;

    const CreditNetwork forward = remove_debts(net, edges);
    auto reversed = edges;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(remove_debts(net, reversed) == forward);
    // Applying one disjoint edge at a time commutes with the batch.
    CreditNetwork rolling = net;
    for (const auto& edge : edges) rolling = remove_debts(rolling, {edge});
    CHECK(rolling == forward);
  }
}

TEST_CASE("cycle and report serialization") {
  const auto cycles = enumerate_simple_cycles(two_cycle());
  const auto doc = cycles_to_json(cycles);
  CHECK(doc.size() == 1);
  CHECK(doc[0].at("firms") == nlohmann::ordered_json::array({0, 1}));
  CHECK(doc[0].at("min_liability").get<double>() == 6.0);

  const auto outcome = compress_cycles(two_cycle(), cycles, 5);
  const auto report = compression_report_to_json(outcome.report);
  CHECK(report.at("seed").get<std::uint64_t>() == 5);
  CHECK(report.at("applications").size() == 1);
}

}  // TEST_SUITE
