#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "creditnet/clearing.hpp"
#include "creditnet/generators.hpp"
#include "creditnet/operations.hpp"

using namespace creditnet;

namespace {

TopologySpec spec_of(TopologyKind kind, std::uint64_t seed) {
  TopologySpec spec;
  spec.kind = kind;
  spec.seed = seed;
  return spec;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE("generators") {

TEST_CASE("generation is deterministic in the seed") {
  for (const TopologyKind kind :
       {TopologyKind::erdos_renyi, TopologyKind::core_periphery,
        TopologyKind::isolated_blocks, TopologyKind::dag_sccs}) {
    const auto spec = spec_of(kind, 1234);
    CHECK(generate(spec) == generate(spec));
    // A different seed moves something.
    auto other = spec;
    other.seed = 1235;
    CHECK_FALSE(generate(other) == generate(spec));
  }
}

TEST_CASE("draws land inside the closed parameter ranges") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const CreditNetwork net = generate(spec_of(TopologyKind::erdos_renyi, seed));
    CHECK(net.size() == 10);
    for (std::size_t i = 0; i < net.size(); ++i) {
      CHECK(net.external_asset(i) >= 30.0);
      CHECK(net.external_asset(i) <= 50.0);
      CHECK(net.liability(i, i) == 0.0);
      for (std::size_t j = 0; j < net.size(); ++j) {
        const double l = net.liability(i, j);
        if (l != 0.0) {
          CHECK(l >= 15.0);
          CHECK(l <= 40.0);
        }
      }
    }
  }
}

TEST_CASE("isolated blocks have no cross-block edges") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto spec = spec_of(TopologyKind::isolated_blocks, seed);
    const CreditNetwork net = generate(spec);
    CHECK(satisfies_isolated_blocks(net, spec.block_sizes));
    CHECK(weakly_connected_components(net).size() >= 2);
    CHECK(satisfies_topology(net, spec));
  }
}

TEST_CASE("custom block sizes partition the network") {
  auto spec = spec_of(TopologyKind::isolated_blocks, 5);
  spec.n = 9;
  spec.block_sizes = {4, 3, 2};
  spec.block_density = 1.0;
  const CreditNetwork net = generate(spec);
  CHECK(satisfies_isolated_blocks(net, spec.block_sizes));
  CHECK(weakly_connected_components(net).size() == 3);
  // Density one makes each block complete.
  CHECK(net.liability(0, 1) > 0.0);
  CHECK(net.liability(8, 7) > 0.0);
  CHECK(net.liability(0, 4) == 0.0);
}

TEST_CASE("dag_sccs blocks are the strongly connected components") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto spec = spec_of(TopologyKind::dag_sccs, seed);
    const CreditNetwork net = generate(spec);
    CHECK(satisfies_dag_sccs(net, spec.scc_sizes));
    const auto sccs = strongly_connected_components(net);
    REQUIRE(sccs.size() == 3);
    CHECK(sccs[0].size() == 3);
    CHECK(sccs[1].size() == 3);
    CHECK(sccs[2].size() == 4);
  }
}

TEST_CASE("core periphery keeps the periphery away from itself") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto spec = spec_of(TopologyKind::core_periphery, seed);
    const CreditNetwork net = generate(spec);
    CHECK(satisfies_core_periphery(net, spec.core_size));
    // Periphery rows may touch only core columns.
    for (std::size_t i = spec.core_size; i < net.size(); ++i)
      for (std::size_t j = 0; j < net.size(); ++j)
        if (net.liability(i, j) > 0.0) CHECK(j < spec.core_size);
  }
}

TEST_CASE("invalid specs are rejected") {
  auto spec = spec_of(TopologyKind::erdos_renyi, 0);
  spec.edge_probability = 1.5;
  CHECK_THROWS_WITH_AS(generate(spec), doctest::Contains("InvalidSpec"), Error);

  spec = spec_of(TopologyKind::isolated_blocks, 0);
  spec.block_sizes = {5, 4};  // sums to 9, n is 10
  CHECK_THROWS_AS(generate(spec), Error);

  spec = spec_of(TopologyKind::dag_sccs, 0);
  spec.scc_sizes = {};
  CHECK_THROWS_AS(generate(spec), Error);

  spec = spec_of(TopologyKind::core_periphery, 0);
  spec.core_size = 11;
  CHECK_THROWS_AS(generate(spec), Error);

  spec = spec_of(TopologyKind::erdos_renyi, 0);
  spec.liability_range = {40.0, 15.0};
  CHECK_THROWS_AS(generate(spec), Error);

  spec = spec_of(TopologyKind::from_file, 0);
  CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("strongly connected components on a known digraph") {
  // 0 <-> 1 form one SCC, 2 is alone, 3 <-> 4 another.
  const CreditNetwork net = new_network(
      {"a", "b", "c", "d", "e"},
      {{0, 1, 0, 0, 0},
       {1, 0, 1, 0, 0},
       {0, 0, 0, 1, 0},
       {0, 0, 0, 0, 1},
       {0, 0, 0, 1, 0}},
      {0, 0, 0, 0, 0});
  const auto sccs = strongly_connected_components(net);
  REQUIRE(sccs.size() == 3);
  CHECK(sccs[0] == std::vector<std::size_t>{0, 1});
  CHECK(sccs[1] == std::vector<std::size_t>{2});
  CHECK(sccs[2] == std::vector<std::size_t>{3, 4});
}

TEST_CASE("save and load round trip") {
  const auto path = temp_path("creditnet_roundtrip.json");
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const CreditNetwork net = generate(spec_of(TopologyKind::erdos_renyi, seed));
    save_network_file(net, path.string());
    CHECK(load_network_file(path.string()) == net);
  }
  std::filesystem::remove(path);
}

TEST_CASE("saving twice is byte identical") {
  const CreditNetwork net = generate(spec_of(TopologyKind::dag_sccs, 3));
  const std::string once = network_file_text(net);
  const std::string twice = network_file_text(net);
  CHECK(once == twice);
  // save(load(f)) == f for canonical files.
  const auto path = temp_path("creditnet_canonical.json");
  save_network_file(net, path.string());
  const CreditNetwork back = load_network_file(path.string());
  CHECK(network_file_text(back) == once);
  std::filesystem::remove(path);
}

TEST_CASE("figure-1 network fixture is stable") {
  const CreditNetwork net = new_network(
      {"i", "j", "k"}, {{0, 5, 0}, {0, 0, 5}, {0, 0, 0}}, {6, 2, 3});
  const std::string expected =
      "{\n"
      "  \"labels\": [\"i\", \"j\", \"k\"],\n"
      "  \"external_assets\": [6.0, 2.0, 3.0],\n"
      "  \"liabilities\": [[0.0, 5.0, 0.0], [0.0, 0.0, 5.0], [0.0, 0.0, 0.0]]\n"
      "}\n";
  CHECK(network_file_text(net) == expected);
}

TEST_CASE("a 23 firm file loads") {
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < 23; ++k)
    labels.push_back("Bank " + std::to_string(k + 1));
  SquareMatrix liabilities(23, 0.0);
  liabilities(0, 22) = 12.5;
  liabilities(22, 1) = 3.25;
  std::vector<double> assets(23, 10.0);
  const CreditNetwork net(labels, liabilities, assets);

  const auto path = temp_path("creditnet_banks.json");
  save_network_file(net, path.string());
  const CreditNetwork back = load_network_file(path.string());
  CHECK(back.size() == 23);
  CHECK(back.liability(0, 22) == 12.5);
  std::filesystem::remove(path);

  auto spec = spec_of(TopologyKind::from_file, 0);
  spec.file_path = path.string();
  CHECK_THROWS_WITH_AS(generate(spec), doctest::Contains("IoError"), Error);
}

TEST_CASE("loader error taxonomy") {
  const auto path = temp_path("creditnet_bad.json");
  auto write = [&](const std::string& text) {
    std::ofstream out(path);
    out << text;
  };

  write("{not json");
  CHECK_THROWS_WITH_AS(load_network_file(path.string()),
                       doctest::Contains("ParseError"), Error);
  write("{\"labels\": [\"a\"], \"external_assets\": [1], "
        "\"liabilities\": [[0]], \"extra\": 1}");
  CHECK_THROWS_WITH_AS(load_network_file(path.string()),
                       doctest::Contains("SchemaError"), Error);
  write("{\"labels\": [\"a\", \"b\"], \"external_assets\": [1, 1], "
        "\"liabilities\": [[0, -1], [0, 0]]}");
  CHECK_THROWS_WITH_AS(load_network_file(path.string()),
                       doctest::Contains("InvariantViolation"), Error);
  std::filesystem::remove(path);
  CHECK_THROWS_WITH_AS(load_network_file(path.string()),
                       doctest::Contains("IoError"), Error);
}

TEST_CASE("topology spec json round trip") {
  for (const TopologyKind kind :
       {TopologyKind::erdos_renyi, TopologyKind::core_periphery,
        TopologyKind::isolated_blocks, TopologyKind::dag_sccs}) {
    auto spec = spec_of(kind, 99);
    const TopologySpec back = topology_spec_from_json(topology_spec_to_json(spec));
    CHECK(back.kind == spec.kind);
    CHECK(back.seed == 99);
    CHECK(generate(back) == generate(spec));
  }
}

TEST_CASE("generated networks keep producing cycles and defaults") {
  // The experiment regime needs both; check the defaults deliver them.
  std::size_t cyclic = 0, with_defaults = 0, total = 0;
  for (const TopologyKind kind :
       {TopologyKind::erdos_renyi, TopologyKind::core_periphery,
        TopologyKind::isolated_blocks, TopologyKind::dag_sccs}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const CreditNetwork net = generate(spec_of(kind, 40 + seed));
      ++total;
      if (!enumerate_simple_cycles(net, {}, 200000).empty()) ++cyclic;
      if (!clear(net).default_set.empty()) ++with_defaults;
    }
  }
  CHECK(cyclic >= total * 9 / 10);
  CHECK(with_defaults >= total * 9 / 10);
}

}  // TEST_SUITE
