#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "creditnet/network.hpp"

namespace creditnet {

enum class TopologyKind {
  erdos_renyi,
  core_periphery,
  isolated_blocks,
  dag_sccs,
  from_file,
};

const char* topology_name(TopologyKind kind);
TopologyKind topology_from_name(const std::string& name);

// Seeded instance description. Draw order is pinned: one uniform draw per
// admissible ordered pair row-major for the edges, then liabilities row-major
// over the existing edges, then external assets by firm index.
struct TopologySpec {
  TopologyKind kind = TopologyKind::erdos_renyi;
  std::size_t n = 10;

  double edge_probability = 0.3;  // erdos_renyi

  std::size_t core_size = 3;  // core_periphery
  double core_density = 0.8;
  double periphery_to_core_density = 0.4;

  std::vector<std::size_t> block_sizes{5, 5};  // isolated_blocks
  double block_density = 0.5;

  std::vector<std::size_t> scc_sizes{3, 3, 4};  // dag_sccs
  double inter_scc_probability = 0.15;

  std::string file_path;  // from_file

  std::array<double, 2> liability_range{15.0, 40.0};
  std::array<double, 2> asset_range{30.0, 50.0};
  std::uint64_t seed = 0;

  void validate() const;  // InvalidSpec
  // Short instance code used in experiment tables: ER, CP, IB, SCC, NET.
  const char* code() const;
};

CreditNetwork generate(const TopologySpec& spec);

CreditNetwork load_network_file(const std::string& path);
// Canonical form: fixed key order, two-space indent, trailing newline.
// Saving the same network twice is byte-identical.
void save_network_file(const CreditNetwork& network, const std::string& path);
std::string network_file_text(const CreditNetwork& network);

// Structural predicates, one per topology guarantee.
bool satisfies_isolated_blocks(const CreditNetwork& network,
                               const std::vector<std::size_t>& sizes);
bool satisfies_core_periphery(const CreditNetwork& network,
                              std::size_t core_size);
bool satisfies_dag_sccs(const CreditNetwork& network,
                        const std::vector<std::size_t>& sizes);
bool satisfies_topology(const CreditNetwork& network, const TopologySpec& spec);

// Strongly connected components over positive liabilities, each sorted,
// listed in order of their smallest member.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const CreditNetwork& network);

nlohmann::ordered_json topology_spec_to_json(const TopologySpec& spec);
TopologySpec topology_spec_from_json(const nlohmann::json& doc);

}  // namespace creditnet
