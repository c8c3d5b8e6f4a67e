#include "creditnet/generators.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "creditnet/rng.hpp"

namespace creditnet {

const char* topology_name(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::erdos_renyi: return "erdos_renyi";
    case TopologyKind::core_periphery: return "core_periphery";
    case TopologyKind::isolated_blocks: return "isolated_blocks";
    case TopologyKind::dag_sccs: return "dag_sccs";
    case TopologyKind::from_file: return "from_file";
  }
  return "erdos_renyi";
}

TopologyKind topology_from_name(const std::string& name) {
  if (name == "erdos_renyi" || name == "er") return TopologyKind::erdos_renyi;
  if (name == "core_periphery" || name == "cp")
    return TopologyKind::core_periphery;
  if (name == "isolated_blocks" || name == "ib")
    return TopologyKind::isolated_blocks;
  if (name == "dag_sccs" || name == "scc") return TopologyKind::dag_sccs;
  if (name == "from_file" || name == "file") return TopologyKind::from_file;
  fail(Errc::invalid_spec, "unknown topology \"" + name + "\"");
}

const char* TopologySpec::code() const {
  switch (kind) {
    case TopologyKind::erdos_renyi: return "ER";
    case TopologyKind::core_periphery: return "CP";
    case TopologyKind::isolated_blocks: return "IB";
    case TopologyKind::dag_sccs: return "SCC";
    case TopologyKind::from_file: return "NET";
  }
  return "ER";
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    fail(Errc::invalid_spec, std::string(what) + " must lie in [0, 1]");
}

void check_range(const std::array<double, 2>& range, const char* what) {
  if (!(range[0] >= 0.0) || !(range[1] >= range[0]))
    fail(Errc::invalid_spec,
         std::string(what) + " must be a nonnegative, nonempty range");
}

}  // namespace

void TopologySpec::validate() const {
  check_range(liability_range, "liability range");
  check_range(asset_range, "asset range");
  switch (kind) {
    case TopologyKind::erdos_renyi:
      if (n == 0) fail(Errc::invalid_spec, "need at least one firm");
      check_probability(edge_probability, "edge probability");
      return;
    case TopologyKind::core_periphery:
      if (core_size == 0 || core_size > n)
        fail(Errc::invalid_spec, "core size must lie in [1, n]");
      check_probability(core_density, "core density");
      check_probability(periphery_to_core_density, "periphery density");
      return;
    case TopologyKind::isolated_blocks: {
      const std::size_t sum =
          std::accumulate(block_sizes.begin(), block_sizes.end(),
                          std::size_t{0});
      if (block_sizes.empty() || sum != n)
        fail(Errc::invalid_spec, "block sizes must sum to n");
      for (const std::size_t s : block_sizes)
        if (s == 0) fail(Errc::invalid_spec, "blocks must be nonempty");
      check_probability(block_density, "block density");
      return;
    }
    case TopologyKind::dag_sccs: {
      const std::size_t sum = std::accumulate(scc_sizes.begin(),
                                              scc_sizes.end(), std::size_t{0});
      if (scc_sizes.empty() || sum != n)
        fail(Errc::invalid_spec, "SCC sizes must sum to n");
      for (const std::size_t s : scc_sizes)
        if (s == 0) fail(Errc::invalid_spec, "SCCs must be nonempty");
      check_probability(inter_scc_probability, "inter-SCC probability");
      return;
    }
    case TopologyKind::from_file:
      if (file_path.empty()) fail(Errc::invalid_spec, "missing file path");
      return;
  }
}

namespace {

std::vector<std::size_t> block_of_firm(const std::vector<std::size_t>& sizes,
                                       std::size_t n) {
  std::vector<std::size_t> block(n, 0);
  std::size_t firm = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b)
    for (std::size_t k = 0; k < sizes[b]; ++k) block[firm++] = b;
  return block;
}

}  // namespace

CreditNetwork generate(const TopologySpec& spec) {
  spec.validate();
  if (spec.kind == TopologyKind::from_file)
    return load_network_file(spec.file_path);

  const std::size_t n = spec.n;
  SplitMix64 rng(spec.seed);
  std::vector<std::size_t> block;
  if (spec.kind == TopologyKind::isolated_blocks)
    block = block_of_firm(spec.block_sizes, n);
  else if (spec.kind == TopologyKind::dag_sccs)
    block = block_of_firm(spec.scc_sizes, n);

  // Stage 1: adjacency. Deterministic pairs take no draw.
  SquareMatrix adjacency(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool edge = false;
      switch (spec.kind) {
        case TopologyKind::erdos_renyi:
          edge = rng.next_double() < spec.edge_probability;
          break;
        case TopologyKind::core_periphery: {
          const bool i_core = i < spec.core_size;
          const bool j_core = j < spec.core_size;
          if (i_core && j_core)
            edge = rng.next_double() < spec.core_density;
          else if (!i_core && j_core)
            edge = rng.next_double() < spec.periphery_to_core_density;
          break;
        }
        case TopologyKind::isolated_blocks:
          if (block[i] == block[j])
            edge = rng.next_double() < spec.block_density;
          break;
        case TopologyKind::dag_sccs:
          if (block[i] == block[j])
            edge = true;
          else if (block[i] < block[j])
            edge = rng.next_double() < spec.inter_scc_probability;
          break;
        case TopologyKind::from_file:
          break;
      }
      if (edge) adjacency(i, j) = 1.0;
    }
  }

  // Stage 2: liabilities row-major over the existing edges.
  SquareMatrix liabilities(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (adjacency(i, j) > 0.0)
        liabilities(i, j) =
            rng.next_double(spec.liability_range[0], spec.liability_range[1]);

  // Stage 3: external assets by firm index.
  std::vector<double> assets(n);
  for (std::size_t i = 0; i < n; ++i)
    assets[i] = rng.next_double(spec.asset_range[0], spec.asset_range[1]);

  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i)
    labels[i] = "Firm " + std::to_string(i + 1);
  return CreditNetwork(std::move(labels), std::move(liabilities),
                       std::move(assets));
}

std::string network_file_text(const CreditNetwork& network) {
  return network_to_json(network).dump(2) + "\n";
}

void save_network_file(const CreditNetwork& network, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  out << network_file_text(network);
  if (!out) fail(Errc::io_error, "write to " + path + " failed");
}

CreditNetwork load_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot read " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, path + ": " + e.what());
  }
  return network_from_json(doc);
}

bool satisfies_isolated_blocks(const CreditNetwork& network,
                               const std::vector<std::size_t>& sizes) {
  const std::size_t n = network.size();
  if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != n)
    return false;
  const auto block = block_of_firm(sizes, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (network.liability(i, j) > 0.0 && block[i] != block[j]) return false;
  return true;
}

bool satisfies_core_periphery(const CreditNetwork& network,
                              std::size_t core_size) {
  // Periphery firms interact only with the core.
  for (std::size_t i = core_size; i < network.size(); ++i)
    for (std::size_t j = core_size; j < network.size(); ++j)
      if (i != j && network.liability(i, j) > 0.0) return false;
  return true;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(
    const CreditNetwork& network) {
  const std::size_t n = network.size();
  std::vector<std::vector<std::size_t>> adjacency(n), reverse(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (network.liability(i, j) > 0.0) {
        adjacency[i].push_back(j);
        reverse[j].push_back(i);
      }

  // Kosaraju with iterative passes.
  std::vector<bool> visited(n, false);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (visited[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    visited[s] = true;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < adjacency[v].size()) {
        const std::size_t w = adjacency[v][next++];
        if (!visited[w]) {
          visited[w] = true;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  std::vector<std::size_t> component(n, n);
  std::size_t count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (component[*it] != n) continue;
    std::vector<std::size_t> stack{*it};
    component[*it] = count;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const std::size_t w : reverse[v])
        if (component[w] == n) {
          component[w] = count;
          stack.push_back(w);
        }
    }
    ++count;
  }

  std::vector<std::vector<std::size_t>> groups(count);
  for (std::size_t v = 0; v < n; ++v) groups[component[v]].push_back(v);
  for (auto& group : groups) std::sort(group.begin(), group.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

bool satisfies_dag_sccs(const CreditNetwork& network,
                        const std::vector<std::size_t>& sizes) {
  const std::size_t n = network.size();
  if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != n)
    return false;
  const auto block = block_of_firm(sizes, n);

  // Blocks are complete digraphs and inter-block edges respect block order,
  // so the blocks are exactly the SCCs and the condensation is acyclic.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool edge = network.liability(i, j) > 0.0;
      if (block[i] == block[j] && !edge) return false;
      if (block[i] > block[j] && edge) return false;
    }
  }
  const auto sccs = strongly_connected_components(network);
  if (sccs.size() != sizes.size()) return false;
  for (const auto& scc : sccs) {
    const std::size_t b = block[scc.front()];
    if (scc.size() != sizes[b]) return false;
    for (const std::size_t v : scc)
      if (block[v] != b) return false;
  }
  return true;
}

bool satisfies_topology(const CreditNetwork& network,
                        const TopologySpec& spec) {
  switch (spec.kind) {
    case TopologyKind::erdos_renyi:
      return network.size() == spec.n;
    case TopologyKind::from_file:
      return true;
    case TopologyKind::core_periphery:
      return satisfies_core_periphery(network, spec.core_size);
    case TopologyKind::isolated_blocks:
      return satisfies_isolated_blocks(network, spec.block_sizes);
    case TopologyKind::dag_sccs:
      return satisfies_dag_sccs(network, spec.scc_sizes);
  }
  return false;
}

nlohmann::ordered_json topology_spec_to_json(const TopologySpec& spec) {
  nlohmann::ordered_json doc;
  doc["kind"] = topology_name(spec.kind);
  doc["n"] = spec.n;
  switch (spec.kind) {
    case TopologyKind::erdos_renyi:
      doc["edge_probability"] = spec.edge_probability;
      break;
    case TopologyKind::core_periphery:
      doc["core_size"] = spec.core_size;
      doc["core_density"] = spec.core_density;
      doc["periphery_to_core_density"] = spec.periphery_to_core_density;
      break;
    case TopologyKind::isolated_blocks:
      doc["block_sizes"] = spec.block_sizes;
      doc["block_density"] = spec.block_density;
      break;
    case TopologyKind::dag_sccs:
      doc["scc_sizes"] = spec.scc_sizes;
      doc["inter_scc_probability"] = spec.inter_scc_probability;
      break;
    case TopologyKind::from_file:
      doc["file_path"] = spec.file_path;
      break;
  }
  doc["liability_range"] = spec.liability_range;
  doc["asset_range"] = spec.asset_range;
  doc["seed"] = spec.seed;
  return doc;
}

TopologySpec topology_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    fail(Errc::schema_error, "topology spec must be an object");
  TopologySpec spec;
  spec.kind = topology_from_name(doc.value("kind", "erdos_renyi"));
  spec.n = doc.value("n", spec.n);
  spec.edge_probability = doc.value("edge_probability", spec.edge_probability);
  spec.core_size = doc.value("core_size", spec.core_size);
  spec.core_density = doc.value("core_density", spec.core_density);
  spec.periphery_to_core_density =
      doc.value("periphery_to_core_density", spec.periphery_to_core_density);
  if (doc.contains("block_sizes"))
    spec.block_sizes = doc.at("block_sizes").get<std::vector<std::size_t>>();
  spec.block_density = doc.value("block_density", spec.block_density);
  if (doc.contains("scc_sizes"))
    spec.scc_sizes = doc.at("scc_sizes").get<std::vector<std::size_t>>();
  spec.inter_scc_probability =
      doc.value("inter_scc_probability", spec.inter_scc_probability);
  spec.file_path = doc.value("file_path", spec.file_path);
  if (doc.contains("liability_range"))
    spec.liability_range =
        doc.at("liability_range").get<std::array<double, 2>>();
  if (doc.contains("asset_range"))
    spec.asset_range = doc.at("asset_range").get<std::array<double, 2>>();
  spec.seed = doc.value("seed", spec.seed);
  spec.validate();
  return spec;
}

}  // namespace creditnet
