#include "creditnet/operations.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "creditnet/rng.hpp"

namespace creditnet {

namespace {

std::string cycle_text(const std::vector<std::size_t>& firms) {
  std::string s = "(";
  for (std::size_t k = 0; k < firms.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(firms[k]);
  }
  return s + ")";
}

std::vector<std::size_t> canonical_rotation(std::vector<std::size_t> firms) {
  const auto smallest = std::min_element(firms.begin(), firms.end());
  std::rotate(firms.begin(), smallest, firms.end());
  return firms;
}

double min_liability_on(const CreditNetwork& network,
                        const std::vector<std::size_t>& firms) {
  double mu = network.liability(firms.back(), firms.front());
  for (std::size_t k = 0; k + 1 < firms.size(); ++k)
    mu = std::min(mu, network.liability(firms[k], firms[k + 1]));
  return mu;
}

// Lexicographic order on the canonical firm lists, after longer-first.
bool enumeration_order(const DebtCycle& a, const DebtCycle& b) {
  if (a.length() != b.length()) return a.length() > b.length();
  return a.firms < b.firms;
}

// Johnson-style blocked search rooted at the smallest vertex of each cycle.
// With a length cap, a branch cut by the cap is treated as if a cycle had
// been found so the unblocking stays conservative; completeness under the
// cap is covered by the brute-force cross-check in the tests.
class CycleSearch {
 public:
  CycleSearch(const std::vector<std::vector<std::size_t>>& adjacency,
              std::optional<std::size_t> max_len, std::size_t max_count,
              std::vector<DebtCycle>& out)
      : adjacency_(adjacency),
        reverse_(adjacency.size()),
        max_len_(max_len),
        max_count_(max_count),
        out_(out),
        blocked_(adjacency.size(), false),
        block_list_(adjacency.size()) {
    for (std::size_t v = 0; v < adjacency_.size(); ++v)
      for (const std::size_t w : adjacency_[v]) reverse_[w].push_back(v);
  }

  void run() {
    const std::size_t n = adjacency_.size();
    for (root_ = 0; root_ < n; ++root_) {
      scc_of_root();
      if (component_[root_] < 2) continue;
      std::fill(blocked_.begin(), blocked_.end(), false);
      for (auto& list : block_list_) list.clear();
      circuit(root_);
    }
  }

 private:
  // Membership flags: component_[v] counts the vertices of the strongly
  // connected component of root_ within the subgraph on {root_, ...}, stored
  // at every member; vertices outside carry 0.
  void scc_of_root() {
    const std::size_t n = adjacency_.size();
    component_.assign(n, 0);
    // Forward reachability from root over vertices >= root.
    std::vector<bool> fwd(n, false), back(n, false);
    std::vector<std::size_t> stack{root_};
    fwd[root_] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const std::size_t w : adjacency_[v])
        if (w >= root_ && !fwd[w]) {
          fwd[w] = true;
          stack.push_back(w);
        }
    }
    stack.push_back(root_);
    back[root_] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const std::size_t u : reverse_[v])
        if (u >= root_ && fwd[u] && !back[u]) {
          back[u] = true;
          stack.push_back(u);
        }
    }
    std::size_t count = 0;
    for (std::size_t v = root_; v < n; ++v)
      if (fwd[v] && back[v]) ++count;
    for (std::size_t v = root_; v < n; ++v)
      if (fwd[v] && back[v]) component_[v] = count;
  }

  bool circuit(std::size_t v) {
    bool found = false;
    path_.push_back(v);
    blocked_[v] = true;
    for (const std::size_t w : adjacency_[v]) {
      if (component_[w] == 0 || w < root_) continue;
      if (w == root_) {
        if (!max_len_ || path_.size() <= *max_len_) {
          report();
          found = true;
        } else {
          found = true;  // cap hit exactly at closing length
        }
      } else if (!blocked_[w]) {
        if (!max_len_ || path_.size() + 1 <= *max_len_) {
          if (circuit(w)) found = true;
        } else {
          found = true;  // cap pruned this branch
        }
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (const std::size_t w : adjacency_[v]) {
        if (component_[w] == 0 || w < root_) continue;
        auto& list = block_list_[w];
        if (std::find(list.begin(), list.end(), v) == list.end())
          list.push_back(v);
      }
    }
    path_.pop_back();
    return found;
  }

  void unblock(std::size_t v) {
    blocked_[v] = false;
    auto pending = std::move(block_list_[v]);
    block_list_[v].clear();
    for (const std::size_t u : pending)
      if (blocked_[u]) unblock(u);
  }

  void report() {
    if (out_.size() >= max_count_) {
      fail(Errc::cycle_limit_exceeded,
           "more than " + std::to_string(max_count_) + " cycles");
    }
    out_.push_back(DebtCycle{path_, 0.0});
  }

  const std::vector<std::vector<std::size_t>>& adjacency_;
  std::vector<std::vector<std::size_t>> reverse_;
  std::optional<std::size_t> max_len_;
  std::size_t max_count_;
  std::vector<DebtCycle>& out_;
  std::size_t root_ = 0;
  std::vector<std::size_t> component_;
  std::vector<bool> blocked_;
  std::vector<std::vector<std::size_t>> block_list_;
  std::vector<std::size_t> path_;
};

}  // namespace

DebtCycle make_cycle(const CreditNetwork& network,
                     std::vector<std::size_t> firms) {
  if (firms.size() < 2)
    fail(Errc::invalid_plan, "a debt cycle needs at least two firms");
  std::set<std::size_t> distinct(firms.begin(), firms.end());
  if (distinct.size() != firms.size())
    fail(Errc::invalid_plan, "cycle " + cycle_text(firms) + " repeats a firm");
  for (const std::size_t v : firms)
    if (v >= network.size())
      fail(Errc::invalid_plan,
           "cycle " + cycle_text(firms) + " references firm " +
               std::to_string(v) + " outside the network");
  for (std::size_t k = 0; k < firms.size(); ++k) {
    const std::size_t from = firms[k];
    const std::size_t to = firms[(k + 1) % firms.size()];
    if (!(network.liability(from, to) > 0.0))
      fail(Errc::invalid_plan, "cycle " + cycle_text(firms) + " edge (" +
                                   std::to_string(from) + "," +
                                   std::to_string(to) + ") has no debt");
  }
  DebtCycle cycle{canonical_rotation(std::move(firms)), 0.0};
  cycle.min_liability = min_liability_on(network, cycle.firms);
  return cycle;
}

std::vector<DebtCycle> enumerate_simple_cycles(
    const CreditNetwork& network, std::optional<std::size_t> max_len,
    std::size_t max_count) {
  if (max_len && *max_len < 2)
    fail(Errc::invalid_spec, "cycle length cap below 2");
  const std::size_t n = network.size();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (network.liability(i, j) > 0.0) adjacency[i].push_back(j);

  std::vector<DebtCycle> cycles;
  CycleSearch(adjacency, max_len, max_count, cycles).run();
  for (auto& cycle : cycles)
    cycle.min_liability = min_liability_on(network, cycle.firms);
  std::sort(cycles.begin(), cycles.end(), enumeration_order);
  return cycles;
}

CompressionOutcome compress_cycles(const CreditNetwork& network,
                                   const std::vector<DebtCycle>& cycles,
                                   std::uint64_t seed) {
  for (const auto& cycle : cycles) {
    if (cycle.length() < 2)
      fail(Errc::stale_cycle, "cycle with fewer than two firms");
    for (std::size_t k = 0; k < cycle.length(); ++k) {
      const std::size_t from = cycle.firms[k];
      const std::size_t to = cycle.firms[(k + 1) % cycle.length()];
      if (from >= network.size() || to >= network.size())
        fail(Errc::stale_cycle, "cycle " + cycle_text(cycle.firms) +
                                    " references a firm outside the network");
      if (!(network.liability(from, to) > 0.0))
        fail(Errc::stale_cycle, "cycle " + cycle_text(cycle.firms) +
                                    " edge (" + std::to_string(from) + "," +
                                    std::to_string(to) +
                                    ") is absent from the network");
    }
  }

  // Most firms first; the seeded shuffle decides order among equal lengths.
  // The request order is canonicalized away first so the execution depends
  // only on the cycle set and the seed.
  std::vector<std::size_t> order(cycles.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (enumeration_order(cycles[a], cycles[b])) return true;
    if (enumeration_order(cycles[b], cycles[a])) return false;
    return a < b;
  });
  SplitMix64 rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return cycles[a].length() > cycles[b].length();
                   });

  SquareMatrix current = network.liabilities();
  CompressionReport report;
  report.seed = seed;
  for (const std::size_t idx : order) {
    const DebtCycle& cycle = cycles[idx];
    bool intact = true;
    double mu = 0.0;
    for (std::size_t k = 0; k < cycle.length(); ++k) {
      const std::size_t from = cycle.firms[k];
      const std::size_t to = cycle.firms[(k + 1) % cycle.length()];
      const double l = current(from, to);
      if (l <= 0.0) {
        intact = false;
        break;
      }
      mu = (k == 0) ? l : std::min(mu, l);
    }
    if (!intact) {
      report.applications.push_back({cycle, 0.0, true});
      continue;
    }
    for (std::size_t k = 0; k < cycle.length(); ++k) {
      const std::size_t from = cycle.firms[k];
      const std::size_t to = cycle.firms[(k + 1) % cycle.length()];
      current(from, to) -= mu;
    }
    DebtCycle applied = cycle;
    applied.min_liability = mu;
    report.applications.push_back({std::move(applied), mu, false});
  }
  return CompressionOutcome{network.with_liabilities(std::move(current)),
                            std::move(report)};
}

CreditNetwork remove_debts(const CreditNetwork& network,
                           const std::vector<DebtEdge>& edges) {
  std::set<DebtEdge> seen;
  for (const auto& edge : edges) {
    if (edge.borrower >= network.size() || edge.lender >= network.size())
      fail(Errc::no_such_debt, "edge (" + std::to_string(edge.borrower) + "," +
                                   std::to_string(edge.lender) +
                                   ") is outside the network");
    if (!seen.insert(edge).second)
      fail(Errc::duplicate_edge, "edge (" + std::to_string(edge.borrower) +
                                     "," + std::to_string(edge.lender) +
                                     ") listed twice");
    if (!(network.liability(edge.borrower, edge.lender) > 0.0))
      fail(Errc::no_such_debt, "edge (" + std::to_string(edge.borrower) + "," +
                                   std::to_string(edge.lender) +
                                   ") has no debt");
  }
  SquareMatrix current = network.liabilities();
  for (const auto& edge : edges) current(edge.borrower, edge.lender) = 0.0;
  return network.with_liabilities(std::move(current));
}

nlohmann::ordered_json cycles_to_json(const std::vector<DebtCycle>& cycles) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& cycle : cycles)
    doc.push_back({{"firms", cycle.firms},
                   {"min_liability", cycle.min_liability}});
  return doc;
}

nlohmann::ordered_json compression_report_to_json(
    const CompressionReport& report) {
  nlohmann::ordered_json doc;
  doc["seed"] = report.seed;
  auto items = nlohmann::ordered_json::array();
  for (const auto& app : report.applications) {
    items.push_back({{"firms", app.cycle.firms},
                     {"mu_applied", app.mu_applied},
                     {"skipped", app.skipped}});
  }
  doc["applications"] = std::move(items);
  return doc;
}

}  // namespace creditnet
