#include "creditnet/strategies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "creditnet/rng.hpp"
#include "creditnet/statements.hpp"

namespace creditnet {

const char* operation_name(OperationKind kind) {
  return kind == OperationKind::compression ? "compression" : "removal";
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::none: return "none";
    case Provenance::random: return "random";
    case Provenance::greedy: return "greedy";
    case Provenance::oracle: return "oracle";
    case Provenance::llm: return "llm";
  }
  return "none";
}

OperationKind operation_from_name(const std::string& name) {
  if (name == "compression") return OperationKind::compression;
  if (name == "removal") return OperationKind::removal;
  fail(Errc::invalid_spec, "unknown operation \"" + name + "\"");
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "none") return Provenance::none;
  if (name == "random") return Provenance::random;
  if (name == "greedy") return Provenance::greedy;
  if (name == "oracle") return Provenance::oracle;
  if (name == "llm") return Provenance::llm;
  fail(Errc::invalid_spec, "unknown strategy \"" + name + "\"");
}

std::size_t ExecutionPlan::size() const {
  return kind == PlanKind::compression ? cycles.size() : edges.size();
}

void ExecutionPlan::validate() const {
  switch (kind) {
    case PlanKind::none:
      if (!cycles.empty() || !edges.empty())
        fail(Errc::invalid_plan, "empty plan carries cycles or edges");
      return;
    case PlanKind::compression:
      if (!edges.empty())
        fail(Errc::invalid_plan, "compression plan carries removal edges");
      return;
    case PlanKind::removal:
      if (!cycles.empty())
        fail(Errc::invalid_plan, "removal plan carries cycles");
      return;
  }
}

namespace {

ClearingDiagnostics diagnostics_of(const ClearingResult& result) {
  return ClearingDiagnostics{result.iterations, result.residual,
                             result.converged};
}

PlanKind plan_kind_of(OperationKind kind) {
  return kind == OperationKind::compression ? PlanKind::compression
                                            : PlanKind::removal;
}

}  // namespace

ObjectiveReport evaluate_plan(const CreditNetwork& network,
                              const ExecutionPlan& plan,
                              const ClearingConfig& config) {
  plan.validate();
  ObjectiveReport report;
  report.plan = plan;

  const ClearingResult pre = clear(network, config);
  report.pre_total = pre.total_assets();
  report.pre_defaults = pre.default_set.size();
  report.pre_clearing = diagnostics_of(pre);

  if (plan.kind == PlanKind::none) {
    report.post_total = report.pre_total;
    report.post_defaults = report.pre_defaults;
    report.post_clearing = report.pre_clearing;
    return report;
  }

  ClearingResult post = [&] {
    if (plan.kind == PlanKind::compression) {
      auto outcome = compress_cycles(network, plan.cycles, plan.seed);
      report.compression_report = std::move(outcome.report);
      return clear(outcome.network, config);
    }
    return clear(remove_debts(network, plan.edges), config);
  }();
  report.post_total = post.total_assets();
  report.post_defaults = post.default_set.size();
  report.post_clearing = diagnostics_of(post);
  return report;
}

ExecutionPlan plan_none(const CreditNetwork&) {
  ExecutionPlan plan;
  plan.kind = PlanKind::none;
  plan.provenance = Provenance::none;
  return plan;
}

namespace {

std::vector<DebtEdge> positive_edges(const CreditNetwork& network) {
  std::vector<DebtEdge> edges;
  for (std::size_t i = 0; i < network.size(); ++i)
    for (std::size_t j = 0; j < network.size(); ++j)
      if (network.liability(i, j) > 0.0) edges.push_back({i, j});
  return edges;
}

}  // namespace

ExecutionPlan plan_random(const CreditNetwork& network, OperationKind kind,
                          std::uint64_t selection_seed,
                          std::optional<std::uint64_t> order_seed) {
  ExecutionPlan plan;
  plan.kind = plan_kind_of(kind);
  plan.provenance = Provenance::random;
  plan.seed = order_seed.value_or(selection_seed);
  plan.rationale =
      "independent 1/2 inclusion, selection seed " +
      std::to_string(selection_seed);
  SplitMix64 rng(selection_seed);
  if (kind == OperationKind::compression) {
    for (const auto& cycle : enumerate_simple_cycles(network))
      if (rng.next_bool()) plan.cycles.push_back(cycle);
  } else {
    for (const auto& edge : positive_edges(network))
      if (rng.next_bool()) plan.edges.push_back(edge);
  }
  return plan;
}

ExecutionPlan plan_greedy_compression(const CreditNetwork& network,
                                      std::size_t top_k,
                                      std::uint64_t order_seed) {
  auto cycles = enumerate_simple_cycles(network);
  const auto weighted_flow = [](const DebtCycle& c) {
    return c.min_liability * static_cast<double>(c.length());
  };
  std::sort(cycles.begin(), cycles.end(),
            [&](const DebtCycle& a, const DebtCycle& b) {
              const double wa = weighted_flow(a), wb = weighted_flow(b);
              if (wa != wb) return wa > wb;
              if (a.length() != b.length()) return a.length() > b.length();
              return a.firms < b.firms;
            });
  if (cycles.size() > top_k) cycles.resize(top_k);

  ExecutionPlan plan;
  plan.kind = PlanKind::compression;
  plan.provenance = Provenance::greedy;
  plan.seed = order_seed;
  plan.cycles = std::move(cycles);
  plan.rationale = "top " + std::to_string(top_k) + " cycles by weighted flow";
  return plan;
}

ExecutionPlan plan_greedy_removal(const CreditNetwork& network,
                                  const ClearingConfig& config) {
  constexpr std::size_t kMaxOutDegree = 22;

  ExecutionPlan plan;
  plan.kind = PlanKind::removal;
  plan.provenance = Provenance::greedy;
  plan.rationale = "minimum-total solvency-restoring removals";

  CreditNetwork current = network;
  std::set<std::size_t> handled;
  for (;;) {
    const ClearingResult state = clear(current, config);
    // Insolvent firms not yet considered, smallest shortfall first.
    std::optional<std::size_t> target;
    double target_shortfall = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (state.metrics[i].solvent || handled.count(i)) continue;
      const double shortfall =
          state.metrics[i].total_liability - state.metrics[i].total_assets;
      if (!target || shortfall < target_shortfall) {
        target = i;
        target_shortfall = shortfall;
      }
    }
    if (!target) break;
    handled.insert(*target);

    std::vector<DebtEdge> outgoing;
    for (std::size_t j = 0; j < current.size(); ++j)
      if (current.liability(*target, j) > 0.0) outgoing.push_back({*target, j});
    if (outgoing.size() > kMaxOutDegree)
      fail(Errc::search_space_too_large,
           "firm " + std::to_string(*target) + " has " +
               std::to_string(outgoing.size()) + " outgoing debts");

    // Removal must cover the shortfall but not exceed the assets freed when
    // the default haircut stops applying; both bounds are inclusive.
    const double budget =
        (1.0 - config.alpha) * state.metrics[*target].total_assets;
    std::vector<DebtEdge> best;
    double best_total = std::numeric_limits<double>::infinity();
    const std::size_t d = outgoing.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
      double total = 0.0;
      for (std::size_t b = 0; b < d; ++b)
        if (mask & (std::size_t{1} << b))
          total += current.liability(outgoing[b].borrower, outgoing[b].lender);
      if (total < target_shortfall - kAmountTolerance) continue;
      if (total > budget + kAmountTolerance) continue;
      std::vector<DebtEdge> subset;
      for (std::size_t b = 0; b < d; ++b)
        if (mask & (std::size_t{1} << b)) subset.push_back(outgoing[b]);
      const bool better =
          total < best_total - kAmountTolerance ||
          (std::fabs(total - best_total) <= kAmountTolerance &&
           (subset.size() < best.size() ||
            (subset.size() == best.size() && subset < best)));
      if (better) {
        best_total = total;
        best = std::move(subset);
      }
    }
    if (best.empty()) continue;  // no qualifying subset, firm is skipped
    current = remove_debts(current, best);
    plan.edges.insert(plan.edges.end(), best.begin(), best.end());
  }
  std::sort(plan.edges.begin(), plan.edges.end());
  return plan;
}

namespace {

struct SubsetScore {
  double total = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> indices;

  bool better_than(const SubsetScore& other) const {
    if (total != other.total) return total > other.total;
    if (indices.size() != other.indices.size())
      return indices.size() < other.indices.size();
    return indices < other.indices;
  }
};

std::vector<DebtCycle> truncate_cycle_candidates(std::vector<DebtCycle> cycles,
                                                 std::size_t cap) {
  // Same ranking greedy uses, so every greedy pick survives.
  std::sort(cycles.begin(), cycles.end(),
            [](const DebtCycle& a, const DebtCycle& b) {
              const double wa = a.min_liability * static_cast<double>(a.length());
              const double wb = b.min_liability * static_cast<double>(b.length());
              if (wa != wb) return wa > wb;
              if (a.length() != b.length()) return a.length() > b.length();
              return a.firms < b.firms;
            });
  cycles.resize(cap);
  std::sort(cycles.begin(), cycles.end(),
            [](const DebtCycle& a, const DebtCycle& b) {
              if (a.length() != b.length()) return a.length() > b.length();
              return a.firms < b.firms;
            });
  return cycles;
}

std::vector<DebtEdge> truncate_edge_candidates(const CreditNetwork& network,
                                               std::vector<DebtEdge> edges,
                                               std::size_t cap,
                                               const ClearingConfig& config) {
  // Keep the greedy plan's edges, then edges of insolvent borrowers by
  // ascending amount; removing a solvent firm's debt only destroys flow.
  std::set<DebtEdge> keep;
  try {
    for (const auto& edge : plan_greedy_removal(network, config).edges)
      keep.insert(edge);
  } catch (const Error&) {
    // greedy itself out of bounds; fall back to the ranking alone
  }
  const ClearingResult state = clear(network, config);
  std::vector<DebtEdge> ranked = edges;
  std::sort(ranked.begin(), ranked.end(),
            [&](const DebtEdge& a, const DebtEdge& b) {
              const bool ka = keep.count(a) > 0, kb = keep.count(b) > 0;
              if (ka != kb) return ka;
              const bool da = !state.metrics[a.borrower].solvent;
              const bool db = !state.metrics[b.borrower].solvent;
              if (da != db) return da;
              const double la = network.liability(a.borrower, a.lender);
              const double lb = network.liability(b.borrower, b.lender);
              if (la != lb) return la < lb;
              return a < b;
            });
  ranked.resize(cap);
  std::sort(ranked.begin(), ranked.end());
  return ranked;
}

}  // namespace

ExecutionPlan plan_brute_force(const CreditNetwork& network,
                               OperationKind kind,
                               const ClearingConfig& config,
                               const BruteForceCaps& caps,
                               std::uint64_t order_seed) {
  if (caps.max_candidates == 0 || caps.max_candidates > 24)
    fail(Errc::invalid_config, "oracle candidate cap must lie in [1, 24]");

  std::vector<DebtCycle> cycles;
  std::vector<DebtEdge> edges;
  std::size_t count = 0;
  if (kind == OperationKind::compression) {
    cycles = enumerate_simple_cycles(network);
    if (cycles.size() > caps.max_candidates) {
      if (!caps.truncate_on_overflow)
        fail(Errc::search_space_too_large,
             std::to_string(cycles.size()) + " cycle candidates exceed cap " +
                 std::to_string(caps.max_candidates));
      cycles = truncate_cycle_candidates(std::move(cycles),
                                         caps.max_candidates);
    }
    count = cycles.size();
  } else {
    edges = positive_edges(network);
    if (edges.size() > caps.max_candidates) {
      if (!caps.truncate_on_overflow)
        fail(Errc::search_space_too_large,
             std::to_string(edges.size()) + " edge candidates exceed cap " +
                 std::to_string(caps.max_candidates));
      edges = truncate_edge_candidates(network, std::move(edges),
                                       caps.max_candidates, config);
    }
    count = edges.size();
  }

  SubsetScore best;
  for (std::size_t mask = 0; mask < (std::size_t{1} << count); ++mask) {
    SubsetScore candidate;
    for (std::size_t b = 0; b < count; ++b)
      if (mask & (std::size_t{1} << b)) candidate.indices.push_back(b);

    double total = 0.0;
    if (kind == OperationKind::compression) {
      std::vector<DebtCycle> subset;
      subset.reserve(candidate.indices.size());
      for (const std::size_t b : candidate.indices) subset.push_back(cycles[b]);
      const auto outcome = compress_cycles(network, subset, order_seed);
      total = clear(outcome.network, config).total_assets();
    } else {
      std::vector<DebtEdge> subset;
      subset.reserve(candidate.indices.size());
      for (const std::size_t b : candidate.indices) subset.push_back(edges[b]);
      total = clear(remove_debts(network, subset), config).total_assets();
    }
    candidate.total = total;
    if (candidate.better_than(best)) best = std::move(candidate);
  }

  ExecutionPlan plan;
  plan.kind = plan_kind_of(kind);
  plan.provenance = Provenance::oracle;
  plan.seed = order_seed;
  plan.rationale = "exhaustive search over " + std::to_string(count) +
                   " candidates";
  for (const std::size_t b : best.indices) {
    if (kind == OperationKind::compression)
      plan.cycles.push_back(cycles[b]);
    else
      plan.edges.push_back(edges[b]);
  }
  return plan;
}

double ComparisonTable::mean_post_total(Provenance strategy) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : rows)
    if (row.strategy == strategy) {
      sum += row.post_total;
      ++n;
    }
  return n ? sum / static_cast<double>(n)
           : std::numeric_limits<double>::quiet_NaN();
}

ComparisonTable compare_strategies(const CreditNetwork& network,
                                   const StrategyOptions& options,
                                   const ClearingConfig& config) {
  ComparisonTable table;
  table.operation = options.operation;
  const ClearingResult pre = clear(network, config);
  table.pre_total = pre.total_assets();
  table.pre_defaults = pre.default_set.size();

  const auto run = [&](const ExecutionPlan& plan, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const ObjectiveReport report = evaluate_plan(network, plan, config);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    table.rows.push_back(StrategyRow{plan.provenance, seed, report.post_total,
                                     plan.size(), report.post_defaults,
                                     elapsed.count()});
  };

  for (const Provenance strategy : options.strategies) {
    switch (strategy) {
      case Provenance::none:
        run(plan_none(network), options.order_seed);
        break;
      case Provenance::random:
        for (const std::uint64_t seed : options.random_seeds)
          run(plan_random(network, options.operation, seed,
                          options.order_seed),
              seed);
        break;
      case Provenance::greedy:
        run(options.operation == OperationKind::compression
                ? plan_greedy_compression(network, options.greedy_top_k,
                                          options.order_seed)
                : plan_greedy_removal(network, config),
            options.order_seed);
        break;
      case Provenance::oracle:
        run(plan_brute_force(network, options.operation, config, options.caps,
                             options.order_seed),
            options.order_seed);
        break;
      case Provenance::llm: {
        if (options.llm == nullptr)
          fail(Errc::invalid_config, "llm strategy requested without a client");
        run(llm_suggest(*options.llm, network, options.operation, config,
                        options.order_seed),
            options.order_seed);
        break;
      }
    }
  }
  return table;
}

nlohmann::ordered_json plan_to_json(const ExecutionPlan& plan) {
  nlohmann::ordered_json doc;
  doc["kind"] = plan.kind == PlanKind::none
                    ? "none"
                    : (plan.kind == PlanKind::compression ? "compression"
                                                          : "removal");
  auto cycles = nlohmann::ordered_json::array();
  for (const auto& cycle : plan.cycles) cycles.push_back(cycle.firms);
  doc["cycles"] = std::move(cycles);
  auto edges = nlohmann::ordered_json::array();
  for (const auto& edge : plan.edges)
    edges.push_back({edge.borrower, edge.lender});
  doc["edges"] = std::move(edges);
  doc["seed"] = plan.seed;
  doc["provenance"] = provenance_name(plan.provenance);
  doc["rationale"] = plan.rationale;
  return doc;
}

ExecutionPlan plan_from_json(const nlohmann::json& doc,
                             const CreditNetwork& network) {
  if (!doc.is_object()) fail(Errc::schema_error, "plan must be an object");
  ExecutionPlan plan;
  const std::string kind = doc.value("kind", "none");
  if (kind == "none")
    plan.kind = PlanKind::none;
  else if (kind == "compression")
    plan.kind = PlanKind::compression;
  else if (kind == "removal")
    plan.kind = PlanKind::removal;
  else
    fail(Errc::schema_error, "unknown plan kind \"" + kind + "\"");
  if (doc.contains("cycles"))
    for (const auto& firms : doc.at("cycles"))
      plan.cycles.push_back(
          make_cycle(network, firms.get<std::vector<std::size_t>>()));
  if (doc.contains("edges")) {
    for (const auto& pair : doc.at("edges")) {
      const auto indices = pair.get<std::vector<std::size_t>>();
      if (indices.size() != 2)
        fail(Errc::schema_error, "plan edges must be [borrower, lender] pairs");
      plan.edges.push_back({indices[0], indices[1]});
    }
  }
  plan.seed = doc.value("seed", std::uint64_t{0});
  plan.provenance = provenance_from_name(doc.value("provenance", "none"));
  plan.rationale = doc.value("rationale", "");
  plan.validate();
  return plan;
}

nlohmann::ordered_json objective_report_to_json(const ObjectiveReport& report) {
  nlohmann::ordered_json doc;
  doc["plan"] = plan_to_json(report.plan);
  doc["pre_total"] = report.pre_total;
  doc["post_total"] = report.post_total;
  doc["pre_defaults"] = report.pre_defaults;
  doc["post_defaults"] = report.post_defaults;
  doc["pre_clearing"] = {{"iterations", report.pre_clearing.iterations},
                         {"residual", report.pre_clearing.residual},
                         {"converged", report.pre_clearing.converged}};
  doc["post_clearing"] = {{"iterations", report.post_clearing.iterations},
                          {"residual", report.post_clearing.residual},
                          {"converged", report.post_clearing.converged}};
  if (report.compression_report)
    doc["compression_report"] =
        compression_report_to_json(*report.compression_report);
  return doc;
}

}  // namespace creditnet
