#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "creditnet/clearing.hpp"
#include "creditnet/operations.hpp"

namespace creditnet {

class LlmClient;

enum class OperationKind { compression, removal };
enum class PlanKind { none, compression, removal };
enum class Provenance { none, random, greedy, oracle, llm };

const char* operation_name(OperationKind kind);
const char* provenance_name(Provenance p);
OperationKind operation_from_name(const std::string& name);
Provenance provenance_from_name(const std::string& name);

// Which cycles to compress or which debts to remove. `seed` drives the
// execution order among equal-length cycles; comparisons share one seed so
// every strategy is scored under the same sequential semantics.
struct ExecutionPlan {
  PlanKind kind = PlanKind::none;
  std::vector<DebtCycle> cycles;
  std::vector<DebtEdge> edges;
  std::uint64_t seed = 0;
  Provenance provenance = Provenance::none;
  std::string rationale;

  std::size_t size() const;
  void validate() const;
};

struct ClearingDiagnostics {
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct ObjectiveReport {
  ExecutionPlan plan;
  double pre_total = 0.0;
  double post_total = 0.0;
  std::size_t pre_defaults = 0;
  std::size_t post_defaults = 0;
  ClearingDiagnostics pre_clearing;
  ClearingDiagnostics post_clearing;
  std::optional<CompressionReport> compression_report;
};

// Clears the original and the transformed network with the same config and
// reports both totals. Never mutates the input network.
ObjectiveReport evaluate_plan(const CreditNetwork& network,
                              const ExecutionPlan& plan,
                              const ClearingConfig& config = {});

ExecutionPlan plan_none(const CreditNetwork& network);

// Includes each candidate (cycle or positive edge) independently with
// probability 1/2 under selection_seed. order_seed, when given, becomes the
// plan's execution-order seed; it defaults to selection_seed.
ExecutionPlan plan_random(const CreditNetwork& network, OperationKind kind,
                          std::uint64_t selection_seed,
                          std::optional<std::uint64_t> order_seed = std::nullopt);

// Top cycles by weighted flow (mu times firm count), ties toward the longer
// cycle then the lexicographically smaller firm list.
ExecutionPlan plan_greedy_compression(const CreditNetwork& network,
                                      std::size_t top_k = 3,
                                      std::uint64_t order_seed = 0);

// Sweeps insolvent firms in increasing shortfall; for each, removes the
// minimum-total subset of its outgoing debts that covers the shortfall
// without exceeding (1 - alpha) * a_i, re-clearing after every commit.
ExecutionPlan plan_greedy_removal(const CreditNetwork& network,
                                  const ClearingConfig& config = {});

struct BruteForceCaps {
  std::size_t max_candidates = 20;
  // Rank-truncate the candidate list instead of failing when it is too
  // large. Truncation keeps every greedy pick so oracle >= greedy stays
  // exact; dominance over arbitrary subsets of the full list is then only
  // guaranteed for candidates that survived.
  bool truncate_on_overflow = false;
};

// Exhaustively evaluates every subset of candidates under the shared
// sequential semantics and returns a plan maximizing post-clearing total
// assets; ties go to fewer elements, then the lexicographically smaller
// candidate-index list.
ExecutionPlan plan_brute_force(const CreditNetwork& network,
                               OperationKind kind,
                               const ClearingConfig& config = {},
                               const BruteForceCaps& caps = {},
                               std::uint64_t order_seed = 0);

struct StrategyRow {
  Provenance strategy = Provenance::none;
  std::uint64_t seed = 0;
  double post_total = 0.0;
  std::size_t plan_size = 0;
  std::size_t defaults = 0;
  double runtime_seconds = 0.0;
};

struct ComparisonTable {
  OperationKind operation = OperationKind::compression;
  double pre_total = 0.0;
  std::size_t pre_defaults = 0;
  std::vector<StrategyRow> rows;  // random expands to one row per seed

  // Mean post_total over the rows of one strategy; NaN when absent.
  double mean_post_total(Provenance strategy) const;
};

struct StrategyOptions {
  OperationKind operation = OperationKind::compression;
  std::vector<Provenance> strategies{Provenance::none, Provenance::random,
                                     Provenance::greedy, Provenance::oracle};
  std::vector<std::uint64_t> random_seeds{1, 2, 3};
  std::uint64_t order_seed = 0;
  std::size_t greedy_top_k = 3;
  BruteForceCaps caps;
  LlmClient* llm = nullptr;  // required when strategies include llm
};

ComparisonTable compare_strategies(const CreditNetwork& network,
                                   const StrategyOptions& options,
                                   const ClearingConfig& config = {});

nlohmann::ordered_json plan_to_json(const ExecutionPlan& plan);
ExecutionPlan plan_from_json(const nlohmann::json& doc,
                             const CreditNetwork& network);
nlohmann::ordered_json objective_report_to_json(const ObjectiveReport& report);

}  // namespace creditnet
