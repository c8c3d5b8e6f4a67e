#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "creditnet/network.hpp"

namespace creditnet {

// Simple directed cycle over positive liabilities, stored in canonical
// rotation (smallest firm index first). min_liability is mu at the time the
// cycle was built; compression recomputes it at application time.
struct DebtCycle {
  std::vector<std::size_t> firms;
  double min_liability = 0.0;

  std::size_t length() const { return firms.size(); }
  bool operator==(const DebtCycle& other) const {
    return firms == other.firms;
  }
};

struct DebtEdge {
  std::size_t borrower = 0;
  std::size_t lender = 0;
  auto operator<=>(const DebtEdge&) const = default;
};

// Validates firms as a simple directed cycle of `network`, canonicalizes the
// rotation and computes mu. Throws InvalidPlan on anything else.
DebtCycle make_cycle(const CreditNetwork& network,
                     std::vector<std::size_t> firms);

// All simple directed cycles over edges with positive liability, each in
// canonical rotation, ordered by length descending then lexicographic firm
// list. max_len bounds cycle length; enumeration aborts with
// CycleLimitExceeded once more than max_count cycles appear.
std::vector<DebtCycle> enumerate_simple_cycles(
    const CreditNetwork& network,
    std::optional<std::size_t> max_len = std::nullopt,
    std::size_t max_count = 1000000);

struct CycleApplication {
  DebtCycle cycle;
  double mu_applied = 0.0;
  bool skipped = false;  // an on-cycle edge was zeroed by an earlier cycle
};

struct CompressionReport {
  std::uint64_t seed = 0;  // decided the order among equal-length cycles
  std::vector<CycleApplication> applications;  // in execution order
};

struct CompressionOutcome {
  CreditNetwork network;
  CompressionReport report;
};

// Applies the cycles most-firms-first (equal lengths ordered by a seeded
// shuffle), recomputing mu on the current matrix before each subtraction.
// Cycles that lost an edge mid-sequence are skipped and reported. Cycles
// with an edge already absent from the input network raise StaleCycle.
CompressionOutcome compress_cycles(const CreditNetwork& network,
                                   const std::vector<DebtCycle>& cycles,
                                   std::uint64_t seed);

// Copy of the network with each listed liability set to zero. Rejects edges
// with no debt (NoSuchDebt) and repeated edges (DuplicateEdge).
CreditNetwork remove_debts(const CreditNetwork& network,
                           const std::vector<DebtEdge>& edges);

nlohmann::ordered_json cycles_to_json(const std::vector<DebtCycle>& cycles);
nlohmann::ordered_json compression_report_to_json(
    const CompressionReport& report);

}  // namespace creditnet
