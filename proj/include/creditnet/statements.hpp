#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "creditnet/llm_client.hpp"
#include "creditnet/network.hpp"
#include "creditnet/strategies.hpp"

namespace creditnet {

struct LiabilityClaim {
  std::string borrower;
  std::string lender;
  double amount = 0.0;

  bool operator==(const LiabilityClaim&) const = default;
};

// One firm's structured statement content. The reporting firm must appear on
// one side of every claim; a (borrower, lender) pair may appear only once.
struct ExtractionRecord {
  std::string firm;
  double external_assets = 0.0;
  std::vector<LiabilityClaim> liabilities;

  void validate() const;  // InvariantViolation
  bool operator==(const ExtractionRecord&) const = default;
};

// Parses the record grammar
//   firm = "<name>"
//   external_assets = <number>
//   liabilities = [(<name>, <name>, <number>), ...]
// with free whitespace, fixed statement order and an optional surrounding
// fenced code block. MalformedRecord errors carry line:column.
ExtractionRecord parse_extraction_record(std::string_view text);

// Canonical inverse of the parser: parse(render(r)) == r.
std::string render_extraction_record(const ExtractionRecord& record);

inline constexpr std::size_t kStatementTemplateCount = 3;

// Deterministic natural-language statement for a record. Every claim's
// counterparty and amount appears exactly once; template 1 presents assets
// gross of an encumbered portion so the usable figure must be derived.
std::string render_statement(const ExtractionRecord& record,
                             std::size_t template_id, std::uint64_t seed);

enum class AnomalyKind {
  amount_conflict,
  duplicate_reporter,
  negative_amount,
  self_loop,
  malformed_record,
};

const char* anomaly_kind_name(AnomalyKind kind);

struct Anomaly {
  AnomalyKind kind = AnomalyKind::malformed_record;
  std::size_t record_id = 0;
  std::optional<std::size_t> prior_record_id;
  std::string borrower;
  std::string lender;
  double first_amount = 0.0;
  double second_amount = 0.0;
  double difference = 0.0;
  std::string message;
};

// Rolling aggregate over integrated records. Names are keyed by normalized
// form; first-seen display casing wins.
class AggregationState {
 public:
  struct Claim {
    double amount = 0.0;
    std::size_t record_id = 0;
  };

  // Detects anomalies of `record` against the current state. On anomaly the
  // state is unchanged except for the appended anomaly and false returns;
  // per the integration procedure the caller must then stop merging.
  bool integrate(const ExtractionRecord& record, double tolerance);

  // Anomaly scan of `record` without merging; used by the diagnostic mode.
  void scan_only(const ExtractionRecord& record, double tolerance);

  std::size_t records_seen() const { return records_seen_; }
  const std::vector<Anomaly>& anomalies() const { return anomalies_; }
  const std::map<std::pair<std::string, std::string>, Claim>& known_edges()
      const {
    return known_edges_;
  }
  const std::map<std::string, Claim>& known_assets() const {
    return known_assets_;
  }
  // Firms never seen as reporters, by display name.
  std::set<std::string> counterparty_only() const;
  const std::vector<std::string>& display_names() const {
    return display_names_;
  }
  std::size_t firm_count() const { return display_names_.size(); }

  // Weakly connected components of the aggregate, firm order by first
  // mention. Counterparty-only firms carry zero external assets.
  std::vector<CreditNetwork> materialize() const;

 private:
  std::size_t intern(const std::string& name);
  std::optional<Anomaly> detect(const ExtractionRecord& record,
                                double tolerance) const;

  std::size_t records_seen_ = 0;
  std::vector<std::string> display_names_;           // first-mention order
  std::map<std::string, std::size_t> name_index_;    // normalized -> index
  std::map<std::pair<std::string, std::string>, Claim> known_edges_;
  std::map<std::string, Claim> known_assets_;        // reporters only
  std::set<std::string> reporters_;                  // normalized
  std::vector<Anomaly> anomalies_;
};

bool integrate_record(AggregationState& state, const ExtractionRecord& record,
                      double tolerance);

enum class AggregationMode { halt_on_anomaly, collect_all };

struct AggregationResult {
  std::vector<CreditNetwork> components;
  std::set<std::string> assets_unknown;  // counterparty-only display names
  std::vector<Anomaly> anomalies;
  std::optional<std::size_t> halted_at;  // index of the offending record
};

// Folds integrate_record over the records in order. The default mode halts
// merging at the first anomaly; collect_all keeps scanning later records
// against the frozen state without merging them.
AggregationResult aggregate_statements(
    const std::vector<ExtractionRecord>& records, double tolerance = 1e-6,
    AggregationMode mode = AggregationMode::halt_on_anomaly);

// Translation prompt: credit-network introduction with the worked 4-firm
// example, then the extraction instructions with the statement substituted.
std::string build_translation_prompt(const std::string& statement);

// Execution prompt with its five labeled components in order: network
// instance, operation description, clearing routine source, objective, task.
std::string build_execution_prompt(const CreditNetwork& network,
                                   OperationKind kind,
                                   const std::string& clearing_source,
                                   const std::string& objective,
                                   const std::string& task);

std::string default_clearing_source();
std::string default_objective_text();
std::string default_task_text(OperationKind kind);

// Single prompting: one request, reply parsed as a record. Transport-level
// retries stay inside the client.
ExtractionRecord llm_translate(LlmClient& client, const std::string& statement);

// Requests an execution suggestion, parses the reply's plan block and
// validates every referenced cycle and edge against the network.
ExecutionPlan llm_suggest(LlmClient& client, const CreditNetwork& network,
                          OperationKind kind,
                          const ClearingConfig& config = {},
                          std::uint64_t order_seed = 0);

// Extracts the last fenced block holding `cycles = [[...], ...]` or
// `remove = [(i, j), ...]`; surrounding prose becomes the rationale. The
// whole reply is treated as one block when no fence is present.
ExecutionPlan parse_plan_reply(std::string_view text, OperationKind kind);

std::string render_plan_reply(const ExecutionPlan& plan);

// Deterministic mock that answers any prompt with the named strategy's plan
// for a fixed network, rendered as a plan reply.
class PlanMockClient : public LlmClient {
 public:
  PlanMockClient(CreditNetwork network, OperationKind kind,
                 Provenance strategy, ClearingConfig config = {},
                 BruteForceCaps caps = {}, std::uint64_t order_seed = 0);
  std::string complete(const std::string& prompt) override;

 private:
  CreditNetwork network_;
  OperationKind kind_;
  Provenance strategy_;
  ClearingConfig config_;
  BruteForceCaps caps_;
  std::uint64_t order_seed_;
};

// One record per firm with both sides of every edge reported, so that clean
// corpora corroborate and perturbed ones conflict.
std::vector<ExtractionRecord> records_from_network(
    const CreditNetwork& network);

struct InjectionInfo {
  std::size_t record_index = 0;  // record whose claim was perturbed
  std::string borrower;
  std::string lender;
  double original = 0.0;
  double perturbed = 0.0;
};

// Perturbs one claim of one record by delta, choosing (by seed) an edge that
// an earlier record already reports so integration is guaranteed to halt at
// record_index. Requires at least one dual-reported edge.
InjectionInfo inject_amount_conflict(std::vector<ExtractionRecord>& records,
                                     std::uint64_t seed, double delta = 1.0);

// Script for MockLlmClient: entry k expects statement k's key substring and
// replies with record k's canonical text.
std::vector<MockScriptEntry> make_translation_script(
    const std::vector<std::string>& expect_substrings,
    const std::vector<ExtractionRecord>& records);

}  // namespace creditnet
