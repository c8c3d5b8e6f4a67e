#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "creditnet/generators.hpp"
#include "creditnet/statements.hpp"
#include "creditnet/strategies.hpp"

namespace creditnet {

inline constexpr const char* kToolVersion = "0.1.0";

enum class LlmMode { none, delegate_greedy, delegate_oracle, script, http };

const char* llm_mode_name(LlmMode mode);
LlmMode llm_mode_from_name(const std::string& name);

// Everything that identifies an experiment. Output paths and job counts are
// execution details passed separately, so reruns of one spec are
// byte-identical regardless of where and how wide they run.
struct ExperimentSpec {
  std::uint64_t seed = 0;
  OperationKind operation = OperationKind::compression;
  std::vector<TopologySpec> topologies;  // per-instance seeds are derived
  std::size_t instances_per_topology = 10;
  std::vector<Provenance> strategies{Provenance::none, Provenance::random,
                                     Provenance::greedy, Provenance::oracle};
  std::vector<std::uint64_t> random_seeds{1, 2, 3};
  ClearingConfig clearing;
  std::size_t greedy_top_k = 3;
  BruteForceCaps caps{14, true};
  LlmMode llm_mode = LlmMode::none;
  std::string llm_script_path;

  static ExperimentSpec defaults();
  void validate() const;
};

nlohmann::ordered_json experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& doc);

struct InstanceResult {
  std::string instance;  // e.g. ER3
  TopologySpec topology;
  std::uint64_t instance_seed = 0;
  std::uint64_t order_seed = 0;
  ComparisonTable table;
};

struct ExperimentReport {
  std::vector<InstanceResult> instances;
  std::string results_csv_path;
  std::string aggregate_csv_path;
  std::string tables_path;
  std::string manifest_path;
};

// Generates every instance, compares the configured strategies and writes
// results.csv, aggregate.csv, tables.txt and manifest.json under output_dir.
// Instance evaluation parallelizes over `jobs` workers; outputs are
// assembled in instance order so the files do not depend on the job count.
ExperimentReport run_experiment(const ExperimentSpec& spec,
                                const std::string& output_dir,
                                std::size_t jobs = 1);

// Reads either a spec document or a manifest written by run_experiment.
ExperimentSpec load_experiment_spec(const std::string& path);

std::string results_csv(const std::vector<InstanceResult>& instances);
std::string aggregate_csv(const std::vector<InstanceResult>& instances,
                          OperationKind operation);
std::string pretty_tables(const std::vector<InstanceResult>& instances,
                          OperationKind operation);

// ---------------------------------------------------------------------------
// Statement corpora

struct CorpusReport {
  std::vector<std::string> statement_files;
  std::vector<std::string> record_files;
  std::optional<InjectionInfo> injection;
};

// Writes firm_###.statement.txt / firm_###.record.txt per firm plus
// truth.network.json, mock_script.json and corpus_manifest.json. With
// inject=true one claim is perturbed (statement and record stay mutually
// consistent) and injection.json records where.
CorpusReport write_statement_corpus(const CreditNetwork& network,
                                    const std::string& output_dir,
                                    std::uint64_t seed, bool inject = false,
                                    double inject_delta = 1.0);

enum class TranslationMode { records, mock_script, http };

struct TranslationSpec {
  std::string corpus_dir;
  std::string output_dir;
  TranslationMode mode = TranslationMode::records;
  std::string script_path;  // defaults to corpus_dir/mock_script.json
  std::string truth_path;   // defaults to corpus_dir/truth.network.json
  double tolerance = 1e-6;
};

struct TranslationReport {
  AggregationResult aggregation;
  std::size_t record_count = 0;
  // "success", "mismatch", or "anomaly detected at index k".
  std::string verdict;
  bool matches_truth = false;
  bool truth_available = false;
};

// Translates (or directly parses) the corpus, aggregates it and writes the
// component networks, the anomaly log and report.json under output_dir.
TranslationReport run_translation(const TranslationSpec& spec);

}  // namespace creditnet
