#include "creditnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "creditnet/rng.hpp"

namespace fs = std::filesystem;

namespace creditnet {

const char* llm_mode_name(LlmMode mode) {
  switch (mode) {
    case LlmMode::none: return "none";
    case LlmMode::delegate_greedy: return "delegate-greedy";
    case LlmMode::delegate_oracle: return "delegate-oracle";
    case LlmMode::script: return "script";
    case LlmMode::http: return "http";
  }
  return "none";
}

LlmMode llm_mode_from_name(const std::string& name) {
  if (name == "none") return LlmMode::none;
  if (name == "delegate-greedy") return LlmMode::delegate_greedy;
  if (name == "delegate-oracle") return LlmMode::delegate_oracle;
  if (name == "script") return LlmMode::script;
  if (name == "http") return LlmMode::http;
  fail(Errc::invalid_spec, "unknown llm mode \"" + name + "\"");
}

ExperimentSpec ExperimentSpec::defaults() {
  ExperimentSpec spec;
  TopologySpec er;
  er.kind = TopologyKind::erdos_renyi;
  TopologySpec cp;
  cp.kind = TopologyKind::core_periphery;
  TopologySpec ib;
  ib.kind = TopologyKind::isolated_blocks;
  TopologySpec scc;
  scc.kind = TopologyKind::dag_sccs;
  spec.topologies = {er, cp, ib, scc};
  return spec;
}

void ExperimentSpec::validate() const {
  if (topologies.empty()) fail(Errc::invalid_spec, "no topologies configured");
  for (const auto& topology : topologies) topology.validate();
  if (instances_per_topology == 0)
    fail(Errc::invalid_spec, "need at least one instance per topology");
  if (strategies.empty()) fail(Errc::invalid_spec, "no strategies configured");
  clearing.validate();
  const bool wants_llm =
      std::find(strategies.begin(), strategies.end(), Provenance::llm) !=
      strategies.end();
  if (wants_llm && llm_mode == LlmMode::none)
    fail(Errc::invalid_spec, "llm strategy requested but llm mode is none");
  if (llm_mode == LlmMode::script && llm_script_path.empty())
    fail(Errc::invalid_spec, "llm script mode needs a script path");
}

nlohmann::ordered_json experiment_spec_to_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json doc;
  doc["seed"] = spec.seed;
  doc["operation"] = operation_name(spec.operation);
  auto topologies = nlohmann::ordered_json::array();
  for (const auto& topology : spec.topologies)
    topologies.push_back(topology_spec_to_json(topology));
  doc["topologies"] = std::move(topologies);
  doc["instances_per_topology"] = spec.instances_per_topology;
  auto strategies = nlohmann::ordered_json::array();
  for (const Provenance s : spec.strategies)
    strategies.push_back(provenance_name(s));
  doc["strategies"] = std::move(strategies);
  doc["random_seeds"] = spec.random_seeds;
  doc["clearing"] = {{"alpha", spec.clearing.alpha},
                     {"convergence_tolerance", spec.clearing.convergence_tolerance},
                     {"max_iterations", spec.clearing.max_iterations},
                     {"solvency_tolerance", spec.clearing.solvency_tolerance}};
  doc["greedy_top_k"] = spec.greedy_top_k;
  doc["oracle_caps"] = {{"max_candidates", spec.caps.max_candidates},
                        {"truncate_on_overflow", spec.caps.truncate_on_overflow}};
  doc["llm"] = {{"mode", llm_mode_name(spec.llm_mode)},
                {"script_path", spec.llm_script_path}};
  return doc;
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    fail(Errc::schema_error, "experiment spec must be an object");
  ExperimentSpec spec;
  spec.topologies.clear();
  spec.seed = doc.value("seed", spec.seed);
  spec.operation = operation_from_name(doc.value("operation", "compression"));
  if (doc.contains("topologies"))
    for (const auto& item : doc.at("topologies"))
      spec.topologies.push_back(topology_spec_from_json(item));
  else
    spec.topologies = ExperimentSpec::defaults().topologies;
  spec.instances_per_topology =
      doc.value("instances_per_topology", spec.instances_per_topology);
  if (doc.contains("strategies")) {
    spec.strategies.clear();
    for (const auto& item : doc.at("strategies"))
      spec.strategies.push_back(
          provenance_from_name(item.get<std::string>()));
  }
  if (doc.contains("random_seeds"))
    spec.random_seeds =
        doc.at("random_seeds").get<std::vector<std::uint64_t>>();
  if (doc.contains("clearing")) {
    const auto& c = doc.at("clearing");
    spec.clearing.alpha = c.value("alpha", spec.clearing.alpha);
    spec.clearing.convergence_tolerance =
        c.value("convergence_tolerance", spec.clearing.convergence_tolerance);
    spec.clearing.max_iterations =
        c.value("max_iterations", spec.clearing.max_iterations);
    spec.clearing.solvency_tolerance =
        c.value("solvency_tolerance", spec.clearing.solvency_tolerance);
  }
  spec.greedy_top_k = doc.value("greedy_top_k", spec.greedy_top_k);
  if (doc.contains("oracle_caps")) {
    const auto& c = doc.at("oracle_caps");
    spec.caps.max_candidates =
        c.value("max_candidates", spec.caps.max_candidates);
    spec.caps.truncate_on_overflow =
        c.value("truncate_on_overflow", spec.caps.truncate_on_overflow);
  }
  if (doc.contains("llm")) {
    const auto& c = doc.at("llm");
    spec.llm_mode = llm_mode_from_name(c.value("mode", "none"));
    spec.llm_script_path = c.value("script_path", spec.llm_script_path);
  }
  spec.validate();
  return spec;
}

namespace {

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  out << text;
  if (!out) fail(Errc::io_error, "write to " + path + " failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

struct InstanceTask {
  std::size_t topology_index = 0;
  std::size_t instance_index = 0;  // within the topology, zero-based
};

InstanceResult run_instance(const ExperimentSpec& spec,
                            const InstanceTask& task) {
  TopologySpec topology = spec.topologies[task.topology_index];
  const std::string tag = std::string(topology.code()) + "/" +
                          std::to_string(task.instance_index);
  topology.seed = derive_seed(spec.seed, tag);

  InstanceResult result;
  result.topology = topology;
  result.instance = std::string(topology.code()) +
                    std::to_string(task.instance_index + 1);
  result.instance_seed = topology.seed;
  result.order_seed = derive_seed(topology.seed, "order");

  const CreditNetwork network = generate(topology);

  StrategyOptions options;
  options.operation = spec.operation;
  options.strategies = spec.strategies;
  options.order_seed = result.order_seed;
  options.greedy_top_k = spec.greedy_top_k;
  options.caps = spec.caps;
  options.random_seeds.clear();
  for (const std::uint64_t rep : spec.random_seeds)
    options.random_seeds.push_back(derive_seed(topology.seed, rep));

  std::unique_ptr<LlmClient> llm;
  switch (spec.llm_mode) {
    case LlmMode::none:
      break;
    case LlmMode::delegate_greedy:
      llm = std::make_unique<PlanMockClient>(network, spec.operation,
                                             Provenance::greedy, spec.clearing,
                                             spec.caps, result.order_seed);
      break;
    case LlmMode::delegate_oracle:
      llm = std::make_unique<PlanMockClient>(network, spec.operation,
                                             Provenance::oracle, spec.clearing,
                                             spec.caps, result.order_seed);
      break;
    case LlmMode::script:
      llm = std::make_unique<MockLlmClient>(
          MockLlmClient::from_file(spec.llm_script_path));
      break;
    case LlmMode::http:
      llm = std::make_unique<HttpLlmClient>(LlmClientConfig::from_env());
      break;
  }
  options.llm = llm.get();

  result.table = compare_strategies(network, options, spec.clearing);
  return result;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

std::string fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

}  // namespace

std::string results_csv(const std::vector<InstanceResult>& instances) {
  std::string out = "instance,topology,strategy,post_total,plan_size,defaults,seed\n";
  for (const auto& item : instances) {
    for (const auto& row : item.table.rows) {
      out += csv_escape(item.instance) + ",";
      out += topology_name(item.topology.kind);
      out += ",";
      out += provenance_name(row.strategy);
      out += ",";
      out += format_amount(row.post_total) + ",";
      out += std::to_string(row.plan_size) + ",";
      out += std::to_string(row.defaults) + ",";
      out += std::to_string(row.seed) + "\n";
    }
  }
  return out;
}

std::string aggregate_csv(const std::vector<InstanceResult>& instances,
                          OperationKind operation) {
  (void)operation;
  struct Bucket {
    std::size_t rows = 0;
    double sum = 0.0, lo = 0.0, hi = 0.0;
    double plan_sum = 0.0, default_sum = 0.0;
  };
  std::map<std::pair<std::string, std::string>, Bucket> buckets;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& item : instances) {
    for (const auto& row : item.table.rows) {
      const std::pair<std::string, std::string> key{
          topology_name(item.topology.kind), provenance_name(row.strategy)};
      auto it = buckets.find(key);
      if (it == buckets.end()) {
        it = buckets.emplace(key, Bucket{}).first;
        order.push_back(key);
      }
      Bucket& b = it->second;
      if (b.rows == 0) {
        b.lo = row.post_total;
        b.hi = row.post_total;
      }
      b.rows += 1;
      b.sum += row.post_total;
      b.lo = std::min(b.lo, row.post_total);
      b.hi = std::max(b.hi, row.post_total);
      b.plan_sum += static_cast<double>(row.plan_size);
      b.default_sum += static_cast<double>(row.defaults);
    }
  }
  std::string out =
      "topology,strategy,rows,mean_post_total,min_post_total,max_post_total,"
      "mean_plan_size,mean_defaults\n";
  for (const auto& key : order) {
    const Bucket& b = buckets.at(key);
    const double rows = static_cast<double>(b.rows);
    out += key.first + "," + key.second + "," + std::to_string(b.rows) + ",";
    out += format_amount(b.sum / rows) + ",";
    out += format_amount(b.lo) + "," + format_amount(b.hi) + ",";
    out += format_amount(b.plan_sum / rows) + ",";
    out += format_amount(b.default_sum / rows) + "\n";
  }
  return out;
}

std::string pretty_tables(const std::vector<InstanceResult>& instances,
                          OperationKind operation) {
  std::string out = std::string("Sum of total assets after clearing, ") +
                    operation_name(operation) + " strategies\n";

  // One block per topology, instances as columns like the result tables.
  std::vector<std::string> topologies;
  for (const auto& item : instances) {
    const std::string name = topology_name(item.topology.kind);
    if (std::find(topologies.begin(), topologies.end(), name) ==
        topologies.end())
      topologies.push_back(name);
  }
  for (const auto& topology : topologies) {
    out += "\nTopology: " + topology + "\n";
    std::vector<const InstanceResult*> members;
    for (const auto& item : instances)
      if (topology_name(item.topology.kind) == topology)
        members.push_back(&item);

    std::vector<std::string> strategies;
    for (const auto* item : members)
      for (const auto& row : item->table.rows) {
        const std::string name = provenance_name(row.strategy);
        if (std::find(strategies.begin(), strategies.end(), name) ==
            strategies.end())
          strategies.push_back(name);
      }

    out += "  strategy       ";
    for (const auto* item : members) {
      std::string cell = item->instance;
      cell.insert(0, cell.size() < 10 ? 10 - cell.size() : 0, ' ');
      out += cell;
    }
    out += "\n";
    for (const auto& strategy : strategies) {
      std::string line = "  " + strategy;
      line.append(line.size() < 17 ? 17 - line.size() : 1, ' ');
      for (const auto* item : members) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& row : item->table.rows)
          if (provenance_name(row.strategy) == strategy) {
            sum += row.post_total;
            ++count;
          }
        std::string cell =
            count ? fixed2(sum / static_cast<double>(count)) : "-";
        cell.insert(0, cell.size() < 10 ? 10 - cell.size() : 0, ' ');
        line += cell;
      }
      out += line + "\n";
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentSpec& spec,
                                const std::string& output_dir,
                                std::size_t jobs) {
  spec.validate();
  if (jobs == 0) fail(Errc::invalid_spec, "jobs must be at least 1");
  fs::create_directories(output_dir);

  std::vector<InstanceTask> tasks;
  for (std::size_t t = 0; t < spec.topologies.size(); ++t)
    for (std::size_t k = 0; k < spec.instances_per_topology; ++k)
      tasks.push_back({t, k});

  std::vector<InstanceResult> results(tasks.size());
  // A scripted mock is consumed in instance order, so it cannot be shared
  // across workers.
  const std::size_t workers =
      spec.llm_mode == LlmMode::script ? 1 : std::min(jobs, tasks.size());

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      try {
        results[k] = run_instance(spec, tasks[k]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }

  ExperimentReport report;
  report.results_csv_path = (fs::path(output_dir) / "results.csv").string();
  report.aggregate_csv_path =
      (fs::path(output_dir) / "aggregate.csv").string();
  report.tables_path = (fs::path(output_dir) / "tables.txt").string();
  report.manifest_path = (fs::path(output_dir) / "manifest.json").string();

  if (first_error) {
    // Flush whatever completed, marked as partial.
    std::vector<InstanceResult> done;
    for (auto& r : results)
      if (!r.instance.empty()) done.push_back(r);
    write_text_file(report.results_csv_path, results_csv(done));
    std::string message = "experiment failed";
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    write_text_file((fs::path(output_dir) / "FAILED.txt").string(),
                    message + "\n");
    std::rethrow_exception(first_error);
  }

  report.instances = std::move(results);
  write_text_file(report.results_csv_path, results_csv(report.instances));
  write_text_file(report.aggregate_csv_path,
                  aggregate_csv(report.instances, spec.operation));
  write_text_file(report.tables_path,
                  pretty_tables(report.instances, spec.operation));

  nlohmann::ordered_json manifest;
  manifest["tool"] = "creditnet";
  manifest["version"] = kToolVersion;
  manifest["spec"] = experiment_spec_to_json(spec);
  auto seeds = nlohmann::ordered_json::array();
  for (const auto& item : report.instances)
    seeds.push_back({{"instance", item.instance},
                     {"instance_seed", item.instance_seed},
                     {"order_seed", item.order_seed}});
  manifest["instances"] = std::move(seeds);
  write_text_file(report.manifest_path, manifest.dump(2) + "\n");
  return report;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, path + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("spec"))
    return experiment_spec_from_json(doc.at("spec"));
  return experiment_spec_from_json(doc);
}

// ---------------------------------------------------------------------------
// Statement corpora

namespace {

std::string zero_pad(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::string first_line(const std::string& text) {
  const auto eol = text.find('\n');
  return eol == std::string::npos ? text : text.substr(0, eol);
}

}  // namespace

CorpusReport write_statement_corpus(const CreditNetwork& network,
                                    const std::string& output_dir,
                                    std::uint64_t seed, bool inject,
                                    double inject_delta) {
  fs::create_directories(output_dir);
  CorpusReport report;

  std::vector<ExtractionRecord> records = records_from_network(network);
  if (inject)
    report.injection =
        inject_amount_conflict(records, derive_seed(seed, "inject"),
                               inject_delta);

  const std::size_t width = std::to_string(records.size()).size();
  std::vector<std::string> headings;
  SplitMix64 template_rng(derive_seed(seed, "templates"));
  for (std::size_t k = 0; k < records.size(); ++k) {
    const std::size_t template_id =
        static_cast<std::size_t>(template_rng.next_below(
            static_cast<std::uint64_t>(kStatementTemplateCount)));
    const std::string statement =
        render_statement(records[k], template_id, derive_seed(seed, k));
    const std::string stem = "firm_" + zero_pad(k + 1, width);
    const std::string statement_path =
        (fs::path(output_dir) / (stem + ".statement.txt")).string();
    const std::string record_path =
        (fs::path(output_dir) / (stem + ".record.txt")).string();
    write_text_file(statement_path, statement);
    write_text_file(record_path, render_extraction_record(records[k]));
    report.statement_files.push_back(statement_path);
    report.record_files.push_back(record_path);
    headings.push_back(first_line(statement));
  }

  save_network_file(network,
                    (fs::path(output_dir) / "truth.network.json").string());
  const auto script = make_translation_script(headings, records);
  write_text_file((fs::path(output_dir) / "mock_script.json").string(),
                  mock_script_to_json(script).dump(2) + "\n");

  nlohmann::ordered_json manifest;
  manifest["tool"] = "creditnet";
  manifest["version"] = kToolVersion;
  manifest["seed"] = seed;
  manifest["firms"] = records.size();
  manifest["injected"] = inject;
  write_text_file((fs::path(output_dir) / "corpus_manifest.json").string(),
                  manifest.dump(2) + "\n");

  if (report.injection) {
    nlohmann::ordered_json info;
    info["record_index"] = report.injection->record_index;
    info["borrower"] = report.injection->borrower;
    info["lender"] = report.injection->lender;
    info["original"] = report.injection->original;
    info["perturbed"] = report.injection->perturbed;
    write_text_file((fs::path(output_dir) / "injection.json").string(),
                    info.dump(2) + "\n");
  }
  return report;
}

namespace {

std::vector<std::string> sorted_files_with_suffix(const std::string& dir,
                                                  const std::string& suffix) {
  std::vector<std::string> files;
  if (!fs::is_directory(dir))
    fail(Errc::io_error, dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() >= suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Equality up to firm reordering, matched by normalized label.
bool networks_equal_reordered(const CreditNetwork& a, const CreditNetwork& b) {
  if (a.size() != b.size()) return false;
  std::vector<std::size_t> to_b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto match = b.find_firm(a.labels()[i]);
    if (!match) return false;
    to_b[i] = *match;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.external_asset(i) != b.external_asset(to_b[i])) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a.liability(i, j) != b.liability(to_b[i], to_b[j])) return false;
  }
  return true;
}

nlohmann::ordered_json anomaly_to_json(const Anomaly& anomaly) {
  nlohmann::ordered_json doc;
  doc["kind"] = anomaly_kind_name(anomaly.kind);
  doc["record_id"] = anomaly.record_id;
  if (anomaly.prior_record_id) doc["prior_record_id"] = *anomaly.prior_record_id;
  if (!anomaly.borrower.empty()) doc["borrower"] = anomaly.borrower;
  if (!anomaly.lender.empty()) doc["lender"] = anomaly.lender;
  if (anomaly.kind == AnomalyKind::amount_conflict) {
    doc["first_amount"] = anomaly.first_amount;
    doc["second_amount"] = anomaly.second_amount;
    doc["difference"] = anomaly.difference;
  }
  doc["message"] = anomaly.message;
  return doc;
}

}  // namespace

TranslationReport run_translation(const TranslationSpec& spec) {
  TranslationReport report;

  std::vector<ExtractionRecord> records;
  if (spec.mode == TranslationMode::records) {
    for (const auto& path :
         sorted_files_with_suffix(spec.corpus_dir, ".record.txt"))
      records.push_back(parse_extraction_record(read_text_file(path)));
  } else {
    const auto statements =
        sorted_files_with_suffix(spec.corpus_dir, ".statement.txt");
    std::unique_ptr<LlmClient> client;
    if (spec.mode == TranslationMode::mock_script) {
      const std::string script =
          spec.script_path.empty()
              ? (fs::path(spec.corpus_dir) / "mock_script.json").string()
              : spec.script_path;
      client = std::make_unique<MockLlmClient>(MockLlmClient::from_file(script));
    } else {
      client = std::make_unique<HttpLlmClient>(LlmClientConfig::from_env());
    }
    for (const auto& path : statements)
      records.push_back(llm_translate(*client, read_text_file(path)));
  }
  report.record_count = records.size();

  report.aggregation = aggregate_statements(records, spec.tolerance);

  if (!spec.output_dir.empty()) {
    fs::create_directories(spec.output_dir);
    const std::size_t width =
        std::to_string(report.aggregation.components.size()).size();
    for (std::size_t c = 0; c < report.aggregation.components.size(); ++c)
      save_network_file(report.aggregation.components[c],
                        (fs::path(spec.output_dir) /
                         ("component_" + zero_pad(c + 1, width) + ".json"))
                            .string());
    auto anomalies = nlohmann::ordered_json::array();
    for (const auto& anomaly : report.aggregation.anomalies)
      anomalies.push_back(anomaly_to_json(anomaly));
    write_text_file((fs::path(spec.output_dir) / "anomalies.json").string(),
                    anomalies.dump(2) + "\n");
  }

  // Verdict against ground truth when available.
  const std::string truth_path =
      spec.truth_path.empty()
          ? (fs::path(spec.corpus_dir) / "truth.network.json").string()
          : spec.truth_path;
  if (report.aggregation.halted_at) {
    report.verdict = "anomaly detected at index " +
                     std::to_string(*report.aggregation.halted_at);
  } else if (fs::exists(truth_path)) {
    report.truth_available = true;
    const CreditNetwork truth = load_network_file(truth_path);
    auto truth_components = weakly_connected_components(truth);
    const auto& got = report.aggregation.components;
    bool all_matched = truth_components.size() == got.size();
    std::vector<bool> used(got.size(), false);
    for (const auto& expected : truth_components) {
      if (!all_matched) break;
      bool matched = false;
      for (std::size_t k = 0; k < got.size(); ++k) {
        if (used[k]) continue;
        if (networks_equal_reordered(expected, got[k])) {
          used[k] = true;
          matched = true;
          break;
        }
      }
      all_matched = all_matched && matched;
    }
    report.matches_truth = all_matched;
    report.verdict = all_matched ? "success" : "mismatch";
  } else {
    report.verdict = "success";
  }

  if (!spec.output_dir.empty()) {
    nlohmann::ordered_json doc;
    doc["records"] = report.record_count;
    doc["components"] = report.aggregation.components.size();
    doc["anomalies"] = report.aggregation.anomalies.size();
    if (report.aggregation.halted_at)
      doc["halted_at"] = *report.aggregation.halted_at;
    doc["assets_unknown"] = report.aggregation.assets_unknown;
    doc["verdict"] = report.verdict;
    write_text_file((fs::path(spec.output_dir) / "report.json").string(),
                    doc.dump(2) + "\n");
  }
  return report;
}

}  // namespace creditnet
