// Command line front end: one verb per engine capability, composable via
// network/plan/corpus files.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "creditnet/experiment.hpp"

namespace {

using namespace creditnet;

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case Errc::transport_error:
      return 4;
    case Errc::not_converged:
    case Errc::io_error:
      return 5;
    default:
      return 2;  // validation
  }
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot read " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

nlohmann::json parse_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, path + ": " + e.what());
  }
}

struct ClearingFlags {
  double alpha = 0.5;
  double convergence_tolerance = 1e-9;
  std::size_t max_iterations = 100000;
  double solvency_tolerance = 1e-9;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "default-cost recovery fraction");
    cmd->add_option("--convergence-tolerance", convergence_tolerance,
                    "max payment change declaring convergence");
    cmd->add_option("--max-iterations", max_iterations,
                    "iteration cap for the fixed point");
    cmd->add_option("--solvency-tolerance", solvency_tolerance,
                    "slack for the solvency classification");
  }

  ClearingConfig config() const {
    ClearingConfig c;
    c.alpha = alpha;
    c.convergence_tolerance = convergence_tolerance;
    c.max_iterations = max_iterations;
    c.solvency_tolerance = solvency_tolerance;
    return c;
  }
};

std::unique_ptr<LlmClient> make_client(const std::string& mode,
                                       const std::string& script,
                                       const CreditNetwork* network,
                                       const std::string& operation,
                                       const ClearingConfig& config,
                                       std::uint64_t order_seed) {
  const LlmMode parsed = llm_mode_from_name(mode);
  switch (parsed) {
    case LlmMode::script:
      return std::make_unique<MockLlmClient>(MockLlmClient::from_file(script));
    case LlmMode::http:
      return std::make_unique<HttpLlmClient>(LlmClientConfig::from_env());
    case LlmMode::delegate_greedy:
    case LlmMode::delegate_oracle: {
      if (network == nullptr)
        fail(Errc::invalid_spec, "delegate modes need a network");
      return std::make_unique<PlanMockClient>(
          *network, operation_from_name(operation),
          parsed == LlmMode::delegate_greedy ? Provenance::greedy
                                             : Provenance::oracle,
          config, BruteForceCaps{14, true}, order_seed);
    }
    case LlmMode::none:
      break;
  }
  fail(Errc::invalid_spec, "llm mode \"" + mode + "\" cannot answer prompts");
}

int run(int argc, char** argv) {
  CLI::App app{"credit network construction, clearing and optimization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("creditnet ") + kToolVersion);

  // generate
  auto* cmd_generate = app.add_subcommand("generate", "generate a network");
  std::string g_topology = "erdos_renyi";
  TopologySpec g_spec;
  std::string g_out;
  std::string g_blocks, g_sccs;
  cmd_generate->add_option("--topology", g_topology,
                           "erdos_renyi|core_periphery|isolated_blocks|dag_sccs");
  cmd_generate->add_option("--n", g_spec.n, "firm count");
  cmd_generate->add_option("--seed", g_spec.seed, "instance seed");
  cmd_generate->add_option("--edge-probability", g_spec.edge_probability,
                           "Erdos-Renyi edge probability");
  cmd_generate->add_option("--core-size", g_spec.core_size, "core firm count");
  cmd_generate->add_option("--core-density", g_spec.core_density,
                           "core-core edge probability");
  cmd_generate->add_option("--periphery-density",
                           g_spec.periphery_to_core_density,
                           "periphery-to-core edge probability");
  cmd_generate->add_option("--block-sizes", g_blocks,
                           "comma-separated block sizes");
  cmd_generate->add_option("--block-density", g_spec.block_density,
                           "within-block edge probability");
  cmd_generate->add_option("--scc-sizes", g_sccs,
                           "comma-separated SCC sizes");
  cmd_generate->add_option("--inter-scc-probability",
                           g_spec.inter_scc_probability,
                           "edge probability between SCCs");
  cmd_generate->add_option("-o,--output", g_out, "network file (default stdout)");

  // clear
  auto* cmd_clear = app.add_subcommand("clear", "compute clearing payments");
  std::string c_in, c_out;
  ClearingFlags c_flags;
  cmd_clear->add_option("-i,--input", c_in, "network file")->required();
  cmd_clear->add_option("-o,--output", c_out, "result file (default stdout)");
  c_flags.attach(cmd_clear);

  // cycles
  auto* cmd_cycles = app.add_subcommand("cycles", "enumerate debt cycles");
  std::string y_in, y_out;
  std::size_t y_max_count = 1000000;
  std::optional<std::size_t> y_max_len;
  cmd_cycles->add_option("-i,--input", y_in, "network file")->required();
  cmd_cycles->add_option("--max-len", y_max_len, "cycle length cap");
  cmd_cycles->add_option("--max-count", y_max_count, "cycle count cap");
  cmd_cycles->add_option("-o,--output", y_out, "cycle list (default stdout)");

  // compress
  auto* cmd_compress = app.add_subcommand("compress", "compress debt cycles");
  std::string m_in, m_plan, m_out, m_report;
  std::uint64_t m_seed = 0;
  bool m_all = false;
  cmd_compress->add_option("-i,--input", m_in, "network file")->required();
  cmd_compress->add_option("--plan", m_plan, "plan file with cycles");
  cmd_compress->add_flag("--all", m_all, "compress every enumerated cycle");
  cmd_compress->add_option("--seed", m_seed, "equal-length ordering seed");
  cmd_compress->add_option("-o,--output", m_out, "network file (default stdout)");
  cmd_compress->add_option("--report", m_report, "application report file");

  // remove
  auto* cmd_remove = app.add_subcommand("remove", "remove debt edges");
  std::string r_in, r_plan, r_out;
  std::vector<std::string> r_edges;
  cmd_remove->add_option("-i,--input", r_in, "network file")->required();
  cmd_remove->add_option("--edge", r_edges,
                         "borrower,lender index pair (repeatable)");
  cmd_remove->add_option("--plan", r_plan, "plan file with edges");
  cmd_remove->add_option("-o,--output", r_out, "network file (default stdout)");

  // strategize
  auto* cmd_strategize =
      app.add_subcommand("strategize", "build and evaluate an execution plan");
  std::string s_in, s_operation = "compression", s_strategy = "greedy";
  std::string s_out, s_llm_mode = "none", s_llm_script;
  std::uint64_t s_seed = 0;
  std::size_t s_top_k = 3, s_max_candidates = 20;
  bool s_truncate = false, s_evaluate = false;
  ClearingFlags s_flags;
  cmd_strategize->add_option("-i,--input", s_in, "network file")->required();
  cmd_strategize->add_option("--operation", s_operation, "compression|removal");
  cmd_strategize->add_option("--strategy", s_strategy,
                             "none|random|greedy|oracle|llm");
  cmd_strategize->add_option("--seed", s_seed, "selection and ordering seed");
  cmd_strategize->add_option("--top-k", s_top_k, "greedy compression picks");
  cmd_strategize->add_option("--max-candidates", s_max_candidates,
                             "oracle candidate cap");
  cmd_strategize->add_flag("--truncate", s_truncate,
                           "rank-truncate instead of failing at the cap");
  cmd_strategize->add_flag("--evaluate", s_evaluate,
                           "also clear and report totals");
  cmd_strategize->add_option("--llm-mode", s_llm_mode,
                             "script|http|delegate-greedy|delegate-oracle");
  cmd_strategize->add_option("--llm-script", s_llm_script, "mock script file");
  cmd_strategize->add_option("-o,--output", s_out, "plan file (default stdout)");
  s_flags.attach(cmd_strategize);

  // experiment
  auto* cmd_experiment =
      app.add_subcommand("experiment", "run a strategy comparison experiment");
  std::string e_spec, e_out;
  std::size_t e_jobs = 1;
  std::optional<std::uint64_t> e_seed;
  std::optional<std::string> e_operation;
  cmd_experiment->add_option("--spec", e_spec,
                             "experiment spec or manifest JSON");
  cmd_experiment->add_option("--seed", e_seed, "master seed override");
  cmd_experiment->add_option("--operation", e_operation,
                             "compression|removal override");
  cmd_experiment->add_option("-o,--output", e_out, "output directory")
      ->required();
  cmd_experiment->add_option("--jobs", e_jobs, "parallel instance workers");

  // translate
  auto* cmd_translate =
      app.add_subcommand("translate", "translate and aggregate a corpus");
  std::string t_corpus, t_out, t_mode = "records", t_script, t_truth;
  double t_tolerance = 1e-6;
  cmd_translate->add_option("--corpus", t_corpus, "corpus directory")
      ->required();
  cmd_translate->add_option("-o,--output", t_out, "output directory");
  cmd_translate->add_option("--client", t_mode, "records|mock|http");
  cmd_translate->add_option("--script", t_script, "mock script file");
  cmd_translate->add_option("--truth", t_truth, "ground-truth network file");
  cmd_translate->add_option("--tolerance", t_tolerance,
                            "amount conflict tolerance");

  // aggregate
  auto* cmd_aggregate =
      app.add_subcommand("aggregate", "aggregate record files directly");
  std::string a_corpus, a_out, a_truth;
  double a_tolerance = 1e-6;
  cmd_aggregate->add_option("--records", a_corpus, "record directory")
      ->required();
  cmd_aggregate->add_option("-o,--output", a_out, "output directory");
  cmd_aggregate->add_option("--truth", a_truth, "ground-truth network file");
  cmd_aggregate->add_option("--tolerance", a_tolerance,
                            "amount conflict tolerance");

  // render-statements
  auto* cmd_render =
      app.add_subcommand("render-statements", "write a statement corpus");
  std::string n_in, n_out;
  std::uint64_t n_seed = 0;
  bool n_inject = false;
  double n_delta = 1.0;
  cmd_render->add_option("-i,--input", n_in, "network file")->required();
  cmd_render->add_option("-o,--output", n_out, "corpus directory")->required();
  cmd_render->add_option("--seed", n_seed, "template and phrasing seed");
  cmd_render->add_flag("--inject-conflict", n_inject,
                       "perturb one dual-reported claim");
  cmd_render->add_option("--inject-delta", n_delta, "perturbation amount");

  CLI11_PARSE(app, argc, argv);

  if (cmd_generate->parsed()) {
    g_spec.kind = topology_from_name(g_topology);
    auto parse_sizes = [](const std::string& text) {
      std::vector<std::size_t> sizes;
      std::size_t pos = 0;
      while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        sizes.push_back(std::stoull(text.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return sizes;
    };
    if (!g_blocks.empty()) g_spec.block_sizes = parse_sizes(g_blocks);
    if (!g_sccs.empty()) g_spec.scc_sizes = parse_sizes(g_sccs);
    write_or_print(g_out, network_file_text(generate(g_spec)));
    return 0;
  }

  if (cmd_clear->parsed()) {
    const CreditNetwork network = load_network_file(c_in);
    const ClearingResult result = clear(network, c_flags.config());
    write_or_print(c_out, clearing_result_to_json(result).dump(2) + "\n");
    return 0;
  }

  if (cmd_cycles->parsed()) {
    const CreditNetwork network = load_network_file(y_in);
    const auto cycles = enumerate_simple_cycles(network, y_max_len, y_max_count);
    write_or_print(y_out, cycles_to_json(cycles).dump(2) + "\n");
    return 0;
  }

  if (cmd_compress->parsed()) {
    const CreditNetwork network = load_network_file(m_in);
    std::vector<DebtCycle> cycles;
    if (m_all == !m_plan.empty())
      fail(Errc::invalid_spec, "pass exactly one of --all or --plan");
    if (m_all) {
      cycles = enumerate_simple_cycles(network);
    } else {
      const ExecutionPlan plan =
          plan_from_json(parse_json_file(m_plan), network);
      cycles = plan.cycles;
    }
    const auto outcome = compress_cycles(network, cycles, m_seed);
    write_or_print(m_out, network_file_text(outcome.network));
    if (!m_report.empty())
      write_or_print(m_report,
                     compression_report_to_json(outcome.report).dump(2) + "\n");
    return 0;
  }

  if (cmd_remove->parsed()) {
    const CreditNetwork network = load_network_file(r_in);
    std::vector<DebtEdge> edges;
    for (const auto& text : r_edges) {
      const auto comma = text.find(',');
      if (comma == std::string::npos)
        fail(Errc::invalid_spec, "--edge expects borrower,lender");
      edges.push_back({std::stoull(text.substr(0, comma)),
                       std::stoull(text.substr(comma + 1))});
    }
    if (!r_plan.empty()) {
      const ExecutionPlan plan =
          plan_from_json(parse_json_file(r_plan), network);
      edges.insert(edges.end(), plan.edges.begin(), plan.edges.end());
    }
    write_or_print(r_out, network_file_text(remove_debts(network, edges)));
    return 0;
  }

  if (cmd_strategize->parsed()) {
    const CreditNetwork network = load_network_file(s_in);
    const OperationKind operation = operation_from_name(s_operation);
    const ClearingConfig config = s_flags.config();
    const BruteForceCaps caps{s_max_candidates, s_truncate};
    ExecutionPlan plan;
    const Provenance strategy = provenance_from_name(s_strategy);
    switch (strategy) {
      case Provenance::none:
        plan = plan_none(network);
        break;
      case Provenance::random:
        plan = plan_random(network, operation, s_seed);
        break;
      case Provenance::greedy:
        plan = operation == OperationKind::compression
                   ? plan_greedy_compression(network, s_top_k, s_seed)
                   : plan_greedy_removal(network, config);
        break;
      case Provenance::oracle:
        plan = plan_brute_force(network, operation, config, caps, s_seed);
        break;
      case Provenance::llm: {
        const auto client = make_client(s_llm_mode, s_llm_script, &network,
                                        s_operation, config, s_seed);
        plan = llm_suggest(*client, network, operation, config, s_seed);
        break;
      }
    }
    nlohmann::ordered_json doc = plan_to_json(plan);
    if (s_evaluate)
      doc = objective_report_to_json(evaluate_plan(network, plan, config));
    write_or_print(s_out, doc.dump(2) + "\n");
    return 0;
  }

  if (cmd_experiment->parsed()) {
    ExperimentSpec spec = e_spec.empty() ? ExperimentSpec::defaults()
                                         : load_experiment_spec(e_spec);
    if (e_seed) spec.seed = *e_seed;
    if (e_operation) spec.operation = operation_from_name(*e_operation);
    const ExperimentReport report = run_experiment(spec, e_out, e_jobs);
    std::cout << "wrote " << report.results_csv_path << "\n"
              << "wrote " << report.aggregate_csv_path << "\n"
              << "wrote " << report.tables_path << "\n"
              << "wrote " << report.manifest_path << "\n";
    return 0;
  }

  const auto finish_translation = [](const TranslationReport& report) {
    std::cout << report.verdict << "\n";
    if (report.aggregation.halted_at) return 3;
    if (report.truth_available && !report.matches_truth) return 2;
    return 0;
  };

  if (cmd_translate->parsed()) {
    TranslationSpec spec;
    spec.corpus_dir = t_corpus;
    spec.output_dir = t_out;
    spec.truth_path = t_truth;
    spec.script_path = t_script;
    spec.tolerance = t_tolerance;
    if (t_mode == "records")
      spec.mode = TranslationMode::records;
    else if (t_mode == "mock")
      spec.mode = TranslationMode::mock_script;
    else if (t_mode == "http")
      spec.mode = TranslationMode::http;
    else
      fail(Errc::invalid_spec, "unknown client \"" + t_mode + "\"");
    return finish_translation(run_translation(spec));
  }

  if (cmd_aggregate->parsed()) {
    TranslationSpec spec;
    spec.corpus_dir = a_corpus;
    spec.output_dir = a_out;
    spec.truth_path = a_truth;
    spec.tolerance = a_tolerance;
    spec.mode = TranslationMode::records;
    return finish_translation(run_translation(spec));
  }

  if (cmd_render->parsed()) {
    const CreditNetwork network = load_network_file(n_in);
    const CorpusReport report =
        write_statement_corpus(network, n_out, n_seed, n_inject, n_delta);
    std::cout << "wrote " << report.statement_files.size()
              << " statements to " << n_out << "\n";
    if (report.injection)
      std::cout << "injected conflict in record "
                << report.injection->record_index << " ("
                << report.injection->borrower << " -> "
                << report.injection->lender << ")\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const creditnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
}
