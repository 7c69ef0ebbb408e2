// prm-forge: data-construction and evaluation toolkit for process reward
// models. Subcommands: synthesize, judge, filter, eval-bon, eval-steps,
// search, report. All of them run offline against deterministic mock
// backends (--mock --fixture <file>); remote backends speak the
// OpenAI-compatible chat-completions protocol (--config <file>,
// PRMFORGE_API_KEY for auth).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "prmforge/errors.hpp"
#include "prmforge/fixture.hpp"
#include "prmforge/http_client.hpp"
#include "prmforge/judge.hpp"
#include "prmforge/mock.hpp"
#include "prmforge/pipeline.hpp"
#include "prmforge/rollout.hpp"
#include "prmforge/storage.hpp"

namespace {

using namespace prmforge;
using nlohmann::json;

struct Backends {
  std::unique_ptr<MockCompleter> mock_completer;
  std::unique_ptr<MockJudge> mock_judge;
  std::unique_ptr<MockScorer> mock_scorer;
  std::unique_ptr<ChatClient> completer_client;
  std::unique_ptr<ChatClient> judge_client;
  std::unique_ptr<ChatClient> scorer_client;

  Completer* completer = nullptr;
  JudgeBackend* judge = nullptr;
  StepScorer* scorer = nullptr;
};

BackendConfig backend_config_from_json(const json& j) {
  BackendConfig cfg;
  cfg.endpoint = j.at("endpoint").get<std::string>();
  cfg.model_name = j.value("model", std::string());
  cfg.max_concurrency = j.value("max_concurrency", 4);
  cfg.retry.max_attempts = j.value("max_attempts", 3);
  cfg.timeout = std::chrono::milliseconds(j.value("timeout_ms", 60000));
  cfg.requests_per_second = j.value("requests_per_second", 0.0);
  return cfg;
}

Backends make_backends(bool mock, const std::string& fixture_path,
                       const std::string& config_path, int k, std::uint64_t seed) {
  Backends b;
  if (mock) {
    b.mock_completer = std::make_unique<MockCompleter>(seed);
    b.mock_judge = std::make_unique<MockJudge>();
    b.mock_scorer = std::make_unique<MockScorer>(seed);
    if (!fixture_path.empty()) {
      MockFixture fixture = MockFixture::load(fixture_path);
      fixture.configure(*b.mock_completer, *b.mock_judge, *b.mock_scorer, k);
    }
    b.completer = b.mock_completer.get();
    b.judge = b.mock_judge.get();
    b.scorer = b.mock_scorer.get();
    return b;
  }
  if (config_path.empty()) {
    throw Error(ErrorKind::Config, "remote backends need --config (or pass --mock)");
  }
  std::ifstream in(config_path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open config " + config_path);
  }
  json cfg = json::parse(in);
  auto make_client = [&](const char* role) -> std::unique_ptr<ChatClient> {
    if (!cfg.contains(role)) return nullptr;
    BackendConfig bc = backend_config_from_json(cfg.at(role));
    return std::make_unique<ChatClient>(bc, make_httplib_transport(bc.timeout));
  };
  b.completer_client = make_client("completer");
  b.judge_client = make_client("judge");
  b.scorer_client = make_client("scorer");
  b.completer = b.completer_client.get();
  b.judge = b.judge_client.get();
  b.scorer = b.scorer_client.get();
  return b;
}

LabelPolicy make_policy(const std::string& name, double threshold) {
  LabelPolicy policy;
  if (name == "hard") {
    policy.kind = LabelKind::Hard;
  } else if (name == "soft") {
    policy.kind = LabelKind::Soft;
  } else {
    throw Error(ErrorKind::Config, "label policy must be hard or soft");
  }
  policy.threshold = threshold;
  return policy;
}

std::string load_template(const std::string& path) {
  if (path.empty()) return default_judge_template();
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open judge template " + path);
  }
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prm-forge: PRM data construction and evaluation toolkit"};
  app.require_subcommand(1);

  bool mock = false;
  std::string fixture_path, config_path;
  std::uint64_t seed = 0;
  app.add_flag("--mock", mock, "use deterministic mock backends");
  app.add_option("--fixture", fixture_path, "mock fixture JSON");
  app.add_option("--config", config_path, "backend config JSON");
  app.add_option("--seed", seed, "deterministic seed");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "rollout + judge + filter + dataset");
  std::string out_dir = "out";
  std::string policy_name = "hard";
  double label_threshold = 0.0;
  int k = 8;
  int responses_per_query = 8;
  bool no_filter = false, resume = false, no_halt = false;
  synth->add_option("--out", out_dir, "output directory");
  synth->add_option("--policy", policy_name, "hard|soft");
  synth->add_option("--label-threshold", label_threshold, "hard-label threshold in [0,1)");
  synth->add_option("--k", k, "completions per step");
  synth->add_option("--responses-per-query", responses_per_query, "responses sampled per query");
  synth->add_flag("--no-filter", no_filter, "skip consensus filtering");
  synth->add_flag("--no-halt-at-zero", no_halt, "estimate every step even after a zero");
  synth->add_flag("--resume", resume, "skip samples already annotated on disk");

  // judge
  auto* judge_cmd = app.add_subcommand("judge", "judge-annotate existing traces");
  std::string queries_path, traces_path, out_path, judge_template_path;
  int judge_retries = 2;
  judge_cmd->add_option("--queries", queries_path, "queries JSONL")->required();
  judge_cmd->add_option("--traces", traces_path, "traces JSONL")->required();
  judge_cmd->add_option("--out", out_path, "output judge verdicts JSONL")->required();
  judge_cmd->add_option("--judge-template", judge_template_path, "override prompt template");
  judge_cmd->add_option("--retries", judge_retries, "judge retries on malformed output");

  // filter
  auto* filter_cmd = app.add_subcommand("filter", "build dataset from stage files");
  std::string mc_path, judge_path, dataset_out, stats_out;
  filter_cmd->add_option("--traces", traces_path, "traces JSONL")->required();
  filter_cmd->add_option("--mc", mc_path, "MC annotations JSONL")->required();
  filter_cmd->add_option("--judge", judge_path, "judge verdicts JSONL")->required();
  filter_cmd->add_option("--out", dataset_out, "output dataset JSONL")->required();
  filter_cmd->add_option("--stats", stats_out, "output stats JSON");
  filter_cmd->add_option("--policy", policy_name, "hard|soft");
  filter_cmd->add_option("--label-threshold", label_threshold, "hard-label threshold");
  filter_cmd->add_flag("--no-filter", no_filter, "emit without consensus filtering");

  // eval-bon
  auto* bon_cmd = app.add_subcommand("eval-bon", "Best-of-N evaluation");
  std::string strategy_name = "product";
  bon_cmd->add_option("--queries", queries_path, "queries JSONL")->required();
  bon_cmd->add_option("--traces", traces_path, "traces JSONL")->required();
  bon_cmd->add_option("--strategy", strategy_name, "product|min|last");
  bon_cmd->add_option("--out", out_path, "output report JSONL");

  // eval-steps
  auto* steps_cmd = app.add_subcommand("eval-steps", "step-error localization F1");
  std::vector<std::string> cases_paths;
  double threshold = 0.5;
  steps_cmd->add_option("--cases", cases_paths, "bench case JSONL files (one dataset each)")
      ->required();
  steps_cmd->add_option("--threshold", threshold, "score threshold for first-error prediction");
  steps_cmd->add_option("--out", out_path, "output report JSONL");

  // search
  auto* search_cmd = app.add_subcommand("search", "PRM-guided greedy search");
  int n_candidates = 8, max_steps = 16;
  search_cmd->add_option("--queries", queries_path, "queries JSONL")->required();
  search_cmd->add_option("--n-candidates", n_candidates, "candidates per step");
  search_cmd->add_option("--max-steps", max_steps, "maximum steps per trace");
  search_cmd->add_option("--out", out_path, "output traces JSONL");

  // report
  auto* report_cmd = app.add_subcommand("report", "print a stored report");
  std::string report_path;
  report_cmd->add_option("--in", report_path, "report JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      if (!mock && config_path.empty()) {
        throw Error(ErrorKind::Config, "synthesize needs --mock or --config");
      }
      if (mock && fixture_path.empty()) {
        throw Error(ErrorKind::Config, "synthesize --mock needs --fixture");
      }
      Backends backends = make_backends(mock, fixture_path, config_path, k, seed);
      PipelineConfig config;
      config.k = k;
      config.responses_per_query = responses_per_query;
      config.policy = make_policy(policy_name, label_threshold);
      config.filter = !no_filter;
      config.halt_at_first_zero = !no_halt;
      config.seed = seed;
      config.judge_retries = judge_retries;
      config.output_dir = out_dir;

      std::vector<Query> queries;
      std::vector<SolutionTrace> traces;
      if (mock) {
        MockFixture fixture = MockFixture::load(fixture_path);
        queries = fixture.query_list();
        traces = fixture.traces();
      } else {
        queries = storage::read_queries(queries_path);
        traces = generate_traces(queries, *backends.completer, config);
      }
      std::filesystem::create_directories(config.output_dir);
      storage::write_queries(config.output_dir / "queries.jsonl", queries);
      try {
        SynthesizeResult result =
            synthesize(queries, traces, *backends.completer, *backends.judge, config, resume);
        std::cout << "dataset: " << result.dataset_path.string() << "\n"
                  << "retained " << result.stats.emitted << "/" << result.stats.total
                  << " samples (judge-failed " << result.stats.judge_failed << ", dropped "
                  << result.stats.dropped_disagreement << ")\n";
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Backend) {
          std::cerr << "error: " << e.what() << "\n"
                    << "partial progress is persisted under " << out_dir
                    << "; rerun with --resume to continue.\n";
          return 1;
        }
        throw;
      }
    } else if (judge_cmd->parsed()) {
      Backends backends = make_backends(mock, fixture_path, config_path, k, seed);
      auto queries = storage::read_queries(queries_path);
      auto traces = storage::read_traces(traces_path);
      std::string prompt_template = load_template(judge_template_path);
      std::map<std::string, const Query*> by_id;
      for (const auto& q : queries) by_id[q.id] = &q;
      std::vector<JudgeAnnotationRecord> records;
      for (const auto& trace : traces) {
        auto it = by_id.find(trace.query_id);
        if (it == by_id.end()) {
          throw Error(ErrorKind::Dataset, "trace references unknown query " + trace.query_id);
        }
        JudgeOutcome outcome = annotate_judge(*it->second, trace, *backends.judge,
                                              judge_retries, prompt_template);
        JudgeAnnotationRecord record;
        record.query_id = trace.query_id;
        record.response_index = trace.response_index;
        record.verdict = outcome.verdict;
        record.error = outcome.error;
        records.push_back(std::move(record));
      }
      storage::write_judge_records(out_path, records);
      std::cout << "wrote " << records.size() << " verdicts to " << out_path << "\n";
    } else if (filter_cmd->parsed()) {
      auto traces = storage::read_traces(traces_path);
      auto annotations = storage::read_mc_annotations(mc_path);
      auto judge_records = storage::read_judge_records(judge_path);
      LabelPolicy policy = make_policy(policy_name, label_threshold);
      DatasetResult dataset =
          build_dataset(traces, annotations, judge_records, policy, !no_filter);
      storage::write_labeled_samples(dataset_out, dataset.samples);
      std::cout << "retained " << dataset.stats.emitted << "/" << dataset.stats.total
                << " samples (fraction " << dataset.stats.retained_fraction() << ")\n";
      if (!stats_out.empty()) {
        std::ofstream out(stats_out, std::ios::trunc);
        json stats = {{"total", dataset.stats.total},
                      {"emitted", dataset.stats.emitted},
                      {"dropped_disagreement", dataset.stats.dropped_disagreement},
                      {"judge_failed", dataset.stats.judge_failed},
                      {"retained_fraction", dataset.stats.retained_fraction()}};
        out << stats.dump(2) << "\n";
      }
    } else if (bon_cmd->parsed()) {
      Backends backends = make_backends(mock, fixture_path, config_path, k, seed);
      auto queries = storage::read_queries(queries_path);
      auto traces = storage::read_traces(traces_path);
      BonEvalResult result =
          eval_bon(queries, traces, *backends.scorer, parse_strategy(strategy_name));
      std::cout << result.table;
      if (!out_path.empty()) {
        result.report.payload["table"] = result.table;
        storage::write_eval_report(out_path, result.report);
      }
    } else if (steps_cmd->parsed()) {
      Backends backends = make_backends(mock, fixture_path, config_path, k, seed);
      std::map<std::string, std::vector<StepBenchCase>> datasets;
      for (const auto& path : cases_paths) {
        datasets[std::filesystem::path(path).stem().string()] =
            storage::read_step_bench_cases(path);
      }
      StepsEvalResult result = eval_steps(datasets, *backends.scorer, threshold);
      std::cout << result.table;
      if (!out_path.empty()) {
        result.report.payload["table"] = result.table;
        storage::write_eval_report(out_path, result.report);
      }
    } else if (search_cmd->parsed()) {
      Backends backends = make_backends(mock, fixture_path, config_path, n_candidates, seed);
      auto queries = storage::read_queries(queries_path);
      SearchConfig config;
      config.n_candidates = n_candidates;
      config.max_steps = max_steps;
      config.gen.seed = seed;
      SearchRunResult result =
          run_search(queries, config, *backends.completer, *backends.scorer);
      if (!out_path.empty()) {
        storage::write_traces(out_path, result.traces);
      }
      std::cout << result.report.payload.dump(2) << "\n";
    } else if (report_cmd->parsed()) {
      storage::EvalReport report = storage::read_eval_report(report_path);
      if (report.payload.contains("table")) {
        std::cout << report.payload["table"].get<std::string>();
      } else {
        std::cout << report.payload.dump(2) << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
