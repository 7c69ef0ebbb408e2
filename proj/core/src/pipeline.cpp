#include "prmforge/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "prmforge/errors.hpp"
#include "prmforge/judge.hpp"
#include "prmforge/rollout.hpp"

namespace prmforge {

using storage::json;

namespace {

using Key = std::pair<std::string, int>;

std::map<std::string, const Query*> index_queries(const std::vector<Query>& queries) {
  std::map<std::string, const Query*> by_id;
  for (const auto& q : queries) {
    if (!by_id.emplace(q.id, &q).second) {
      throw Error(ErrorKind::Dataset, "duplicate query id: " + q.id);
    }
  }
  return by_id;
}

}  // namespace

std::vector<SolutionTrace> generate_traces(const std::vector<Query>& queries,
                                           Completer& completer,
                                           const PipelineConfig& config) {
  std::vector<SolutionTrace> traces;
  GenParams params;
  params.seed = config.seed;
  params.n = config.responses_per_query;
  for (const auto& query : queries) {
    std::string prompt = build_completion_prompt(query.problem, {});
    std::vector<std::string> responses = completer.complete(prompt, params);
    for (std::size_t r = 0; r < responses.size(); ++r) {
      SolutionTrace trace;
      trace.query_id = query.id;
      trace.response_index = static_cast<int>(r);
      trace.steps = split_steps(responses[r]);
      trace.final_answer = extract_final_answer(responses[r]);
      trace.generator = "completer";
      traces.push_back(std::move(trace));
    }
  }
  return traces;
}

SynthesizeResult synthesize(const std::vector<Query>& queries,
                            const std::vector<SolutionTrace>& traces,
                            Completer& completer, JudgeBackend& judge_backend,
                            const PipelineConfig& config, bool resume) {
  std::filesystem::create_directories(config.output_dir);
  auto by_id = index_queries(queries);

  SynthesizeResult result;
  result.traces_path = config.output_dir / "traces.jsonl";
  result.mc_path = config.output_dir / "mc_annotations.jsonl";
  result.judge_path = config.output_dir / "judge_verdicts.jsonl";
  result.dataset_path = config.output_dir / "dataset.jsonl";
  result.stats_path = config.output_dir / "filter_stats.json";

  storage::write_traces(result.traces_path, traces);

  // stage: MC rollout annotation, keyed skip on resume
  storage::JsonlAppender mc_appender(result.mc_path, storage::RecordKind::McAnnotation, resume);
  std::set<Key> mc_done;
  std::vector<McAnnotation> annotations;
  for (const auto& j : mc_appender.existing()) {
    McAnnotation a = storage::mc_annotation_from_json(j);
    mc_done.insert({a.query_id, a.response_index});
    annotations.push_back(std::move(a));
  }
  RolloutOptions rollout_options;
  rollout_options.k = config.k;
  rollout_options.halt_at_first_zero = config.halt_at_first_zero;
  rollout_options.gen.seed = config.seed;
  for (const auto& trace : traces) {
    Key key{trace.query_id, trace.response_index};
    if (mc_done.count(key)) continue;
    auto qit = by_id.find(trace.query_id);
    if (qit == by_id.end()) {
      throw Error(ErrorKind::Dataset, "trace references unknown query " + trace.query_id);
    }
    McAnnotation annotation = annotate_mc(*qit->second, trace, completer, rollout_options);
    mc_appender.append(storage::to_json(annotation));
    annotations.push_back(std::move(annotation));
  }

  // stage: LLM-as-a-judge annotation
  storage::JsonlAppender judge_appender(result.judge_path, storage::RecordKind::JudgeVerdict,
                                        resume);
  std::set<Key> judge_done;
  std::vector<JudgeAnnotationRecord> judge_records;
  for (const auto& j : judge_appender.existing()) {
    JudgeAnnotationRecord r = storage::judge_record_from_json(j);
    judge_done.insert({r.query_id, r.response_index});
    judge_records.push_back(std::move(r));
  }
  for (const auto& trace : traces) {
    Key key{trace.query_id, trace.response_index};
    if (judge_done.count(key)) continue;
    const Query& query = *by_id.at(trace.query_id);
    JudgeOutcome outcome = annotate_judge(query, trace, judge_backend, config.judge_retries);
    JudgeAnnotationRecord record;
    record.query_id = trace.query_id;
    record.response_index = trace.response_index;
    record.verdict = outcome.verdict;
    record.error = outcome.error;
    judge_appender.append(storage::to_json(record));
    judge_records.push_back(std::move(record));
  }

  // stage: labels + consensus filter + dataset
  DatasetResult dataset = build_dataset(traces, annotations, judge_records, config.policy,
                                        config.filter);
  storage::write_labeled_samples(result.dataset_path, dataset.samples);

  json stats = {{"total", dataset.stats.total},
                {"emitted", dataset.stats.emitted},
                {"dropped_disagreement", dataset.stats.dropped_disagreement},
                {"judge_failed", dataset.stats.judge_failed},
                {"retained_fraction", dataset.stats.retained_fraction()},
                {"filter", config.filter},
                {"policy", config.policy.kind == LabelKind::Hard ? "hard" : "soft"},
                {"threshold", config.policy.threshold},
                {"k", config.k}};
  {
    std::filesystem::path tmp = result.stats_path;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::trunc);
    out << stats.dump(2) << "\n";
    out.flush();
    if (!out) {
      throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
    out.close();
    std::filesystem::rename(tmp, result.stats_path);
  }

  result.stats = dataset.stats;
  return result;
}

std::string format_metric(double value) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << value * 100.0;
  return os.str();
}

std::string render_table(const std::vector<std::string>& headers,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < widths.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::ostringstream os;
  auto emit_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < widths.size(); ++c) {
      std::string cell = c < cells.size() ? cells[c] : "";
      os << cell << std::string(widths[c] - cell.size(), ' ');
      if (c + 1 < widths.size()) os << "  ";
    }
    os << "\n";
  };
  emit_row(headers);
  std::size_t total = 0;
  for (std::size_t c = 0; c < widths.size(); ++c) total += widths[c] + (c + 1 < widths.size() ? 2 : 0);
  os << std::string(total, '-') << "\n";
  for (const auto& row : rows) emit_row(row);
  return os.str();
}

BonEvalResult eval_bon(const std::vector<Query>& queries,
                       const std::vector<SolutionTrace>& traces, StepScorer& scorer,
                       AggregationStrategy strategy) {
  if (queries.empty() || traces.empty()) {
    throw Error(ErrorKind::Precondition, "eval-bon: queries and traces must be non-empty");
  }
  auto by_id = index_queries(queries);

  // group traces per query, keep query order
  std::map<std::string, std::vector<const SolutionTrace*>> grouped;
  for (const auto& t : traces) {
    if (!by_id.count(t.query_id)) {
      throw Error(ErrorKind::Dataset, "trace references unknown query " + t.query_id);
    }
    grouped[t.query_id].push_back(&t);
  }

  struct Tally {
    std::size_t n = 0, prm = 0, maj = 0, pass = 0;
    std::vector<std::vector<double>> score_sets;
  };
  std::map<std::string, Tally> per_dataset;

  for (const auto& query : queries) {
    auto git = grouped.find(query.id);
    if (git == grouped.end()) continue;
    std::vector<ScoredResponse> responses;
    std::vector<SolutionTrace> plain;
    for (const SolutionTrace* t : git->second) {
      ScoredResponse sr;
      sr.trace = *t;
      sr.step_scores = scorer.score_steps(query.problem, t->steps);
      sr.is_correct = t->final_answer && answers_equal(*t->final_answer, query.gold_answer);
      plain.push_back(*t);
      responses.push_back(std::move(sr));
    }
    Tally& tally = per_dataset[query.source.empty() ? "default" : query.source];
    ++tally.n;
    if (responses[select_best(responses, strategy)].is_correct) ++tally.prm;
    if (maj_at_n(plain, query.gold_answer)) ++tally.maj;
    if (pass_at_n(plain, query.gold_answer)) ++tally.pass;
    for (const auto& r : responses) tally.score_sets.push_back(r.step_scores);
  }

  json datasets = json::object();
  std::vector<std::string> names;
  BonDatasetMetrics average;
  std::size_t total_queries = 0;
  double prm_sum = 0, maj_sum = 0, pass_sum = 0, minlast_sum = 0;
  for (auto& [name, tally] : per_dataset) {
    BonDatasetMetrics m;
    m.n_queries = tally.n;
    m.prm = static_cast<double>(tally.prm) / tally.n;
    m.maj = static_cast<double>(tally.maj) / tally.n;
    m.pass = static_cast<double>(tally.pass) / tally.n;
    m.min_at_last = min_at_last_fraction(tally.score_sets);
    datasets[name] = {{"prm_at_n", m.prm},
                      {"maj_at_n", m.maj},
                      {"pass_at_n", m.pass},
                      {"min_at_last_fraction", m.min_at_last},
                      {"n_queries", m.n_queries}};
    names.push_back(name);
    prm_sum += m.prm;
    maj_sum += m.maj;
    pass_sum += m.pass;
    minlast_sum += m.min_at_last;
    total_queries += tally.n;
  }
  std::size_t d = per_dataset.size();
  average.prm = prm_sum / d;
  average.maj = maj_sum / d;
  average.pass = pass_sum / d;
  average.min_at_last = minlast_sum / d;
  average.n_queries = total_queries;

  BonEvalResult result;
  result.report.task = "eval-bon";
  result.report.payload = {{"strategy", to_string(strategy)},
                           {"datasets", datasets},
                           {"average",
                            {{"prm_at_n", average.prm},
                             {"maj_at_n", average.maj},
                             {"pass_at_n", average.pass},
                             {"min_at_last_fraction", average.min_at_last},
                             {"n_queries", average.n_queries}}}};

  std::vector<std::string> headers = {"Setting"};
  headers.insert(headers.end(), names.begin(), names.end());
  headers.push_back("Avg.");
  std::vector<std::vector<std::string>> rows;
  auto add_row = [&](const std::string& label, const char* field, double avg_value) {
    std::vector<std::string> row = {label};
    for (const auto& name : names) {
      row.push_back(format_metric(datasets[name][field].get<double>()));
    }
    row.push_back(format_metric(avg_value));
    rows.push_back(std::move(row));
  };
  add_row("pass@N (Upper Bound)", "pass_at_n", average.pass);
  add_row("maj@N", "maj_at_n", average.maj);
  add_row(std::string("prm@N (") + to_string(strategy) + ")", "prm_at_n", average.prm);
  add_row("min-at-last", "min_at_last_fraction", average.min_at_last);
  result.table = render_table(headers, rows);
  return result;
}

StepsEvalResult eval_steps(const std::map<std::string, std::vector<StepBenchCase>>& datasets,
                           StepScorer& scorer, double threshold) {
  if (datasets.empty()) {
    throw Error(ErrorKind::Precondition, "eval-steps: no input datasets");
  }
  json per_dataset = json::object();
  std::vector<std::string> names;
  double weighted_f1 = 0;
  std::size_t total_cases = 0;
  std::map<std::string, F1Report> reports;
  for (const auto& [name, cases] : datasets) {
    if (cases.empty()) {
      throw Error(ErrorKind::Precondition, "eval-steps: dataset " + name + " is empty");
    }
    std::vector<std::optional<std::size_t>> predictions;
    predictions.reserve(cases.size());
    for (const auto& c : cases) {
      std::vector<double> scores = scorer.score_steps(c.problem, c.steps);
      predictions.push_back(locate_first_error(scores, threshold));
    }
    F1Report report = f1_report(predictions, cases);
    auto flawed = correct_answer_flawed_process_accuracy(predictions, cases);
    json entry = {{"n_error_cases", report.n_error_cases},
                  {"n_correct_cases", report.n_correct_cases}};
    entry["error_accuracy"] = report.error_accuracy ? json(*report.error_accuracy) : json(nullptr);
    entry["correct_accuracy"] =
        report.correct_accuracy ? json(*report.correct_accuracy) : json(nullptr);
    entry["f1"] = report.f1 ? json(*report.f1) : json(nullptr);
    entry["correct_answer_flawed_process_accuracy"] = flawed ? json(*flawed) : json(nullptr);
    per_dataset[name] = std::move(entry);
    names.push_back(name);
    reports[name] = report;
    if (report.f1) {
      weighted_f1 += *report.f1 * static_cast<double>(cases.size());
    }
    total_cases += cases.size();
  }
  double avg_f1 = total_cases ? weighted_f1 / static_cast<double>(total_cases) : 0.0;

  StepsEvalResult result;
  result.report.task = "eval-steps";
  result.report.payload = {{"threshold", threshold},
                           {"datasets", per_dataset},
                           {"weighted_average_f1", round_one_decimal(avg_f1)}};

  std::vector<std::string> headers = {"Metric"};
  headers.insert(headers.end(), names.begin(), names.end());
  headers.push_back("Avg.");
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << *v;
    return os.str();
  };
  std::vector<std::vector<std::string>> rows(3);
  rows[0] = {"error"};
  rows[1] = {"correct"};
  rows[2] = {"F1"};
  for (const auto& name : names) {
    rows[0].push_back(fmt(reports[name].error_accuracy));
    rows[1].push_back(fmt(reports[name].correct_accuracy));
    rows[2].push_back(fmt(reports[name].f1));
  }
  rows[0].push_back("-");
  rows[1].push_back("-");
  rows[2].push_back(fmt(round_one_decimal(avg_f1)));
  result.table = render_table(headers, rows);
  return result;
}

SearchRunResult run_search(const std::vector<Query>& queries, const SearchConfig& config,
                           Completer& policy, StepScorer& prm) {
  if (queries.empty()) {
    throw Error(ErrorKind::Precondition, "search: queries must be non-empty");
  }
  SearchRunResult result;
  std::size_t answered = 0, correct = 0;
  for (const auto& query : queries) {
    SolutionTrace trace = greedy_search(query, config, policy, prm);
    if (!trace.no_answer) ++answered;
    if (trace.final_answer && answers_equal(*trace.final_answer, query.gold_answer)) ++correct;
    result.traces.push_back(std::move(trace));
  }
  result.report.task = "search";
  result.report.payload = {{"n_candidates", config.n_candidates},
                           {"max_steps", config.max_steps},
                           {"queries", queries.size()},
                           {"answered", answered},
                           {"correct", correct},
                           {"accuracy",
                            static_cast<double>(correct) / static_cast<double>(queries.size())}};
  return result;
}

}  // namespace prmforge
