#pragma once

/**
 * End-to-end orchestration behind the CLI subcommands: synthesize (rollout +
 * judge + consensus filter + dataset emit, resumable by (query_id,
 * response_index)), the BoN and step-localization evaluations, and
 * PRM-guided search. Report tables mirror the usual layout: datasets as
 * columns, "Avg." last.
 */

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "prmforge/backends.hpp"
#include "prmforge/eval_bon.hpp"
#include "prmforge/eval_steps.hpp"
#include "prmforge/labeling.hpp"
#include "prmforge/search.hpp"
#include "prmforge/storage.hpp"

namespace prmforge {

struct PipelineConfig {
  int k = 8;                    // completions per step
  int responses_per_query = 8;  // samples when traces are generated, not given
  LabelPolicy policy;
  bool filter = true;
  bool halt_at_first_zero = true;
  std::uint64_t seed = 0;
  int judge_retries = 2;
  std::filesystem::path output_dir;
};

struct SynthesizeResult {
  FilterStats stats;
  std::filesystem::path traces_path;
  std::filesystem::path mc_path;
  std::filesystem::path judge_path;
  std::filesystem::path dataset_path;
  std::filesystem::path stats_path;
};

/// Sample responses_per_query responses per query from the completer and
/// split them into traces.
std::vector<SolutionTrace> generate_traces(const std::vector<Query>& queries,
                                           Completer& completer,
                                           const PipelineConfig& config);

/// Rollout + judge every trace, build the (optionally consensus-filtered)
/// dataset, and persist every stage under output_dir. With resume=true,
/// stage records already on disk are kept and their samples skipped.
SynthesizeResult synthesize(const std::vector<Query>& queries,
                            const std::vector<SolutionTrace>& traces,
                            Completer& completer, JudgeBackend& judge_backend,
                            const PipelineConfig& config, bool resume);

struct BonDatasetMetrics {
  double prm = 0.0;
  double maj = 0.0;
  double pass = 0.0;
  double min_at_last = 0.0;
  std::size_t n_queries = 0;
};

struct BonEvalResult {
  storage::EvalReport report;
  std::string table;  // plain-text, datasets as columns
};

/// Score every trace with the PRM, group responses per query, and compute
/// prm@N / maj@N / pass@N per dataset source plus the min-at-last diagnostic.
BonEvalResult eval_bon(const std::vector<Query>& queries,
                       const std::vector<SolutionTrace>& traces, StepScorer& scorer,
                       AggregationStrategy strategy);

struct StepsEvalResult {
  storage::EvalReport report;
  std::string table;
};

/// One named dataset of bench cases; the CLI maps one input file to one name.
StepsEvalResult eval_steps(const std::map<std::string, std::vector<StepBenchCase>>& datasets,
                           StepScorer& scorer, double threshold);

struct SearchRunResult {
  std::vector<SolutionTrace> traces;
  storage::EvalReport report;
};

SearchRunResult run_search(const std::vector<Query>& queries, const SearchConfig& config,
                           Completer& policy, StepScorer& prm);

/// Fixed-width table: header row, separator, one row per entry.
std::string render_table(const std::vector<std::string>& headers,
                         const std::vector<std::vector<std::string>>& rows);

std::string format_metric(double value);  // percentage with one decimal

}  // namespace prmforge
