#pragma once

/**
 * JSONL persistence. Every file starts with a header record carrying
 * schema_version and record_kind; every following line is one record of that
 * kind, validated on read with the offending line number attached to errors.
 * Writes go through a temp file + rename so readers never see a torn file.
 */

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "prmforge/core.hpp"
#include "prmforge/eval_steps.hpp"
#include "prmforge/labeling.hpp"
#include "prmforge/rollout.hpp"

namespace prmforge::storage {

using json = nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "1";

enum class RecordKind {
  Query,
  Trace,
  McAnnotation,
  JudgeVerdict,
  LabeledSample,
  StepBenchCase,
  EvalReport,
};

const char* to_string(RecordKind kind);
RecordKind record_kind_from_string(const std::string& name);

/// Free-form metrics bundle (prm@N/maj@N/pass@N, F1 triples, diagnostics).
struct EvalReport {
  std::string task;  // "eval-bon", "eval-steps", "search"
  json payload;
};

// per-kind converters; from_json validates the record's invariants
json to_json(const Query& q);
json to_json(const SolutionTrace& t);
json to_json(const McAnnotation& a);
json to_json(const JudgeAnnotationRecord& r);
json to_json(const LabeledSample& s);
json to_json(const StepBenchCase& c);
json to_json(const EvalReport& r);

Query query_from_json(const json& j);
SolutionTrace trace_from_json(const json& j);
McAnnotation mc_annotation_from_json(const json& j);
JudgeAnnotationRecord judge_record_from_json(const json& j);
LabeledSample labeled_sample_from_json(const json& j);
StepBenchCase step_bench_case_from_json(const json& j);
EvalReport eval_report_from_json(const json& j);

/// Atomic write: header first, then one record per line, temp file + rename.
void write_jsonl(const std::filesystem::path& path, RecordKind kind,
                 const std::vector<json>& records);

/// Read and validate; a partial (torn) final line is an error.
std::vector<json> read_jsonl(const std::filesystem::path& path, RecordKind expected_kind);

/// Lenient variant for resuming: a torn final line is dropped, not an error.
std::vector<json> read_jsonl_resumable(const std::filesystem::path& path,
                                       RecordKind expected_kind);

/// Incremental writer for resumable pipeline stages. Unlike write_jsonl the
/// file grows record by record (each append is flushed); on resume, existing
/// valid records are kept and a torn final line is discarded.
class JsonlAppender {
 public:
  JsonlAppender(std::filesystem::path path, RecordKind kind, bool resume);

  const std::vector<json>& existing() const { return existing_; }
  void append(const json& record);

 private:
  std::filesystem::path path_;
  RecordKind kind_;
  std::vector<json> existing_;
  std::ofstream out_;
};

// typed conveniences
template <typename T, typename FromJson>
std::vector<T> read_records(const std::filesystem::path& path, RecordKind kind,
                            FromJson&& from) {
  std::vector<T> out;
  for (const auto& j : read_jsonl(path, kind)) out.push_back(from(j));
  return out;
}

std::vector<Query> read_queries(const std::filesystem::path& path);
std::vector<SolutionTrace> read_traces(const std::filesystem::path& path);
std::vector<McAnnotation> read_mc_annotations(const std::filesystem::path& path);
std::vector<JudgeAnnotationRecord> read_judge_records(const std::filesystem::path& path);
std::vector<LabeledSample> read_labeled_samples(const std::filesystem::path& path);
std::vector<StepBenchCase> read_step_bench_cases(const std::filesystem::path& path);

void write_queries(const std::filesystem::path& path, const std::vector<Query>& v);
void write_traces(const std::filesystem::path& path, const std::vector<SolutionTrace>& v);
void write_mc_annotations(const std::filesystem::path& path, const std::vector<McAnnotation>& v);
void write_judge_records(const std::filesystem::path& path,
                         const std::vector<JudgeAnnotationRecord>& v);
void write_labeled_samples(const std::filesystem::path& path,
                           const std::vector<LabeledSample>& v);
void write_step_bench_cases(const std::filesystem::path& path,
                            const std::vector<StepBenchCase>& v);
void write_eval_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_eval_report(const std::filesystem::path& path);

}  // namespace prmforge::storage
