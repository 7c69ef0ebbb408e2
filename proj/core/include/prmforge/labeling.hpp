#pragma once

/**
 * MC estimates -> training labels. Hard labels compare strictly against a
 * threshold (default 0, so "any completion correct" is positive), soft
 * labels are the estimates verbatim. Samples are truncated after the first
 * error and, when filtering is on, retained only when MC and the judge agree
 * on the first-error location.
 */

#include <optional>
#include <string>
#include <vector>

#include "prmforge/core.hpp"
#include "prmforge/judge.hpp"
#include "prmforge/rollout.hpp"

namespace prmforge {

enum class LabelKind { Hard, Soft };

struct LabelPolicy {
  LabelKind kind = LabelKind::Hard;
  double threshold = 0.0;  // Hard only; Soft ignores it
};

enum class Provenance { MC, Judge, Consensus };

struct LabeledSample {
  std::string query_id;
  int response_index = 0;
  std::vector<std::string> steps;   // truncated
  std::vector<double> labels;       // hard in {0,1}; soft in [0,1]
  std::optional<std::size_t> first_error;
  Provenance provenance = Provenance::MC;
};

/// Judge annotation as persisted: a verdict, or a judge-failure record.
struct JudgeAnnotationRecord {
  std::string query_id;
  int response_index = 0;
  std::optional<JudgeVerdict> verdict;
  std::string error;  // set when verdict is absent

  bool failed() const { return !verdict.has_value(); }
  std::optional<std::size_t> first_error() const {
    return verdict ? verdict->first_error : std::nullopt;
  }
};

struct HardLabelResult {
  std::vector<int> labels;  // 0 or 1
  std::optional<std::size_t> first_error;
};

/// label[i] = 1 iff estimates[i] > threshold.
HardLabelResult hard_labels(const std::vector<double>& estimates, double threshold);

/// Identity copy: the soft label is the MC estimate.
std::vector<double> soft_labels(const std::vector<double>& estimates);

enum class FilterDecision { Retain, Drop };

/// Retain iff both absent (both fully correct) or both present and equal.
FilterDecision consensus_filter(std::optional<std::size_t> mc_first_error,
                                std::optional<std::size_t> judge_first_error);

struct TruncatedSample {
  std::vector<std::string> steps;
  std::vector<double> labels;
};

/// Cut steps and labels to first_error+1 inclusive; no error => unchanged.
TruncatedSample truncate_after_error(std::vector<std::string> steps,
                                     std::vector<double> labels,
                                     std::optional<std::size_t> first_error);

struct FilterStats {
  std::size_t total = 0;
  std::size_t emitted = 0;
  std::size_t dropped_disagreement = 0;
  std::size_t judge_failed = 0;

  double retained_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(emitted) / static_cast<double>(total);
  }
};

struct DatasetResult {
  std::vector<LabeledSample> samples;
  FilterStats stats;
};

/// Per sample: labels via policy -> consensus decision (when filter) ->
/// truncation -> emit. Judge-failed samples are always excluded. Inputs are
/// keyed by (query_id, response_index); orphaned annotations are an error.
DatasetResult build_dataset(const std::vector<SolutionTrace>& traces,
                            const std::vector<McAnnotation>& annotations,
                            const std::vector<JudgeAnnotationRecord>& judge_records,
                            const LabelPolicy& policy, bool filter);

/// Throws on any LabeledSample invariant violation.
void validate_sample(const LabeledSample& sample, const LabelPolicy& policy);

}  // namespace prmforge
