#include "prmforge/labeling.hpp"

#include <map>

#include "prmforge/errors.hpp"

namespace prmforge {

HardLabelResult hard_labels(const std::vector<double>& estimates, double threshold) {
  if (threshold < 0.0 || threshold >= 1.0) {
    throw Error(ErrorKind::Config, "hard-label threshold must be in [0,1)");
  }
  HardLabelResult result;
  result.labels.reserve(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i] < 0.0 || estimates[i] > 1.0) {
      throw Error(ErrorKind::Precondition, "MC estimate out of [0,1]");
    }
    int label = estimates[i] > threshold ? 1 : 0;
    result.labels.push_back(label);
    if (label == 0 && !result.first_error) result.first_error = i;
  }
  return result;
}

std::vector<double> soft_labels(const std::vector<double>& estimates) {
  for (double e : estimates) {
    if (e < 0.0 || e > 1.0) {
      throw Error(ErrorKind::Precondition, "MC estimate out of [0,1]");
    }
  }
  return estimates;
}

FilterDecision consensus_filter(std::optional<std::size_t> mc_first_error,
                                std::optional<std::size_t> judge_first_error) {
  if (!mc_first_error && !judge_first_error) return FilterDecision::Retain;
  if (mc_first_error && judge_first_error && *mc_first_error == *judge_first_error) {
    return FilterDecision::Retain;
  }
  return FilterDecision::Drop;
}

TruncatedSample truncate_after_error(std::vector<std::string> steps,
                                     std::vector<double> labels,
                                     std::optional<std::size_t> first_error) {
  if (first_error) {
    if (*first_error >= steps.size()) {
      throw Error(ErrorKind::Precondition, "first_error beyond the last step");
    }
    steps.resize(*first_error + 1);
    if (labels.size() > *first_error + 1) labels.resize(*first_error + 1);
  }
  return {std::move(steps), std::move(labels)};
}

namespace {

using Key = std::pair<std::string, int>;

std::optional<std::size_t> mc_first_error_under(const McAnnotation& annotation,
                                                const LabelPolicy& policy) {
  if (policy.kind == LabelKind::Hard) {
    return hard_labels(annotation.estimates, policy.threshold).first_error;
  }
  for (std::size_t i = 0; i < annotation.estimates.size(); ++i) {
    if (annotation.estimates[i] == 0.0) return i;
  }
  return std::nullopt;
}

}  // namespace

DatasetResult build_dataset(const std::vector<SolutionTrace>& traces,
                            const std::vector<McAnnotation>& annotations,
                            const std::vector<JudgeAnnotationRecord>& judge_records,
                            const LabelPolicy& policy, bool filter) {
  std::map<Key, const SolutionTrace*> trace_by_key;
  for (const auto& t : traces) trace_by_key[{t.query_id, t.response_index}] = &t;
  std::map<Key, const JudgeAnnotationRecord*> judge_by_key;
  for (const auto& j : judge_records) judge_by_key[{j.query_id, j.response_index}] = &j;

  std::vector<std::string> orphans;
  DatasetResult result;
  result.stats.total = annotations.size();

  for (const auto& annotation : annotations) {
    Key key{annotation.query_id, annotation.response_index};
    auto tit = trace_by_key.find(key);
    if (tit == trace_by_key.end()) {
      orphans.push_back(key.first + "/" + std::to_string(key.second) + " (no trace)");
      continue;
    }
    const SolutionTrace& trace = *tit->second;

    auto jit = judge_by_key.find(key);
    if (jit != judge_by_key.end() && jit->second->failed()) {
      ++result.stats.judge_failed;
      continue;
    }
    if (filter && jit == judge_by_key.end()) {
      orphans.push_back(key.first + "/" + std::to_string(key.second) + " (no judge verdict)");
      continue;
    }

    auto mc_error = mc_first_error_under(annotation, policy);
    if (filter) {
      if (consensus_filter(mc_error, jit->second->first_error()) == FilterDecision::Drop) {
        ++result.stats.dropped_disagreement;
        continue;
      }
    }

    std::vector<double> labels;
    if (policy.kind == LabelKind::Hard) {
      auto hard = hard_labels(annotation.estimates, policy.threshold);
      labels.assign(hard.labels.begin(), hard.labels.end());
    } else {
      labels = soft_labels(annotation.estimates);
    }

    // The annotation may cover fewer steps than the trace when rollouts
    // halted at the first zero; labels drive the truncation point.
    if (labels.size() > trace.steps.size()) {
      throw Error(ErrorKind::Dataset, "annotation " + key.first + "/" +
                                          std::to_string(key.second) +
                                          " has more estimates than trace steps");
    }
    std::vector<std::string> steps(trace.steps.begin(),
                                   trace.steps.begin() + labels.size());
    auto truncated = truncate_after_error(std::move(steps), std::move(labels), mc_error);

    LabeledSample sample;
    sample.query_id = annotation.query_id;
    sample.response_index = annotation.response_index;
    sample.steps = std::move(truncated.steps);
    sample.labels = std::move(truncated.labels);
    sample.first_error = mc_error;
    sample.provenance = filter ? Provenance::Consensus : Provenance::MC;
    validate_sample(sample, policy);
    result.samples.push_back(std::move(sample));
    ++result.stats.emitted;
  }

  if (!orphans.empty()) {
    std::string message = "build_dataset: orphaned annotations:";
    for (const auto& o : orphans) message += " " + o;
    throw Error(ErrorKind::Dataset, message);
  }
  return result;
}

void validate_sample(const LabeledSample& sample, const LabelPolicy& policy) {
  if (sample.steps.empty() || sample.steps.size() != sample.labels.size()) {
    throw Error(ErrorKind::Dataset, "labeled sample has mismatched steps and labels");
  }
  if (sample.first_error) {
    if (*sample.first_error != sample.steps.size() - 1) {
      throw Error(ErrorKind::Dataset, "first_error is not the last retained step");
    }
    if (sample.labels.back() != 0.0) {
      throw Error(ErrorKind::Dataset, "first_error step does not carry label 0");
    }
  }
  for (std::size_t i = 0; i + 1 < sample.labels.size(); ++i) {
    bool positive = policy.kind == LabelKind::Hard ? sample.labels[i] == 1.0
                                                   : sample.labels[i] > 0.0;
    if (!positive) {
      throw Error(ErrorKind::Dataset, "non-positive label before first_error");
    }
  }
}

}  // namespace prmforge
