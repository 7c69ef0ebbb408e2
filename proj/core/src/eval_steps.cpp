#include "prmforge/eval_steps.hpp"

#include <cmath>

#include "prmforge/errors.hpp"

namespace prmforge {

std::optional<std::size_t> locate_first_error(const std::vector<double>& step_scores,
                                              double threshold) {
  if (step_scores.empty()) {
    throw Error(ErrorKind::Precondition, "locate_first_error: scores must be non-empty");
  }
  if (threshold <= 0.0 || threshold >= 1.0) {
    throw Error(ErrorKind::Config, "localization threshold must be in (0,1)");
  }
  for (std::size_t i = 0; i < step_scores.size(); ++i) {
    if (step_scores[i] < threshold) return i;
  }
  return std::nullopt;
}

double round_one_decimal(double value) {
  return std::round(value * 10.0) / 10.0;
}

double harmonic_mean_f1(double error_accuracy, double correct_accuracy) {
  if (error_accuracy <= 0.0 || correct_accuracy <= 0.0) return 0.0;
  return 2.0 * error_accuracy * correct_accuracy / (error_accuracy + correct_accuracy);
}

F1Report f1_report(const std::vector<std::optional<std::size_t>>& predictions,
                   const std::vector<StepBenchCase>& cases) {
  if (predictions.size() != cases.size()) {
    throw Error(ErrorKind::Precondition, "f1_report: predictions and cases must align");
  }
  std::size_t error_hits = 0, correct_hits = 0;
  F1Report report;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (cases[i].gold_first_error) {
      ++report.n_error_cases;
      if (predictions[i] && *predictions[i] == *cases[i].gold_first_error) ++error_hits;
    } else {
      ++report.n_correct_cases;
      if (!predictions[i]) ++correct_hits;
    }
  }
  if (report.n_error_cases > 0) {
    report.error_accuracy = round_one_decimal(
        100.0 * static_cast<double>(error_hits) / static_cast<double>(report.n_error_cases));
  }
  if (report.n_correct_cases > 0) {
    report.correct_accuracy = round_one_decimal(
        100.0 * static_cast<double>(correct_hits) / static_cast<double>(report.n_correct_cases));
  }
  if (report.error_accuracy && report.correct_accuracy) {
    report.f1 =
        round_one_decimal(harmonic_mean_f1(*report.error_accuracy, *report.correct_accuracy));
  }
  return report;
}

std::optional<double> correct_answer_flawed_process_accuracy(
    const std::vector<std::optional<std::size_t>>& predictions,
    const std::vector<StepBenchCase>& cases) {
  if (predictions.size() != cases.size()) {
    throw Error(ErrorKind::Precondition,
                "correct_answer_flawed_process_accuracy: predictions and cases must align");
  }
  std::size_t total = 0, hits = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (!cases[i].answer_correct || !cases[i].gold_first_error) continue;
    ++total;
    if (predictions[i] && *predictions[i] == *cases[i].gold_first_error) ++hits;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace prmforge
