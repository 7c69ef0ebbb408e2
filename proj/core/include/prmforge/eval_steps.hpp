#pragma once

/**
 * Step-error localization: predict the first erroneous step from PRM scores
 * (first score under a threshold, default 0.5) and report error-case and
 * correct-case accuracies with their harmonic-mean F1, as percentages
 * rounded to one decimal.
 */

#include <optional>
#include <string>
#include <vector>

namespace prmforge {

struct StepBenchCase {
  std::string query_id;
  std::string problem;
  std::vector<std::string> steps;
  std::optional<std::size_t> gold_first_error;  // absent => all steps correct
  bool answer_correct = false;
};

struct F1Report {
  std::optional<double> error_accuracy;    // percent; absent when no error cases
  std::optional<double> correct_accuracy;  // percent; absent when no correct cases
  std::optional<double> f1;                // percent; absent when either class is empty
  std::size_t n_error_cases = 0;
  std::size_t n_correct_cases = 0;
};

/// First index with score < threshold, or absent when all clear.
std::optional<std::size_t> locate_first_error(const std::vector<double>& step_scores,
                                              double threshold = 0.5);

/// Harmonic mean of two percentages; 0 if either is 0.
double harmonic_mean_f1(double error_accuracy, double correct_accuracy);

/// Round a percentage to one decimal, matching reported table precision.
double round_one_decimal(double value);

F1Report f1_report(const std::vector<std::optional<std::size_t>>& predictions,
                   const std::vector<StepBenchCase>& cases);

/// Accuracy on the subset with a correct final answer but a flawed process.
/// Absent when that subset is empty.
std::optional<double> correct_answer_flawed_process_accuracy(
    const std::vector<std::optional<std::size_t>>& predictions,
    const std::vector<StepBenchCase>& cases);

}  // namespace prmforge
