#pragma once

/**
 * Best-of-N evaluation: per-step PRM scores are aggregated into a response
 * score (product, minimum, or last step), the best response per query is
 * selected, and prm@N / maj@N / pass@N are computed. Also carries the
 * minimum-score-at-final-step diagnostic for detecting outcome-shifted PRMs.
 */

#include <cstddef>
#include <string>
#include <vector>

#include "prmforge/core.hpp"

namespace prmforge {

struct ScoredResponse {
  SolutionTrace trace;
  std::vector<double> step_scores;  // one per step, each in [0,1]
  bool is_correct = false;          // answer vs. gold
};

enum class AggregationStrategy { Product, Min, Last };

AggregationStrategy parse_strategy(const std::string& name);
const char* to_string(AggregationStrategy strategy);

/// Product / Min / Last over a non-empty score list.
double aggregate(const std::vector<double>& step_scores, AggregationStrategy strategy);

/// Index of the maximum aggregate score; ties break to the lowest index.
std::size_t select_best(const std::vector<ScoredResponse>& responses,
                        AggregationStrategy strategy);

/// Fraction of queries whose selected response is correct.
double prm_at_n(const std::vector<std::vector<ScoredResponse>>& dataset,
                AggregationStrategy strategy);

/// Majority vote with answers grouped by equivalence; ties go to the group
/// whose first member appears earliest. Responses without a final answer form
/// a group that cannot win.
bool maj_at_n(const std::vector<SolutionTrace>& responses, const std::string& gold);

/// True iff any response's answer matches gold.
bool pass_at_n(const std::vector<SolutionTrace>& responses, const std::string& gold);

/// Fraction of score lists whose last element ties or beats the minimum.
double min_at_last_fraction(const std::vector<std::vector<double>>& score_sets);

}  // namespace prmforge
