#pragma once

/**
 * Monte-Carlo step labeling: for each step prefix of a solution, run k
 * completions and record the fraction that reach the gold answer. By
 * default annotation halts at the first step whose estimate is 0; steps
 * after it are never rolled out.
 */

#include <optional>
#include <string>
#include <vector>

#include "prmforge/backends.hpp"
#include "prmforge/core.hpp"

namespace prmforge {

struct McAnnotation {
  std::string query_id;
  int response_index = 0;
  std::vector<double> estimates;  // one per estimated step, each in {0, 1/k, ..., 1}
  int k = 8;
  std::optional<std::size_t> first_zero;
};

struct RolloutOptions {
  int k = 8;
  bool halt_at_first_zero = true;
  GenParams gen;
};

/// Completion prompt: problem, then the chosen step prefix, asking the model
/// to continue. Deterministic so mocks and fixtures can key on it.
std::string build_completion_prompt(const std::string& problem,
                                    const std::vector<std::string>& prefix_steps);

/// Fraction of k completions whose extracted final answer matches gold.
/// Unparseable completions count as incorrect; the denominator stays k.
double estimate_step(const Query& query, const std::string& step_prefix, int k,
                     Completer& completer, const GenParams& gen = {});

McAnnotation annotate_mc(const Query& query, const SolutionTrace& trace,
                         Completer& completer, const RolloutOptions& options = {});

}  // namespace prmforge
