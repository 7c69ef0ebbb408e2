#pragma once

/**
 * PRM-guided greedy step search: at each step, sample n_candidates
 * continuations from the policy model, keep only their first step (the
 * delimiter acts as a stop sequence), score each with the PRM, and extend
 * with the highest-scoring candidate. No backtracking.
 */

#include <string>
#include <vector>

#include "prmforge/backends.hpp"
#include "prmforge/core.hpp"

namespace prmforge {

struct SearchConfig {
  int n_candidates = 8;
  int max_steps = 16;
  GenParams gen;  // defaults: temperature 1.0, top_p 1.0
  bool stop_on_answer = true;
  // Score candidates by the new step's own PRM score (default), or by the
  // product over the whole prefix including it.
  bool score_prefix_product = false;
};

struct GreedyStep {
  std::string step;
  double score = 0.0;
};

GreedyStep greedy_step(const std::string& problem,
                       const std::vector<std::string>& prefix_steps,
                       const SearchConfig& config, Completer& policy, StepScorer& prm);

SolutionTrace greedy_search(const Query& query, const SearchConfig& config,
                            Completer& policy, StepScorer& prm);

}  // namespace prmforge
