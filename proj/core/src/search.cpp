#include "prmforge/search.hpp"

#include "prmforge/errors.hpp"
#include "prmforge/eval_bon.hpp"
#include "prmforge/rollout.hpp"

namespace prmforge {

namespace {

// First step of a sampled continuation; the delimiter is the stop sequence.
std::string first_step_of(const std::string& completion) {
  auto pos = completion.find(kStepDelimiter);
  std::string_view head = pos == std::string::npos
                              ? std::string_view(completion)
                              : std::string_view(completion).substr(0, pos);
  return trim(head);
}

bool contains_boxed_answer(const std::string& step) {
  return step.find("boxed{") != std::string::npos;
}

}  // namespace

GreedyStep greedy_step(const std::string& problem,
                       const std::vector<std::string>& prefix_steps,
                       const SearchConfig& config, Completer& policy, StepScorer& prm) {
  if (config.n_candidates < 1) {
    throw Error(ErrorKind::Config, "n_candidates must be >= 1");
  }
  if (static_cast<int>(prefix_steps.size()) >= config.max_steps) {
    throw Error(ErrorKind::Precondition, "greedy_step: prefix already at max_steps");
  }
  GenParams params = config.gen;
  params.n = config.n_candidates;
  std::string prompt = build_completion_prompt(problem, prefix_steps);
  std::vector<std::string> completions = policy.complete(prompt, params);

  GreedyStep best;
  bool found = false;
  for (std::size_t i = 0; i < completions.size(); ++i) {
    std::string candidate = first_step_of(completions[i]);
    if (candidate.empty()) continue;
    std::vector<std::string> extended = prefix_steps;
    extended.push_back(candidate);
    std::vector<double> scores = prm.score_steps(problem, extended);
    double score = config.score_prefix_product
                       ? aggregate(scores, AggregationStrategy::Product)
                       : scores.back();
    if (!found || score > best.score) {  // ties keep the earlier candidate
      best = {std::move(candidate), score};
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorKind::Backend, "greedy_step: all candidates empty after trimming");
  }
  return best;
}

SolutionTrace greedy_search(const Query& query, const SearchConfig& config,
                            Completer& policy, StepScorer& prm) {
  if (config.max_steps < 1) {
    throw Error(ErrorKind::Config, "max_steps must be >= 1");
  }
  SolutionTrace trace;
  trace.query_id = query.id;
  trace.generator = "greedy-search";
  while (static_cast<int>(trace.steps.size()) < config.max_steps) {
    GreedyStep chosen = greedy_step(query.problem, trace.steps, config, policy, prm);
    trace.steps.push_back(chosen.step);
    if (config.stop_on_answer && contains_boxed_answer(trace.steps.back())) {
      trace.final_answer = extract_final_answer(trace.steps.back());
      return trace;
    }
  }
  trace.final_answer = extract_final_answer(trace.steps.back());
  if (!trace.final_answer || !contains_boxed_answer(trace.steps.back())) {
    trace.no_answer = true;
  }
  return trace;
}

}  // namespace prmforge
