#include "prmforge/rollout.hpp"

#include "prmforge/errors.hpp"

namespace prmforge {

std::string build_completion_prompt(const std::string& problem,
                                    const std::vector<std::string>& prefix_steps) {
  std::string prompt = "Solve the following math problem step by step. "
                       "Continue the partial solution below; separate steps with blank lines "
                       "and put the final answer in \\boxed{}.\n\nProblem:\n";
  prompt += problem;
  prompt += "\n\nPartial solution:\n";
  for (std::size_t i = 0; i < prefix_steps.size(); ++i) {
    if (i) prompt += kStepDelimiter;
    prompt += prefix_steps[i];
  }
  return prompt;
}

double estimate_step(const Query& query, const std::string& step_prefix, int k,
                     Completer& completer, const GenParams& gen) {
  if (k < 1) {
    throw Error(ErrorKind::Precondition, "estimate_step: k must be >= 1");
  }
  GenParams params = gen;
  params.n = k;
  std::vector<std::string> completions = completer.complete(step_prefix, params);
  if (static_cast<int>(completions.size()) != k) {
    throw Error(ErrorKind::Protocol,
                "estimate_step: completer returned " + std::to_string(completions.size()) +
                    " completions, expected " + std::to_string(k));
  }
  int correct = 0;
  for (const auto& text : completions) {
    auto answer = extract_final_answer(text);
    if (answer && answers_equal(*answer, query.gold_answer)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(k);
}

McAnnotation annotate_mc(const Query& query, const SolutionTrace& trace,
                         Completer& completer, const RolloutOptions& options) {
  if (trace.query_id != query.id) {
    throw Error(ErrorKind::Precondition, "annotate_mc: trace does not belong to query " + query.id);
  }
  if (trace.steps.empty()) {
    throw Error(ErrorKind::EmptyTrace, "annotate_mc: trace has no steps");
  }
  McAnnotation annotation;
  annotation.query_id = query.id;
  annotation.response_index = trace.response_index;
  annotation.k = options.k;

  std::vector<std::string> prefix;
  prefix.reserve(trace.steps.size());
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    prefix.push_back(trace.steps[i]);
    std::string prompt = build_completion_prompt(query.problem, prefix);
    double estimate = estimate_step(query, prompt, options.k, completer, options.gen);
    annotation.estimates.push_back(estimate);
    if (estimate == 0.0 && !annotation.first_zero) {
      annotation.first_zero = i;
      if (options.halt_at_first_zero) break;
    }
  }
  return annotation;
}

}  // namespace prmforge
