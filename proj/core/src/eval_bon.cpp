#include "prmforge/eval_bon.hpp"

#include <algorithm>

#include "prmforge/errors.hpp"

namespace prmforge {

AggregationStrategy parse_strategy(const std::string& name) {
  if (name == "product") return AggregationStrategy::Product;
  if (name == "min") return AggregationStrategy::Min;
  if (name == "last") return AggregationStrategy::Last;
  throw Error(ErrorKind::Config, "unknown aggregation strategy: " + name);
}

const char* to_string(AggregationStrategy strategy) {
  switch (strategy) {
    case AggregationStrategy::Product: return "product";
    case AggregationStrategy::Min: return "min";
    case AggregationStrategy::Last: return "last";
  }
  return "unknown";
}

double aggregate(const std::vector<double>& step_scores, AggregationStrategy strategy) {
  if (step_scores.empty()) {
    throw Error(ErrorKind::Precondition, "aggregate: step_scores must be non-empty");
  }
  switch (strategy) {
    case AggregationStrategy::Product: {
      double product = 1.0;
      for (double s : step_scores) product *= s;
      return product;
    }
    case AggregationStrategy::Min:
      return *std::min_element(step_scores.begin(), step_scores.end());
    case AggregationStrategy::Last:
      return step_scores.back();
  }
  throw Error(ErrorKind::Precondition, "aggregate: invalid strategy");
}

std::size_t select_best(const std::vector<ScoredResponse>& responses,
                        AggregationStrategy strategy) {
  if (responses.empty()) {
    throw Error(ErrorKind::Precondition, "select_best: responses must be non-empty");
  }
  std::size_t best = 0;
  double best_score = aggregate(responses[0].step_scores, strategy);
  for (std::size_t i = 1; i < responses.size(); ++i) {
    double score = aggregate(responses[i].step_scores, strategy);
    if (score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

double prm_at_n(const std::vector<std::vector<ScoredResponse>>& dataset,
                AggregationStrategy strategy) {
  if (dataset.empty()) {
    throw Error(ErrorKind::Precondition, "prm_at_n: dataset must be non-empty");
  }
  std::size_t correct = 0;
  for (const auto& responses : dataset) {
    if (responses[select_best(responses, strategy)].is_correct) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

bool maj_at_n(const std::vector<SolutionTrace>& responses, const std::string& gold) {
  if (responses.empty()) {
    throw Error(ErrorKind::Precondition, "maj_at_n: responses must be non-empty");
  }
  struct Group {
    std::string representative;
    std::size_t count = 0;
    std::size_t first_index = 0;
    bool has_answer = false;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const auto& answer = responses[i].final_answer;
    Group* home = nullptr;
    for (auto& g : groups) {
      if (!g.has_answer) {
        if (!answer) home = &g;
      } else if (answer && answers_equal(g.representative, *answer)) {
        home = &g;
      }
      if (home) break;
    }
    if (!home) {
      groups.push_back({answer.value_or(""), 0, i, answer.has_value()});
      home = &groups.back();
    }
    ++home->count;
  }
  const Group* winner = nullptr;
  for (const auto& g : groups) {
    if (!g.has_answer) continue;  // answerless responses cannot win
    if (!winner || g.count > winner->count ||
        (g.count == winner->count && g.first_index < winner->first_index)) {
      winner = &g;
    }
  }
  return winner != nullptr && answers_equal(winner->representative, gold);
}

bool pass_at_n(const std::vector<SolutionTrace>& responses, const std::string& gold) {
  if (responses.empty()) {
    throw Error(ErrorKind::Precondition, "pass_at_n: responses must be non-empty");
  }
  for (const auto& r : responses) {
    if (r.final_answer && answers_equal(*r.final_answer, gold)) return true;
  }
  return false;
}

double min_at_last_fraction(const std::vector<std::vector<double>>& score_sets) {
  if (score_sets.empty()) {
    throw Error(ErrorKind::Precondition, "min_at_last_fraction: input must be non-empty");
  }
  std::size_t hits = 0;
  for (const auto& scores : score_sets) {
    if (scores.empty()) {
      throw Error(ErrorKind::Precondition, "min_at_last_fraction: empty score list");
    }
    double minimum = *std::min_element(scores.begin(), scores.end());
    if (scores.back() <= minimum) ++hits;  // a tie at the minimum counts
  }
  return static_cast<double>(hits) / static_cast<double>(score_sets.size());
}

}  // namespace prmforge
