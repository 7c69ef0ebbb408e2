#pragma once

/**
 * Mock-backend fixture: one JSON file scripting, per query and response,
 * the per-step MC rollout outcomes, the judge's verdict (or malformed
 * replies), and optional PRM step scores. Loading a fixture configures the
 * three mock backends so a whole pipeline run is deterministic and offline.
 */

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prmforge/core.hpp"
#include "prmforge/mock.hpp"

namespace prmforge {

struct FixtureResponse {
  std::string text;  // raw response; steps come from split_steps
  std::vector<int> mc_correct;  // correct completions (of k) per step
  // Judge script: absent => no judge configured for this response.
  // judge_label -1 => all steps correct, >= 0 => first error at that index.
  std::optional<int> judge_label;
  int judge_malformed_times = 0;  // malformed replies before the valid one
  std::vector<double> step_scores;  // optional PRM scores, one per step
};

struct FixtureQuery {
  Query query;
  std::vector<FixtureResponse> responses;
};

struct MockFixture {
  std::vector<FixtureQuery> queries;

  static MockFixture load(const std::filesystem::path& path);
  static MockFixture from_json_text(const std::string& text);

  std::vector<Query> query_list() const;
  /// Traces parsed from the response texts, response_index per query.
  std::vector<SolutionTrace> traces() const;

  /// Register completer/judge/scorer scripts for every response.
  void configure(MockCompleter& completer, MockJudge& judge, MockScorer& scorer,
                 int k) const;
};

}  // namespace prmforge
