#include "prmforge/fixture.hpp"

#include <fstream>

#include <json.hpp>

#include "prmforge/errors.hpp"
#include "prmforge/judge.hpp"
#include "prmforge/rollout.hpp"

namespace prmforge {

using json = nlohmann::json;

MockFixture MockFixture::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open fixture " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

MockFixture MockFixture::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::Parse, "fixture is not valid JSON");
  }
  MockFixture fixture;
  for (const auto& q : j.at("queries")) {
    FixtureQuery fq;
    fq.query.id = q.at("id").get<std::string>();
    fq.query.problem = q.at("problem").get<std::string>();
    fq.query.gold_answer = q.at("gold_answer").get<std::string>();
    fq.query.source = q.value("source", std::string("mock"));
    for (const auto& r : q.value("responses", json::array())) {
      FixtureResponse fr;
      fr.text = r.at("text").get<std::string>();
      fr.mc_correct = r.value("mc_correct", std::vector<int>{});
      if (r.contains("judge_label") && !r.at("judge_label").is_null()) {
        fr.judge_label = r.at("judge_label").get<int>();
      }
      fr.judge_malformed_times = r.value("judge_malformed_times", 0);
      fr.step_scores = r.value("step_scores", std::vector<double>{});
      fq.responses.push_back(std::move(fr));
    }
    fixture.queries.push_back(std::move(fq));
  }
  return fixture;
}

std::vector<Query> MockFixture::query_list() const {
  std::vector<Query> out;
  out.reserve(queries.size());
  for (const auto& fq : queries) out.push_back(fq.query);
  return out;
}

std::vector<SolutionTrace> MockFixture::traces() const {
  std::vector<SolutionTrace> out;
  for (const auto& fq : queries) {
    for (std::size_t r = 0; r < fq.responses.size(); ++r) {
      SolutionTrace trace;
      trace.query_id = fq.query.id;
      trace.response_index = static_cast<int>(r);
      trace.steps = split_steps(fq.responses[r].text);
      trace.final_answer = extract_final_answer(fq.responses[r].text);
      trace.generator = "fixture";
      out.push_back(std::move(trace));
    }
  }
  return out;
}

void MockFixture::configure(MockCompleter& completer, MockJudge& judge, MockScorer& scorer,
                            int k) const {
  for (const auto& fq : queries) {
    for (const auto& fr : fq.responses) {
      std::vector<std::string> steps = split_steps(fr.text);

      // rollout outcomes per step prefix
      std::vector<std::string> prefix;
      for (std::size_t i = 0; i < steps.size() && i < fr.mc_correct.size(); ++i) {
        prefix.push_back(steps[i]);
        if (fr.mc_correct[i] < 0) continue;  // never rolled out
        completer.script_counted(build_completion_prompt(fq.query.problem, prefix),
                                 fq.query.gold_answer, fr.mc_correct[i], k);
      }

      // judge replies, keyed by the rendered prompt
      if (fr.judge_label) {
        std::vector<std::string> replies;
        for (int m = 0; m < fr.judge_malformed_times; ++m) {
          replies.push_back("the judge rambled without any tags");
        }
        JudgeVerdict verdict;
        std::size_t analyses =
            *fr.judge_label < 0 ? steps.size() : static_cast<std::size_t>(*fr.judge_label) + 1;
        if (analyses > steps.size()) {
          throw Error(ErrorKind::Config, "fixture judge_label beyond the last step");
        }
        for (std::size_t i = 0; i < analyses; ++i) {
          bool is_error = *fr.judge_label >= 0 && i + 1 == analyses;
          verdict.analyses.push_back(is_error
                                         ? "Paragraph " + std::to_string(i + 1) +
                                               " contains an error in the computation."
                                         : "Paragraph " + std::to_string(i + 1) + " is valid.");
        }
        verdict.conclusion =
            *fr.judge_label < 0 ? JudgeConclusion::Correct : JudgeConclusion::Incorrect;
        replies.push_back(render_synthetic_transcript(verdict));
        judge.script_for_prompt(render_judge_prompt(fq.query, steps), std::move(replies));
      }

      if (!fr.step_scores.empty()) {
        scorer.script_response(steps, fr.step_scores);
      }
    }
  }
}

}  // namespace prmforge
