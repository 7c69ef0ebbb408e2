#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "prmforge/errors.hpp"
#include "prmforge/labeling.hpp"

using namespace prmforge;

TEST_CASE("hard labels with the default threshold: any correct completion is positive") {
  auto result = hard_labels({1.0, 0.125, 0.0, 0.5}, 0.0);
  CHECK(result.labels == std::vector<int>{1, 1, 0, 1});
  REQUIRE(result.first_error.has_value());
  CHECK(*result.first_error == 2);
}

TEST_CASE("hard labels compare strictly against the threshold") {
  // an estimate exactly at the threshold is negative
  auto result = hard_labels({0.25, 0.5}, 0.25);
  CHECK(result.labels == std::vector<int>{0, 1});
  CHECK(*result.first_error == 0);
}

TEST_CASE("hard labels without any error") {
  auto result = hard_labels({0.5, 1.0}, 0.0);
  CHECK_FALSE(result.first_error.has_value());
}

TEST_CASE("hard label threshold validation") {
  CHECK_THROWS_AS(hard_labels({0.5}, -0.1), Error);
  CHECK_THROWS_AS(hard_labels({0.5}, 1.0), Error);
  CHECK_THROWS_AS(hard_labels({1.5}, 0.0), Error);
}

TEST_CASE("raising the threshold never flips a label from 0 to 1 (property)") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> estimates;
    for (int i = 0; i < 6; ++i) estimates.push_back(static_cast<double>(rng() % 9) / 8.0);
    std::vector<int> prev;
    for (int t = 0; t < 7; ++t) {
      auto labels = hard_labels(estimates, static_cast<double>(t) / 8.0).labels;
      if (!prev.empty()) {
        for (std::size_t i = 0; i < labels.size(); ++i) CHECK(labels[i] <= prev[i]);
      }
      prev = std::move(labels);
    }
  }
}

TEST_CASE("soft labels are the estimates verbatim") {
  std::vector<double> estimates = {0.0, 0.125, 1.0};
  CHECK(soft_labels(estimates) == estimates);
  CHECK_THROWS_AS(soft_labels({-0.1}), Error);
}

TEST_CASE("consensus filter truth table") {
  CHECK(consensus_filter(std::nullopt, std::nullopt) == FilterDecision::Retain);
  CHECK(consensus_filter(2, 2) == FilterDecision::Retain);
  CHECK(consensus_filter(2, 3) == FilterDecision::Drop);
  CHECK(consensus_filter(2, std::nullopt) == FilterDecision::Drop);
  CHECK(consensus_filter(std::nullopt, 2) == FilterDecision::Drop);
}

TEST_CASE("consensus filter is symmetric (property)") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    auto pick = [&]() -> std::optional<std::size_t> {
      if (rng() % 3 == 0) return std::nullopt;
      return rng() % 5;
    };
    auto a = pick(), b = pick();
    CHECK(consensus_filter(a, b) == consensus_filter(b, a));
  }
}

TEST_CASE("truncate_after_error cuts steps and labels inclusively") {
  auto out = truncate_after_error({"a", "b", "c"}, {1.0, 0.0, 1.0}, 1);
  CHECK(out.steps == std::vector<std::string>{"a", "b"});
  CHECK(out.labels == std::vector<double>{1.0, 0.0});

  auto unchanged = truncate_after_error({"a", "b"}, {1.0, 1.0}, std::nullopt);
  CHECK(unchanged.steps.size() == 2);

  CHECK_THROWS_AS(truncate_after_error({"a"}, {1.0}, 3), Error);
}

namespace {

SolutionTrace trace(const std::string& id, int r, std::vector<std::string> steps) {
  SolutionTrace t;
  t.query_id = id;
  t.response_index = r;
  t.steps = std::move(steps);
  return t;
}

McAnnotation mc(const std::string& id, int r, std::vector<double> estimates) {
  McAnnotation a;
  a.query_id = id;
  a.response_index = r;
  a.estimates = std::move(estimates);
  a.k = 8;
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    if (a.estimates[i] == 0.0) {
      a.first_zero = i;
      break;
    }
  }
  return a;
}

JudgeAnnotationRecord judged(const std::string& id, int r, std::optional<std::size_t> first_error) {
  JudgeAnnotationRecord rec;
  rec.query_id = id;
  rec.response_index = r;
  JudgeVerdict v;
  v.query_id = id;
  v.response_index = r;
  std::size_t analyses = first_error ? *first_error + 1 : 1;
  for (std::size_t i = 0; i < analyses; ++i) v.analyses.push_back("a");
  v.conclusion = first_error ? JudgeConclusion::Incorrect : JudgeConclusion::Correct;
  v.first_error = first_error;
  rec.verdict = std::move(v);
  return rec;
}

JudgeAnnotationRecord judge_failed(const std::string& id, int r) {
  JudgeAnnotationRecord rec;
  rec.query_id = id;
  rec.response_index = r;
  rec.error = "malformed output after retries";
  return rec;
}

}  // namespace

TEST_CASE("build_dataset retains agreements, drops disagreements and judge failures") {
  std::vector<SolutionTrace> traces = {
      trace("q1", 0, {"a", "b", "c"}),   // fully correct, judge agrees
      trace("q1", 1, {"a2", "b2", "c2"}),  // error at 1, judge agrees
      trace("q2", 0, {"x", "y", "z"}),   // error at 1, judge says 2 -> dropped
      trace("q2", 1, {"x2", "y2"}),      // judge failed -> excluded
  };
  std::vector<McAnnotation> annotations = {
      mc("q1", 0, {1.0, 0.5, 0.875}),
      mc("q1", 1, {0.5, 0.0}),
      mc("q2", 0, {0.25, 0.0}),
      mc("q2", 1, {1.0, 1.0}),
  };
  std::vector<JudgeAnnotationRecord> judges = {
      judged("q1", 0, std::nullopt),
      judged("q1", 1, 1),
      judged("q2", 0, 2),
      judge_failed("q2", 1),
  };

  LabelPolicy policy;  // hard, threshold 0
  DatasetResult result = build_dataset(traces, annotations, judges, policy, true);
  CHECK(result.stats.total == 4);
  CHECK(result.stats.emitted == 2);
  CHECK(result.stats.dropped_disagreement == 1);
  CHECK(result.stats.judge_failed == 1);
  CHECK(result.stats.retained_fraction() == doctest::Approx(0.5));

  REQUIRE(result.samples.size() == 2);
  const auto& ok = result.samples[0];
  CHECK(ok.query_id == "q1");
  CHECK(ok.steps.size() == 3);
  CHECK(ok.labels == std::vector<double>{1.0, 1.0, 1.0});
  CHECK_FALSE(ok.first_error.has_value());
  CHECK(ok.provenance == Provenance::Consensus);

  const auto& truncated = result.samples[1];
  CHECK(truncated.steps == std::vector<std::string>{"a2", "b2"});
  CHECK(truncated.labels == std::vector<double>{1.0, 0.0});
  CHECK(*truncated.first_error == 1);
}

TEST_CASE("build_dataset without filtering keeps disagreements but never judge failures") {
  std::vector<SolutionTrace> traces = {
      trace("q1", 0, {"a", "b"}),
      trace("q1", 1, {"c", "d"}),
  };
  std::vector<McAnnotation> annotations = {
      mc("q1", 0, {0.5, 0.0}),
      mc("q1", 1, {1.0, 1.0}),
  };
  std::vector<JudgeAnnotationRecord> judges = {
      judged("q1", 0, std::nullopt),  // disagrees with MC
      judge_failed("q1", 1),
  };
  DatasetResult result = build_dataset(traces, annotations, judges, LabelPolicy{}, false);
  CHECK(result.stats.emitted == 1);
  CHECK(result.stats.judge_failed == 1);
  CHECK(result.samples[0].provenance == Provenance::MC);
}

TEST_CASE("filtered output is a subset of unfiltered output (property)") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SolutionTrace> traces;
    std::vector<McAnnotation> annotations;
    std::vector<JudgeAnnotationRecord> judges;
    int n = 2 + rng() % 6;
    for (int i = 0; i < n; ++i) {
      std::string id = "q" + std::to_string(i);
      std::size_t len = 1 + rng() % 4;
      std::vector<std::string> steps;
      std::vector<double> estimates;
      for (std::size_t s = 0; s < len; ++s) {
        steps.push_back("step" + std::to_string(s));
        estimates.push_back(static_cast<double>(rng() % 9) / 8.0);
      }
      McAnnotation a = mc(id, 0, estimates);
      if (a.first_zero) {
        a.estimates.resize(*a.first_zero + 1);  // halted rollout
      }
      traces.push_back(trace(id, 0, steps));
      annotations.push_back(std::move(a));
      std::optional<std::size_t> judge_err;
      if (rng() % 2) judge_err = rng() % len;
      judges.push_back(judged(id, 0, judge_err));
    }
    auto filtered = build_dataset(traces, annotations, judges, LabelPolicy{}, true);
    auto unfiltered = build_dataset(traces, annotations, judges, LabelPolicy{}, false);
    CHECK(filtered.samples.size() <= unfiltered.samples.size());
    for (const auto& s : filtered.samples) {
      bool found = false;
      for (const auto& u : unfiltered.samples) {
        if (u.query_id == s.query_id && u.response_index == s.response_index &&
            u.steps == s.steps && u.labels == s.labels) {
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("build_dataset rejects orphaned annotations") {
  std::vector<McAnnotation> annotations = {mc("ghost", 0, {1.0})};
  CHECK_THROWS_AS(build_dataset({}, annotations, {}, LabelPolicy{}, false), Error);
}

TEST_CASE("build_dataset requires a judge verdict per sample when filtering") {
  std::vector<SolutionTrace> traces = {trace("q1", 0, {"a"})};
  std::vector<McAnnotation> annotations = {mc("q1", 0, {1.0})};
  CHECK_THROWS_AS(build_dataset(traces, annotations, {}, LabelPolicy{}, true), Error);
}

TEST_CASE("soft policy keeps estimates as labels") {
  std::vector<SolutionTrace> traces = {trace("q1", 0, {"a", "b", "c"})};
  std::vector<McAnnotation> annotations = {mc("q1", 0, {1.0, 0.25, 0.875})};
  std::vector<JudgeAnnotationRecord> judges = {judged("q1", 0, std::nullopt)};
  LabelPolicy policy;
  policy.kind = LabelKind::Soft;
  DatasetResult result = build_dataset(traces, annotations, judges, policy, true);
  REQUIRE(result.samples.size() == 1);
  CHECK(result.samples[0].labels == std::vector<double>{1.0, 0.25, 0.875});
}

TEST_CASE("validate_sample enforces the truncation invariants") {
  LabeledSample s;
  s.query_id = "q";
  s.steps = {"a", "b"};
  s.labels = {1.0, 0.0};
  s.first_error = 1;
  validate_sample(s, LabelPolicy{});  // fine

  s.first_error = 0;
  CHECK_THROWS_AS(validate_sample(s, LabelPolicy{}), Error);

  s.first_error = 1;
  s.labels = {0.0, 0.0};
  CHECK_THROWS_AS(validate_sample(s, LabelPolicy{}), Error);

  s.labels = {1.0};
  CHECK_THROWS_AS(validate_sample(s, LabelPolicy{}), Error);
}
