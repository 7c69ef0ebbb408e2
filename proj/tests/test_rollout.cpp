#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "prmforge/errors.hpp"
#include "prmforge/mock.hpp"
#include "prmforge/rollout.hpp"

using namespace prmforge;

namespace {

Query make_query() {
  Query q;
  q.id = "q1";
  q.problem = "What is 2 + 2?";
  q.gold_answer = "4";
  return q;
}

SolutionTrace make_trace(std::vector<std::string> steps) {
  SolutionTrace t;
  t.query_id = "q1";
  t.response_index = 0;
  t.steps = std::move(steps);
  return t;
}

}  // namespace

TEST_CASE("build_completion_prompt is deterministic and embeds the prefix") {
  std::string p1 = build_completion_prompt("P", {"s1", "s2"});
  std::string p2 = build_completion_prompt("P", {"s1", "s2"});
  CHECK(p1 == p2);
  CHECK(p1.find("P") != std::string::npos);
  CHECK(p1.find("s1\n\ns2") != std::string::npos);
  CHECK(p1 != build_completion_prompt("P", {"s1"}));
}

TEST_CASE("estimate_step counts matching answers over k") {
  MockCompleter completer;
  completer.script_counted("prefix", "4", 3, 8);
  Query q = make_query();
  CHECK(estimate_step(q, "prefix", 8, completer) == doctest::Approx(3.0 / 8.0));
}

TEST_CASE("estimate_step counts unparseable completions as incorrect") {
  MockCompleter completer;
  completer.script("prefix", {"no answer at all, not even digits", "\\boxed{4}"});
  Query q = make_query();
  CHECK(estimate_step(q, "prefix", 2, completer) == doctest::Approx(0.5));
}

TEST_CASE("estimate_step validates k") {
  MockCompleter completer;
  Query q = make_query();
  CHECK_THROWS_AS(estimate_step(q, "prefix", 0, completer), Error);
}

TEST_CASE("annotate_mc estimates each prefix and records first_zero") {
  Query q = make_query();
  SolutionTrace t = make_trace({"a", "b", "c"});
  MockCompleter completer;
  completer.script_counted(build_completion_prompt(q.problem, {"a"}), "4", 8, 8);
  completer.script_counted(build_completion_prompt(q.problem, {"a", "b"}), "4", 0, 8);
  completer.script_counted(build_completion_prompt(q.problem, {"a", "b", "c"}), "4", 8, 8);

  RolloutOptions options;
  options.k = 8;
  McAnnotation ann = annotate_mc(q, t, completer, options);
  REQUIRE(ann.estimates.size() == 2);  // halted at the first zero
  CHECK(ann.estimates[0] == doctest::Approx(1.0));
  CHECK(ann.estimates[1] == doctest::Approx(0.0));
  REQUIRE(ann.first_zero.has_value());
  CHECK(*ann.first_zero == 1);

  // no rollout past the first zero: the 3-step prefix was never queried
  for (const auto& prompt : completer.call_log()) {
    CHECK(prompt != build_completion_prompt(q.problem, {"a", "b", "c"}));
  }
  CHECK(completer.call_log().size() == 2);
  CHECK(completer.sample_calls() == 16);  // k per estimated step
}

TEST_CASE("annotate_mc continues past zero when halting is off") {
  Query q = make_query();
  SolutionTrace t = make_trace({"a", "b", "c"});
  MockCompleter completer;
  completer.script_counted(build_completion_prompt(q.problem, {"a"}), "4", 4, 8);
  completer.script_counted(build_completion_prompt(q.problem, {"a", "b"}), "4", 0, 8);
  completer.script_counted(build_completion_prompt(q.problem, {"a", "b", "c"}), "4", 2, 8);

  RolloutOptions options;
  options.k = 8;
  options.halt_at_first_zero = false;
  McAnnotation ann = annotate_mc(q, t, completer, options);
  REQUIRE(ann.estimates.size() == 3);
  CHECK(ann.estimates[2] == doctest::Approx(0.25));
  CHECK(*ann.first_zero == 1);  // still marks the first zero
}

TEST_CASE("annotate_mc rejects a mismatched trace") {
  Query q = make_query();
  SolutionTrace t = make_trace({"a"});
  t.query_id = "other";
  MockCompleter completer;
  CHECK_THROWS_AS(annotate_mc(q, t, completer), Error);
}

TEST_CASE("annotate_mc rejects an empty trace") {
  Query q = make_query();
  SolutionTrace t;
  t.query_id = "q1";
  MockCompleter completer;
  CHECK_THROWS_AS(annotate_mc(q, t, completer), Error);
}

TEST_CASE("total sample calls equal k times estimated steps (property)") {
  Query q = make_query();
  SolutionTrace t = make_trace({"s1", "s2", "s3", "s4"});
  MockCompleter completer;  // hash fallback answers, mostly wrong
  RolloutOptions options;
  options.k = 8;
  McAnnotation ann = annotate_mc(q, t, completer, options);
  CHECK(completer.sample_calls() == 8 * ann.estimates.size());
  for (double e : ann.estimates) {
    double scaled = e * 8;
    CHECK(scaled == doctest::Approx(std::round(scaled)));  // multiples of 1/k
  }
}

TEST_CASE("mock completer is referentially transparent") {
  MockCompleter a(42), b(42);
  GenParams params;
  params.n = 4;
  CHECK(a.complete("same prefix", params) == b.complete("same prefix", params));
  CHECK(a.complete("same prefix", params) == a.complete("same prefix", params));
}
