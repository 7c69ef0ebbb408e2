#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "prmforge/core.hpp"
#include "prmforge/errors.hpp"

using namespace prmforge;

TEST_CASE("split_steps splits on the blank-line delimiter") {
  auto steps = split_steps("Step one.\n\nStep two.\n\nStep three.");
  REQUIRE(steps.size() == 3);
  CHECK(steps[0] == "Step one.");
  CHECK(steps[2] == "Step three.");
}

TEST_CASE("split_steps trims and drops empty segments") {
  auto steps = split_steps("  a \n\n\n\n b \n\n");
  REQUIRE(steps.size() == 2);
  CHECK(steps[0] == "a");
  CHECK(steps[1] == "b");
}

TEST_CASE("split_steps keeps single newlines inside one step") {
  auto steps = split_steps("line one\nline two\n\nnext step");
  REQUIRE(steps.size() == 2);
  CHECK(steps[0] == "line one\nline two");
}

TEST_CASE("split_steps rejects all-whitespace input") {
  CHECK_THROWS_AS(split_steps("   \n\n \t "), Error);
  try {
    split_steps("");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyTrace);
  }
}

TEST_CASE("split_steps never yields empty or untrimmed segments (property)") {
  std::mt19937 rng(7);
  const char* pieces[] = {"a", "bb", " c ", "\n", "\n\n", "  ", "x\ny", "\n\n\n"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) text += pieces[rng() % 8];
    if (trim(text).empty()) continue;
    for (const auto& s : split_steps(text)) {
      CHECK(!s.empty());
      CHECK(trim(s) == s);
      CHECK(s.find("\n\n") == std::string::npos);
    }
  }
}

TEST_CASE("join then split round-trips clean steps (property)") {
  std::vector<std::string> steps = {"First step", "Second\nstill second", "Third."};
  std::string joined;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (i) joined += "\n\n";
    joined += steps[i];
  }
  CHECK(split_steps(joined) == steps);
}

TEST_CASE("normalize_answer strips wrappers") {
  CHECK(normalize_answer("\\boxed{42}") == "42");
  CHECK(normalize_answer("boxed{42}") == "42");
  CHECK(normalize_answer("$42$") == "42");
  CHECK(normalize_answer(" 42. ") == "42");
  CHECK(normalize_answer("$\\boxed{ 42 }$.") == "42");
  CHECK(normalize_answer("\\boxed{\\frac{1}{2}}") == "\\frac{1}{2}");
}

TEST_CASE("normalize_answer collapses internal whitespace") {
  CHECK(normalize_answer("x  +\t y") == "x + y");
}

TEST_CASE("normalize_answer is idempotent (property)") {
  const char* inputs[] = {"\\boxed{42}", "$x$", " 3.5 ", "boxed{$7$.}", "a  b", "",
                          "\\boxed{boxed{9}}", "1,000", "...", "$ $"};
  for (const char* in : inputs) {
    std::string once = normalize_answer(in);
    CHECK(normalize_answer(once) == once);
  }
}

TEST_CASE("answers_equal on strings and numbers") {
  CHECK(answers_equal("42", "\\boxed{42}"));
  CHECK(answers_equal("0.5", "1/2"));
  CHECK(answers_equal("1,000", "1000"));
  CHECK(answers_equal("x+y", "x+y"));
  CHECK_FALSE(answers_equal("x+y", "y+x"));
  CHECK_FALSE(answers_equal("41", "42"));
  CHECK(answers_equal("1e3", "1000"));
}

TEST_CASE("answers_equal tolerance is relative") {
  CHECK(answers_equal("1000000000", "1000000000.0000001"));
  CHECK_FALSE(answers_equal("1.0", "1.001"));
}

TEST_CASE("answers_equal is reflexive and symmetric (property)") {
  std::mt19937 rng(11);
  std::vector<std::string> pool = {"42", "-3.5", "1/2", "0.5", "x", "\\boxed{7}", "",
                                   "1,234", "7.", "$9$"};
  for (int trial = 0; trial < 200; ++trial) {
    const auto& a = pool[rng() % pool.size()];
    const auto& b = pool[rng() % pool.size()];
    CHECK(answers_equal(a, a));
    CHECK(answers_equal(a, b) == answers_equal(b, a));
  }
}

TEST_CASE("extract_final_answer prefers the last boxed expression") {
  CHECK(*extract_final_answer("\\boxed{1} then \\boxed{2}") == "2");
  CHECK(*extract_final_answer("nested \\boxed{\\frac{1}{2}}") == "\\frac{1}{2}");
}

TEST_CASE("extract_final_answer falls back to the last number") {
  CHECK(*extract_final_answer("we get 3 then 7 and finally 12.") == "12");
  CHECK_FALSE(extract_final_answer("no numbers here").has_value());
}

TEST_CASE("parse_number handles fractions and separators") {
  CHECK(*parse_number("3/4") == doctest::Approx(0.75));
  CHECK(*parse_number("1,234.5") == doctest::Approx(1234.5));
  CHECK(*parse_number("-2e2") == doctest::Approx(-200.0));
  CHECK_FALSE(parse_number("12abc").has_value());
  CHECK_FALSE(parse_number("1/0").has_value());
  CHECK_FALSE(parse_number("").has_value());
}
