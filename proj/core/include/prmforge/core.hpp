#pragma once

/**
 * Domain types plus the text primitives every other module leans on:
 * step splitting on the "\n\n" delimiter, answer normalization, and
 * answer equivalence (string match with a numeric fallback).
 */

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prmforge {

inline constexpr std::string_view kStepDelimiter = "\n\n";

struct Query {
  std::string id;
  std::string problem;
  std::string gold_answer;
  std::string source;  // dataset tag, e.g. "gsm8k"
};

struct SolutionTrace {
  std::string query_id;
  int response_index = 0;
  std::vector<std::string> steps;
  std::optional<std::string> final_answer;
  std::string generator;
  bool no_answer = false;  // set by search when max_steps ran out
};

struct Answer {
  std::string raw;
  std::string canonical;
};

/// Split a response on the two-newline delimiter. Segments are trimmed and
/// empty ones dropped. Throws EmptyTrace for all-whitespace input.
std::vector<std::string> split_steps(std::string_view response_text);

/// Strip whitespace, a surrounding \boxed{...}/boxed{...} wrapper, trailing
/// periods; collapse internal whitespace runs. Idempotent.
std::string normalize_answer(std::string_view raw);

/// True iff normalized forms match exactly, or both parse as finite numbers
/// (plain or p/q fractions) equal within 1e-9 relative tolerance.
bool answers_equal(std::string_view a, std::string_view b);

/// Last \boxed{...} expression if present, else the last number in the text.
std::optional<std::string> extract_final_answer(std::string_view text);

std::string trim(std::string_view s);

/// Numeric view of an answer string, when it has one.
std::optional<double> parse_number(std::string_view s);

}  // namespace prmforge
