#pragma once

/**
 * LLM-as-a-judge annotation: render the critic prompt for a trace, call the
 * judge backend, and parse the tagged verdict into a first-error index or
 * all-correct. The template is versioned; the default ships embedded and as
 * a resource file, and can be overridden per call.
 */

#include <optional>
#include <string>
#include <vector>

#include "prmforge/backends.hpp"
#include "prmforge/core.hpp"

namespace prmforge {

enum class JudgeConclusion { Correct, Incorrect };

struct JudgeVerdict {
  std::string query_id;
  int response_index = 0;
  std::vector<std::string> analyses;  // one per analyzed paragraph
  JudgeConclusion conclusion = JudgeConclusion::Correct;
  std::optional<std::size_t> first_error;  // 0-based step index

  bool operator==(const JudgeVerdict&) const = default;
};

/// Outcome of annotate_judge: either a verdict or a judge-failure record.
struct JudgeOutcome {
  std::optional<JudgeVerdict> verdict;
  int attempts = 0;
  std::string error;  // set when the verdict is absent

  bool failed() const { return !verdict.has_value(); }
};

/// The shipped critic prompt template, with {tagged_problem} and
/// {tagged_response} placeholders.
const std::string& default_judge_template();

std::string judge_template_version();

/// Fill the template: problem wrapped in <math_problem> tags, steps wrapped
/// in 1-based <paragraph_i> tags. Step or problem text containing a literal
/// close tag is rejected (tag injection).
std::string render_judge_prompt(const Query& query, const std::vector<std::string>& steps,
                                const std::string& prompt_template = default_judge_template());

/// Extract <analysis_i> blocks in order plus the <conclusion> block.
/// Incorrect => first_error = number of analyses - 1.
JudgeVerdict parse_judge_output(const std::string& raw, std::size_t n_steps);

/// A well-formed transcript that parses back to exactly this verdict. Used by
/// mock judges and the round-trip property suite.
std::string render_synthetic_transcript(const JudgeVerdict& verdict);

JudgeOutcome annotate_judge(const Query& query, const SolutionTrace& trace,
                            JudgeBackend& backend, int max_retries = 2,
                            const std::string& prompt_template = default_judge_template());

}  // namespace prmforge
