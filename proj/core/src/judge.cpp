#include "prmforge/judge.hpp"

#include <regex>

#include "prmforge/errors.hpp"

namespace prmforge {

namespace {

const char kTemplateV1[] =
    R"(I will provide a math problem along with a solution. They will be formatted as
follows:

[Math Problem]

<math_problem>
...(math problem)...
</math_problem>

[Solution]

<paragraph_1>
...(paragraph 1 of solution)...
</paragraph_1>

...

<paragraph_n>
...(paragraph n of solution)...
</paragraph_n>

Your task is to review each paragraph of the solution in sequence, analyzing,
verifying, and critiquing the reasoning in detail. You need to provide the
analyses and the conclusion in the following format:

<analysis_1>
...(analysis of paragraph 1)...
</analysis_1>

...

<analysis_n>
...(analysis of paragraph n)...
</analysis_n>

<conclusion>
Correct/Incorrect
</conclusion>


* When you analyze each paragraph, you should use proper verification,
recalculation, or reflection to indicate whether it is logically and
mathematically valid. Please elaborate on the analysis process carefully.

* If an error is detected in any paragraph, you should describe the nature and
cause of the error in detail, and suggest how to correct the error or the correct
approach. Once a paragraph is found to contain any error, stop further analysis
of subsequent paragraphs (as they may depend on the identified error) and directly
provide the conclusion of "Incorrect."

For instance, given a solution of five paragraphs, if an error is found in the
third paragraph, you should reply in the following format:

<analysis_1>
...(analysis of paragraph 1)...
</analysis_1>

<analysis_2>
...(analysis of paragraph 2)...
</analysis_3>

<analysis_3>
...(analysis of paragraph 3; since an error is found here, also provide detailed
critique and correction guideline)...
</analysis_3>

<conclusion>
Incorrect
</conclusion>

Note that the analyses of paragraphs 4 and 5 should be skipped as the paragraph
3 has been found to contain an error.

* Respond with your analyses and conclusion directly.

--------------------------------------------------

The following is the math problem and the solution for you task:

[Math Problem]

{tagged_problem}

[Solution]

{tagged_response}
)";

void replace_once(std::string& text, const std::string& placeholder, const std::string& value) {
  auto pos = text.find(placeholder);
  if (pos == std::string::npos) {
    throw Error(ErrorKind::Config, "judge template is missing " + placeholder);
  }
  text.replace(pos, placeholder.size(), value);
}

void check_injection(const std::string& text, const char* what) {
  static const char* forbidden[] = {"</math_problem>", "</paragraph_", "</analysis_",
                                    "<conclusion>"};
  for (const char* tag : forbidden) {
    if (text.find(tag) != std::string::npos) {
      throw Error(ErrorKind::Precondition,
                  std::string(what) + " contains the reserved tag " + tag);
    }
  }
}

// <analysis_i> ... </analysis_i> with whitespace tolerated inside the tags.
std::optional<std::string> extract_analysis(const std::string& raw, std::size_t index) {
  std::string n = std::to_string(index);
  std::regex open("<\\s*analysis_" + n + "\\s*>");
  std::regex close("<\\s*/\\s*analysis_" + n + "\\s*>");
  std::smatch mo, mc;
  if (!std::regex_search(raw, mo, open)) return std::nullopt;
  std::string rest = mo.suffix().str();
  if (!std::regex_search(rest, mc, close)) return std::nullopt;
  return trim(mc.prefix().str());
}

}  // namespace

const std::string& default_judge_template() {
  static const std::string tmpl(kTemplateV1);
  return tmpl;
}

std::string judge_template_version() { return "v1"; }

std::string render_judge_prompt(const Query& query, const std::vector<std::string>& steps,
                                const std::string& prompt_template) {
  if (steps.empty()) {
    throw Error(ErrorKind::Precondition, "render_judge_prompt: steps must be non-empty");
  }
  check_injection(query.problem, "problem");
  std::string tagged_response;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    check_injection(steps[i], "step");
    std::string n = std::to_string(i + 1);
    if (i) tagged_response += "\n\n";
    tagged_response += "<paragraph_" + n + ">\n" + steps[i] + "\n</paragraph_" + n + ">";
  }
  std::string tagged_problem = "<math_problem>\n" + query.problem + "\n</math_problem>";

  std::string prompt = prompt_template;
  replace_once(prompt, "{tagged_problem}", tagged_problem);
  replace_once(prompt, "{tagged_response}", tagged_response);
  return prompt;
}

JudgeVerdict parse_judge_output(const std::string& raw, std::size_t n_steps) {
  if (n_steps < 1) {
    throw Error(ErrorKind::Precondition, "parse_judge_output: n_steps must be >= 1");
  }
  JudgeVerdict verdict;
  for (std::size_t i = 1;; ++i) {
    auto analysis = extract_analysis(raw, i);
    if (!analysis) break;
    verdict.analyses.push_back(std::move(*analysis));
  }
  if (verdict.analyses.empty()) {
    throw Error(ErrorKind::Parse, "judge output contains no analysis blocks");
  }
  static const std::regex conclusion_re(
      "<\\s*conclusion\\s*>\\s*(Correct|Incorrect)\\s*<\\s*/\\s*conclusion\\s*>");
  std::smatch m;
  if (!std::regex_search(raw, m, conclusion_re)) {
    throw Error(ErrorKind::Parse, "judge output is missing the conclusion block");
  }
  if (m[1] == "Correct") {
    if (verdict.analyses.size() != n_steps) {
      throw Error(ErrorKind::Inconsistency,
                  "conclusion Correct but " + std::to_string(verdict.analyses.size()) +
                      " analyses for " + std::to_string(n_steps) + " steps");
    }
    verdict.conclusion = JudgeConclusion::Correct;
  } else {
    if (verdict.analyses.size() > n_steps) {
      throw Error(ErrorKind::Inconsistency,
                  "conclusion Incorrect but more analyses than steps");
    }
    verdict.conclusion = JudgeConclusion::Incorrect;
    verdict.first_error = verdict.analyses.size() - 1;
  }
  return verdict;
}

std::string render_synthetic_transcript(const JudgeVerdict& verdict) {
  std::string out;
  for (std::size_t i = 0; i < verdict.analyses.size(); ++i) {
    std::string n = std::to_string(i + 1);
    out += "<analysis_" + n + ">\n" + verdict.analyses[i] + "\n</analysis_" + n + ">\n\n";
  }
  out += "<conclusion>\n";
  out += verdict.conclusion == JudgeConclusion::Correct ? "Correct" : "Incorrect";
  out += "\n</conclusion>\n";
  return out;
}

JudgeOutcome annotate_judge(const Query& query, const SolutionTrace& trace,
                            JudgeBackend& backend, int max_retries,
                            const std::string& prompt_template) {
  if (trace.steps.empty()) {
    throw Error(ErrorKind::EmptyTrace, "annotate_judge: trace has no steps");
  }
  std::string prompt = render_judge_prompt(query, trace.steps, prompt_template);
  JudgeOutcome outcome;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    ++outcome.attempts;
    std::string raw = backend.judge(prompt);
    try {
      JudgeVerdict verdict = parse_judge_output(raw, trace.steps.size());
      verdict.query_id = query.id;
      verdict.response_index = trace.response_index;
      outcome.verdict = std::move(verdict);
      outcome.error.clear();
      return outcome;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Parse && e.kind() != ErrorKind::Inconsistency) throw;
      outcome.error = e.what();
    }
  }
  return outcome;  // judge-failed: verdict absent, error set
}

}  // namespace prmforge
