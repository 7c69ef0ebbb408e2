#pragma once

/**
 * Deterministic mock backends. Outputs are pure functions of (input, seed,
 * sample index), stable across process restarts, so pipelines run offline
 * and byte-identically. Scripted tables take precedence over the generated
 * fallbacks; call logs are kept for instrumented tests.
 */

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "prmforge/backends.hpp"

namespace prmforge {

/// FNV-1a, fixed so mock outputs do not depend on the standard library's hash.
std::uint64_t stable_hash(std::string_view data, std::uint64_t seed = 0);

class MockCompleter : public Completer {
 public:
  explicit MockCompleter(std::uint64_t seed = 0) : seed_(seed) {}

  /// Exact-match script: completions handed out for this prefix, cycled by
  /// sample index.
  void script(std::string prefix, std::vector<std::string> completions);

  /// Convenience: a script of `total` completions for `prefix` of which the
  /// first `correct` reach \boxed{gold} and the rest a wrong answer.
  void script_counted(const std::string& prefix, const std::string& gold,
                      int correct, int total);

  std::vector<std::string> complete(const std::string& prefix,
                                    const GenParams& params) override;

  const std::vector<std::string>& call_log() const { return call_log_; }
  std::size_t sample_calls() const { return sample_calls_; }
  void reset_counters();

 private:
  std::uint64_t seed_;
  std::unordered_map<std::string, std::vector<std::string>> table_;
  std::vector<std::string> call_log_;  // one entry per complete() call
  std::size_t sample_calls_ = 0;       // one per returned sample
};

class MockScorer : public StepScorer {
 public:
  explicit MockScorer(std::uint64_t seed = 0) : seed_(seed) {}

  /// Scores for a whole response, keyed by its steps joined with the
  /// step delimiter (how fixtures address (query_id, response_index)).
  void script_response(const std::vector<std::string>& steps,
                       std::vector<double> scores);

  /// Score for any step with exactly this text (used by search fixtures).
  void script_step(std::string step_text, double score);

  std::vector<double> score_steps(const std::string& problem,
                                  const std::vector<std::string>& steps) override;

  std::size_t calls() const { return calls_; }

 private:
  std::uint64_t seed_;
  std::unordered_map<std::string, std::vector<double>> response_scores_;
  std::unordered_map<std::string, double> step_scores_;
  std::size_t calls_ = 0;
};

class MockJudge : public JudgeBackend {
 public:
  /// Replies consumed in order for calls carrying exactly this prompt.
  void script_for_prompt(const std::string& prompt, std::vector<std::string> replies);
  /// Replies consumed in call order when no prompt-keyed script matches.
  void script_sequence(std::vector<std::string> replies);

  std::string judge(const std::string& prompt) override;

  std::size_t calls() const { return calls_; }

 private:
  std::unordered_map<std::string, std::deque<std::string>> prompt_scripts_;
  std::deque<std::string> sequence_;
  std::size_t calls_ = 0;
};

}  // namespace prmforge
