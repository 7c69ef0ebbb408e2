#include "prmforge/mock.hpp"

#include <numeric>
#include <sstream>

#include "prmforge/core.hpp"
#include "prmforge/errors.hpp"

namespace prmforge {

std::uint64_t stable_hash(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void MockCompleter::script(std::string prefix, std::vector<std::string> completions) {
  table_[std::move(prefix)] = std::move(completions);
}

void MockCompleter::script_counted(const std::string& prefix, const std::string& gold,
                                   int correct, int total) {
  std::vector<std::string> completions;
  completions.reserve(total);
  for (int i = 0; i < total; ++i) {
    std::ostringstream os;
    if (i < correct) {
      os << "Continuing the solution.\n\nThe answer is \\boxed{" << gold << "}.";
    } else {
      os << "Continuing the solution.\n\nThe answer is \\boxed{__wrong_" << i << "__}.";
    }
    completions.push_back(os.str());
  }
  script(prefix, std::move(completions));
}

std::vector<std::string> MockCompleter::complete(const std::string& prefix,
                                                 const GenParams& params) {
  if (prefix.empty()) {
    throw Error(ErrorKind::Precondition, "complete: prefix must be non-empty");
  }
  if (params.n < 1) {
    throw Error(ErrorKind::Precondition, "complete: n must be >= 1");
  }
  call_log_.push_back(prefix);
  sample_calls_ += static_cast<std::size_t>(params.n);

  std::vector<std::string> out;
  out.reserve(params.n);
  auto it = table_.find(prefix);
  if (it != table_.end() && !it->second.empty()) {
    for (int i = 0; i < params.n; ++i) {
      out.push_back(it->second[i % it->second.size()]);
    }
    return out;
  }
  std::uint64_t seed = params.seed.value_or(seed_);
  for (int i = 0; i < params.n; ++i) {
    std::uint64_t h = stable_hash(prefix, seed + static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ull);
    std::ostringstream os;
    os << "mock completion " << std::hex << h << std::dec
       << "\n\nThe answer is \\boxed{" << (h % 1000) << "}.";
    out.push_back(os.str());
  }
  return out;
}

void MockCompleter::reset_counters() {
  call_log_.clear();
  sample_calls_ = 0;
}

namespace {
std::string join_steps(const std::vector<std::string>& steps) {
  std::string key;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) key += kStepDelimiter;
    key += steps[i];
  }
  return key;
}
}  // namespace

void MockScorer::script_response(const std::vector<std::string>& steps,
                                 std::vector<double> scores) {
  response_scores_[join_steps(steps)] = std::move(scores);
}

void MockScorer::script_step(std::string step_text, double score) {
  step_scores_[std::move(step_text)] = score;
}

std::vector<double> MockScorer::score_steps(const std::string& problem,
                                            const std::vector<std::string>& steps) {
  (void)problem;
  if (steps.empty()) {
    throw Error(ErrorKind::Precondition, "score_steps: steps must be non-empty");
  }
  ++calls_;
  auto it = response_scores_.find(join_steps(steps));
  if (it != response_scores_.end()) {
    if (it->second.size() != steps.size()) {
      throw Error(ErrorKind::Config, "score_steps: scripted score count does not match step count");
    }
    return it->second;
  }
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& step : steps) {
    auto sit = step_scores_.find(step);
    if (sit != step_scores_.end()) {
      out.push_back(sit->second);
    } else {
      std::uint64_t h = stable_hash(step, seed_);
      out.push_back(static_cast<double>(h % 10000) / 9999.0);
    }
  }
  return out;
}

void MockJudge::script_for_prompt(const std::string& prompt, std::vector<std::string> replies) {
  auto& q = prompt_scripts_[prompt];
  for (auto& r : replies) q.push_back(std::move(r));
}

void MockJudge::script_sequence(std::vector<std::string> replies) {
  for (auto& r : replies) sequence_.push_back(std::move(r));
}

std::string MockJudge::judge(const std::string& prompt) {
  if (prompt.empty()) {
    throw Error(ErrorKind::Precondition, "judge: prompt must be non-empty");
  }
  ++calls_;
  auto it = prompt_scripts_.find(prompt);
  if (it != prompt_scripts_.end() && !it->second.empty()) {
    std::string reply = std::move(it->second.front());
    it->second.pop_front();
    return reply;
  }
  if (!sequence_.empty()) {
    std::string reply = std::move(sequence_.front());
    sequence_.pop_front();
    return reply;
  }
  throw Error(ErrorKind::Config, "judge: mock script exhausted");
}

}  // namespace prmforge
