#include "prmforge/core.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <regex>

#include "prmforge/errors.hpp"

namespace prmforge {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// Content of a balanced {...} starting at `open` (index of '{'), or npos pair.
std::optional<std::string> balanced_brace_content(std::string_view s, size_t open) {
  int depth = 0;
  for (size_t i = open; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    else if (s[i] == '}') {
      --depth;
      if (depth == 0) return std::string(s.substr(open + 1, i - open - 1));
    }
  }
  return std::nullopt;
}

const std::regex& number_regex() {
  static const std::regex re(R"([-+]?\d+(?:,\d{3})*(?:\.\d+)?(?:[eE][-+]?\d+)?(?:\s*/\s*[-+]?\d+(?:\.\d+)?)?)");
  return re;
}

}  // namespace

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_steps(std::string_view response_text) {
  if (trim(response_text).empty()) {
    throw Error(ErrorKind::EmptyTrace, "split_steps: input is empty or all whitespace");
  }
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= response_text.size()) {
    size_t next = response_text.find(kStepDelimiter, pos);
    std::string_view seg = next == std::string_view::npos
                               ? response_text.substr(pos)
                               : response_text.substr(pos, next - pos);
    std::string trimmed = trim(seg);
    if (!trimmed.empty()) out.push_back(std::move(trimmed));
    if (next == std::string_view::npos) break;
    pos = next + kStepDelimiter.size();
  }
  return out;
}

std::string normalize_answer(std::string_view raw) {
  std::string s = trim(raw);
  for (bool changed = true; changed;) {
    changed = false;
    // trailing periods
    while (!s.empty() && s.back() == '.') {
      s.pop_back();
      changed = true;
    }
    std::string t = trim(s);
    if (t.size() != s.size()) {
      s = std::move(t);
      changed = true;
    }
    // surrounding $...$
    if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
      s = trim(std::string_view(s).substr(1, s.size() - 2));
      changed = true;
    }
    // boxed{...} wrapper, with or without the backslash
    for (std::string_view prefix : {std::string_view("\\boxed{"), std::string_view("boxed{")}) {
      if (s.rfind(prefix, 0) == 0 && s.back() == '}') {
        auto inner = balanced_brace_content(s, prefix.size() - 1);
        if (inner && prefix.size() - 1 + inner->size() + 2 == s.size()) {
          s = trim(*inner);
          changed = true;
          break;
        }
      }
    }
  }
  // collapse internal whitespace runs
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (is_space(c)) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      in_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::optional<double> parse_number(std::string_view sv) {
  std::string s = trim(sv);
  if (s.empty()) return std::nullopt;
  // thousands separators
  std::string cleaned;
  cleaned.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && i > 0 && i + 1 < s.size() &&
        std::isdigit(static_cast<unsigned char>(s[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      continue;
    }
    cleaned.push_back(s[i]);
  }
  auto parse_plain = [](const std::string& str) -> std::optional<double> {
    if (str.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(str.c_str(), &end);
    if (end != str.c_str() + str.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  };
  size_t slash = cleaned.find('/');
  if (slash != std::string::npos && slash > 0 && slash + 1 < cleaned.size()) {
    auto num = parse_plain(trim(std::string_view(cleaned).substr(0, slash)));
    auto den = parse_plain(trim(std::string_view(cleaned).substr(slash + 1)));
    if (num && den && *den != 0.0) return *num / *den;
    return std::nullopt;
  }
  return parse_plain(cleaned);
}

bool answers_equal(std::string_view a, std::string_view b) {
  std::string na = normalize_answer(a);
  std::string nb = normalize_answer(b);
  if (na == nb) return true;
  auto xa = parse_number(na);
  auto xb = parse_number(nb);
  if (xa && xb) {
    double scale = std::max({1.0, std::fabs(*xa), std::fabs(*xb)});
    return std::fabs(*xa - *xb) <= 1e-9 * scale;
  }
  return false;
}

std::optional<std::string> extract_final_answer(std::string_view text) {
  // last boxed expression wins
  size_t last_boxed = std::string_view::npos;
  for (size_t pos = text.find("boxed{"); pos != std::string_view::npos;
       pos = text.find("boxed{", pos + 1)) {
    last_boxed = pos;
  }
  if (last_boxed != std::string_view::npos) {
    auto inner = balanced_brace_content(text, last_boxed + 5);
    if (inner) return trim(*inner);
  }
  // else the last number anywhere in the text
  std::string s(text);
  auto begin = std::sregex_iterator(s.begin(), s.end(), number_regex());
  auto end = std::sregex_iterator();
  std::optional<std::string> last;
  for (auto it = begin; it != end; ++it) last = it->str();
  return last;
}

}  // namespace prmforge
