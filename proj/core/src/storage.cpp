#include "prmforge/storage.hpp"

#include <cmath>
#include <fstream>

#include "prmforge/errors.hpp"

namespace prmforge::storage {

namespace {

json opt_index(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::size_t> index_opt(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  return j.at(field).get<std::size_t>();
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::Dataset, what);
}

}  // namespace

const char* to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Query: return "Query";
    case RecordKind::Trace: return "Trace";
    case RecordKind::McAnnotation: return "McAnnotation";
    case RecordKind::JudgeVerdict: return "JudgeVerdict";
    case RecordKind::LabeledSample: return "LabeledSample";
    case RecordKind::StepBenchCase: return "StepBenchCase";
    case RecordKind::EvalReport: return "EvalReport";
  }
  return "unknown";
}

RecordKind record_kind_from_string(const std::string& name) {
  for (RecordKind k : {RecordKind::Query, RecordKind::Trace, RecordKind::McAnnotation,
                       RecordKind::JudgeVerdict, RecordKind::LabeledSample,
                       RecordKind::StepBenchCase, RecordKind::EvalReport}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::Dataset, "unknown record kind: " + name);
}

json to_json(const Query& q) {
  return {{"id", q.id}, {"problem", q.problem}, {"gold_answer", q.gold_answer},
          {"source", q.source}};
}

Query query_from_json(const json& j) {
  Query q{j.at("id").get<std::string>(), j.at("problem").get<std::string>(),
          j.at("gold_answer").get<std::string>(), j.value("source", std::string())};
  if (q.id.empty()) invalid("query id must be non-empty");
  if (q.gold_answer.empty()) invalid("query gold_answer must be non-empty");
  return q;
}

json to_json(const SolutionTrace& t) {
  return {{"query_id", t.query_id},
          {"response_index", t.response_index},
          {"steps", t.steps},
          {"final_answer", t.final_answer ? json(*t.final_answer) : json(nullptr)},
          {"generator", t.generator},
          {"no_answer", t.no_answer}};
}

SolutionTrace trace_from_json(const json& j) {
  SolutionTrace t;
  t.query_id = j.at("query_id").get<std::string>();
  t.response_index = j.value("response_index", 0);
  t.steps = j.at("steps").get<std::vector<std::string>>();
  if (j.contains("final_answer") && !j.at("final_answer").is_null()) {
    t.final_answer = j.at("final_answer").get<std::string>();
  }
  t.generator = j.value("generator", std::string());
  t.no_answer = j.value("no_answer", false);
  if (t.steps.empty()) invalid("trace steps must be non-empty");
  for (const auto& s : t.steps) {
    if (s.empty() || trim(s) != s) invalid("trace step must be trimmed and non-empty");
    if (s.find(kStepDelimiter) != std::string::npos) {
      invalid("trace step contains the step delimiter");
    }
  }
  return t;
}

json to_json(const McAnnotation& a) {
  return {{"query_id", a.query_id}, {"response_index", a.response_index},
          {"estimates", a.estimates}, {"k", a.k}, {"first_zero", opt_index(a.first_zero)}};
}

McAnnotation mc_annotation_from_json(const json& j) {
  McAnnotation a;
  a.query_id = j.at("query_id").get<std::string>();
  a.response_index = j.value("response_index", 0);
  a.estimates = j.at("estimates").get<std::vector<double>>();
  a.k = j.at("k").get<int>();
  a.first_zero = index_opt(j, "first_zero");
  if (a.k < 1) invalid("k must be >= 1");
  for (double e : a.estimates) {
    double scaled = e * a.k;
    if (e < 0.0 || e > 1.0 || std::fabs(scaled - std::round(scaled)) > 1e-9) {
      invalid("estimate is not a multiple of 1/k in [0,1]");
    }
  }
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    if (a.estimates[i] == 0.0) {
      if (!a.first_zero || *a.first_zero != i) invalid("first_zero does not mark the first zero");
      break;
    }
  }
  if (a.first_zero && (*a.first_zero >= a.estimates.size() ||
                       a.estimates[*a.first_zero] != 0.0)) {
    invalid("first_zero does not point at a zero estimate");
  }
  return a;
}

json to_json(const JudgeAnnotationRecord& r) {
  json j = {{"query_id", r.query_id}, {"response_index", r.response_index},
            {"failed", r.failed()}, {"error", r.error}};
  if (r.verdict) {
    j["analyses"] = r.verdict->analyses;
    j["conclusion"] = r.verdict->conclusion == JudgeConclusion::Correct ? "Correct" : "Incorrect";
    j["first_error"] = opt_index(r.verdict->first_error);
  }
  return j;
}

JudgeAnnotationRecord judge_record_from_json(const json& j) {
  JudgeAnnotationRecord r;
  r.query_id = j.at("query_id").get<std::string>();
  r.response_index = j.value("response_index", 0);
  r.error = j.value("error", std::string());
  if (!j.value("failed", false)) {
    JudgeVerdict v;
    v.query_id = r.query_id;
    v.response_index = r.response_index;
    v.analyses = j.at("analyses").get<std::vector<std::string>>();
    std::string conclusion = j.at("conclusion").get<std::string>();
    v.conclusion = conclusion == "Correct" ? JudgeConclusion::Correct : JudgeConclusion::Incorrect;
    v.first_error = index_opt(j, "first_error");
    if (v.conclusion == JudgeConclusion::Correct && v.first_error) {
      invalid("Correct verdict must not carry first_error");
    }
    if (v.conclusion == JudgeConclusion::Incorrect &&
        (!v.first_error || *v.first_error + 1 != v.analyses.size())) {
      invalid("Incorrect verdict must have first_error == analyses - 1");
    }
    r.verdict = std::move(v);
  }
  return r;
}

json to_json(const LabeledSample& s) {
  const char* provenance = s.provenance == Provenance::MC       ? "MC"
                           : s.provenance == Provenance::Judge ? "Judge"
                                                               : "Consensus";
  return {{"query_id", s.query_id},  {"response_index", s.response_index},
          {"steps", s.steps},        {"labels", s.labels},
          {"first_error", opt_index(s.first_error)}, {"provenance", provenance}};
}

LabeledSample labeled_sample_from_json(const json& j) {
  LabeledSample s;
  s.query_id = j.at("query_id").get<std::string>();
  s.response_index = j.value("response_index", 0);
  s.steps = j.at("steps").get<std::vector<std::string>>();
  s.labels = j.at("labels").get<std::vector<double>>();
  s.first_error = index_opt(j, "first_error");
  std::string provenance = j.value("provenance", "MC");
  s.provenance = provenance == "MC"      ? Provenance::MC
                 : provenance == "Judge" ? Provenance::Judge
                                         : Provenance::Consensus;
  if (s.steps.empty() || s.steps.size() != s.labels.size()) {
    invalid("labeled sample steps/labels size mismatch");
  }
  if (s.first_error && *s.first_error != s.steps.size() - 1) {
    invalid("labeled sample first_error is not the last step");
  }
  return s;
}

json to_json(const StepBenchCase& c) {
  return {{"id", c.query_id},
          {"problem", c.problem},
          {"steps", c.steps},
          {"label", c.gold_first_error ? static_cast<long long>(*c.gold_first_error) : -1},
          {"answer_correct", c.answer_correct}};
}

StepBenchCase step_bench_case_from_json(const json& j) {
  StepBenchCase c;
  c.query_id = j.at("id").get<std::string>();
  c.problem = j.value("problem", std::string());
  c.steps = j.at("steps").get<std::vector<std::string>>();
  long long label = j.at("label").get<long long>();
  c.answer_correct = j.value("answer_correct", false);
  if (c.steps.empty()) invalid("bench case steps must be non-empty");
  if (label >= 0) {
    if (static_cast<std::size_t>(label) >= c.steps.size()) {
      invalid("bench case label beyond the last step");
    }
    c.gold_first_error = static_cast<std::size_t>(label);
  } else if (label != -1) {
    invalid("bench case label must be -1 or a step index");
  }
  return c;
}

json to_json(const EvalReport& r) {
  return {{"task", r.task}, {"payload", r.payload}};
}

EvalReport eval_report_from_json(const json& j) {
  EvalReport r;
  r.task = j.at("task").get<std::string>();
  r.payload = j.at("payload");
  return r;
}

namespace {

void validate_record(RecordKind kind, const json& j) {
  switch (kind) {
    case RecordKind::Query: query_from_json(j); break;
    case RecordKind::Trace: trace_from_json(j); break;
    case RecordKind::McAnnotation: mc_annotation_from_json(j); break;
    case RecordKind::JudgeVerdict: judge_record_from_json(j); break;
    case RecordKind::LabeledSample: labeled_sample_from_json(j); break;
    case RecordKind::StepBenchCase: step_bench_case_from_json(j); break;
    case RecordKind::EvalReport: eval_report_from_json(j); break;
  }
}

std::vector<json> read_jsonl_impl(const std::filesystem::path& path, RecordKind expected,
                                  bool drop_torn_tail) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  bool ended_with_newline = false;
  while (std::getline(in, line)) {
    lines.push_back(line);
    ended_with_newline = in.good() || in.eof();
  }
  if (lines.empty()) {
    throw Error(ErrorKind::Dataset, path.string() + ": missing header record");
  }

  auto parse_line = [&](std::size_t idx) -> json {
    json j = json::parse(lines[idx], nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorKind::Dataset,
                  path.string() + ":" + std::to_string(idx + 1) + ": malformed JSON");
    }
    return j;
  };

  json header = parse_line(0);
  std::string version = header.value("schema_version", std::string());
  if (version != kSchemaVersion) {
    throw Error(ErrorKind::Dataset,
                path.string() + ": unsupported schema_version \"" + version + "\"");
  }
  RecordKind kind = record_kind_from_string(header.value("record_kind", std::string()));
  if (kind != expected) {
    throw Error(ErrorKind::Dataset, path.string() + ": record kind " +
                                        std::string(to_string(kind)) + ", expected " +
                                        to_string(expected));
  }

  std::vector<json> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json j;
    try {
      j = parse_line(i);
      validate_record(kind, j);
    } catch (const Error& e) {
      bool is_tail = i + 1 == lines.size();
      if (drop_torn_tail && is_tail) break;
      throw Error(ErrorKind::Dataset,
                  path.string() + ":" + std::to_string(i + 1) + ": invalid " +
                      std::string(to_string(kind)) + " record: " + e.what());
    }
    out.push_back(std::move(j));
  }
  (void)ended_with_newline;
  return out;
}

}  // namespace

void write_jsonl(const std::filesystem::path& path, RecordKind kind,
                 const std::vector<json>& records) {
  for (const auto& r : records) {
    try {
      validate_record(kind, r);
    } catch (const Error& e) {
      throw Error(ErrorKind::Dataset, path.string() + ": record does not match kind " +
                                          std::string(to_string(kind)) + ": " + e.what());
    }
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
    json header = {{"schema_version", kSchemaVersion}, {"record_kind", to_string(kind)}};
    out << header.dump() << "\n";
    for (const auto& r : records) out << r.dump() << "\n";
    out.flush();
    if (!out) {
      throw Error(ErrorKind::Io, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorKind::Io, "rename to " + path.string() + " failed: " + ec.message());
  }
}

std::vector<json> read_jsonl(const std::filesystem::path& path, RecordKind expected) {
  return read_jsonl_impl(path, expected, false);
}

std::vector<json> read_jsonl_resumable(const std::filesystem::path& path,
                                       RecordKind expected) {
  return read_jsonl_impl(path, expected, true);
}

JsonlAppender::JsonlAppender(std::filesystem::path path, RecordKind kind, bool resume)
    : path_(std::move(path)), kind_(kind) {
  bool exists = std::filesystem::exists(path_);
  if (resume && exists) {
    existing_ = read_jsonl_resumable(path_, kind_);
    // rewrite so any torn tail is gone, then continue appending
    write_jsonl(path_, kind_, existing_);
    out_.open(path_, std::ios::app);
  } else {
    write_jsonl(path_, kind_, {});
    out_.open(path_, std::ios::app);
  }
  if (!out_) {
    throw Error(ErrorKind::Io, "cannot open " + path_.string() + " for append");
  }
}

void JsonlAppender::append(const json& record) {
  validate_record(kind_, record);
  out_ << record.dump() << "\n";
  out_.flush();
  if (!out_) {
    throw Error(ErrorKind::Io, "append failed for " + path_.string());
  }
}

std::vector<Query> read_queries(const std::filesystem::path& path) {
  return read_records<Query>(path, RecordKind::Query, query_from_json);
}
std::vector<SolutionTrace> read_traces(const std::filesystem::path& path) {
  return read_records<SolutionTrace>(path, RecordKind::Trace, trace_from_json);
}
std::vector<McAnnotation> read_mc_annotations(const std::filesystem::path& path) {
  return read_records<McAnnotation>(path, RecordKind::McAnnotation, mc_annotation_from_json);
}
std::vector<JudgeAnnotationRecord> read_judge_records(const std::filesystem::path& path) {
  return read_records<JudgeAnnotationRecord>(path, RecordKind::JudgeVerdict,
                                             judge_record_from_json);
}
std::vector<LabeledSample> read_labeled_samples(const std::filesystem::path& path) {
  return read_records<LabeledSample>(path, RecordKind::LabeledSample, labeled_sample_from_json);
}
std::vector<StepBenchCase> read_step_bench_cases(const std::filesystem::path& path) {
  return read_records<StepBenchCase>(path, RecordKind::StepBenchCase, step_bench_case_from_json);
}

namespace {
template <typename T>
void write_typed(const std::filesystem::path& path, RecordKind kind, const std::vector<T>& v) {
  std::vector<json> records;
  records.reserve(v.size());
  for (const auto& item : v) records.push_back(to_json(item));
  write_jsonl(path, kind, records);
}
}  // namespace

void write_queries(const std::filesystem::path& path, const std::vector<Query>& v) {
  write_typed(path, RecordKind::Query, v);
}
void write_traces(const std::filesystem::path& path, const std::vector<SolutionTrace>& v) {
  write_typed(path, RecordKind::Trace, v);
}
void write_mc_annotations(const std::filesystem::path& path, const std::vector<McAnnotation>& v) {
  write_typed(path, RecordKind::McAnnotation, v);
}
void write_judge_records(const std::filesystem::path& path,
                         const std::vector<JudgeAnnotationRecord>& v) {
  write_typed(path, RecordKind::JudgeVerdict, v);
}
void write_labeled_samples(const std::filesystem::path& path,
                           const std::vector<LabeledSample>& v) {
  write_typed(path, RecordKind::LabeledSample, v);
}
void write_step_bench_cases(const std::filesystem::path& path,
                            const std::vector<StepBenchCase>& v) {
  write_typed(path, RecordKind::StepBenchCase, v);
}
void write_eval_report(const std::filesystem::path& path, const EvalReport& report) {
  write_jsonl(path, RecordKind::EvalReport, {to_json(report)});
}
EvalReport read_eval_report(const std::filesystem::path& path) {
  auto records = read_jsonl(path, RecordKind::EvalReport);
  if (records.empty()) {
    throw Error(ErrorKind::Dataset, path.string() + ": no report record");
  }
  return eval_report_from_json(records.front());
}

}  // namespace prmforge::storage
