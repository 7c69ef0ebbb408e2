#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "prmforge/core.hpp"
#include "prmforge/eval_bon.hpp"
#include "prmforge/judge.hpp"
#include "prmforge/labeling.hpp"

using namespace prmforge;

namespace {

std::string make_response(int steps) {
  std::ostringstream os;
  for (int i = 0; i < steps; ++i) {
    if (i) os << "\n\n";
    os << "Step " << i << ": compute an intermediate value " << i * 3 + 1 << ".";
  }
  os << "\n\nThe final answer is \\boxed{42}.";
  return os.str();
}

std::vector<double> random_scores(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(dist(rng));
  return out;
}

}  // namespace

static void BM_SplitSteps(benchmark::State& state) {
  std::string text = make_response(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(split_steps(text));
  }
}
BENCHMARK(BM_SplitSteps)->Arg(8)->Arg(64);

static void BM_NormalizeAnswer(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize_answer("  $\\boxed{ 1,234.5 }$. "));
  }
}
BENCHMARK(BM_NormalizeAnswer);

static void BM_Aggregate(benchmark::State& state) {
  std::mt19937 rng(1);
  auto scores = random_scores(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate(scores, AggregationStrategy::Product));
    benchmark::DoNotOptimize(aggregate(scores, AggregationStrategy::Min));
  }
}
BENCHMARK(BM_Aggregate)->Arg(8)->Arg(64);

static void BM_SelectBest(benchmark::State& state) {
  std::mt19937 rng(2);
  std::vector<ScoredResponse> responses;
  for (int i = 0; i < 8; ++i) {
    ScoredResponse r;
    for (int s = 0; s < 8; ++s) r.trace.steps.push_back("s");
    r.step_scores = random_scores(rng, 8);
    responses.push_back(std::move(r));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_best(responses, AggregationStrategy::Product));
  }
}
BENCHMARK(BM_SelectBest);

static void BM_HardLabels(benchmark::State& state) {
  std::mt19937 rng(3);
  std::vector<double> estimates;
  for (int i = 0; i < 16; ++i) estimates.push_back(static_cast<double>(rng() % 9) / 8.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hard_labels(estimates, 0.0));
  }
}
BENCHMARK(BM_HardLabels);

static void BM_RenderJudgePrompt(benchmark::State& state) {
  Query q;
  q.id = "q";
  q.problem = "A long word problem about rates, times, and distances.";
  q.gold_answer = "42";
  auto steps = split_steps(make_response(8));
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_judge_prompt(q, steps));
  }
}
BENCHMARK(BM_RenderJudgePrompt);

static void BM_ParseJudgeOutput(benchmark::State& state) {
  JudgeVerdict v;
  for (int i = 0; i < 8; ++i) v.analyses.push_back("the paragraph checks out");
  v.conclusion = JudgeConclusion::Correct;
  std::string transcript = render_synthetic_transcript(v);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_judge_output(transcript, 8));
  }
}
BENCHMARK(BM_ParseJudgeOutput);

BENCHMARK_MAIN();
