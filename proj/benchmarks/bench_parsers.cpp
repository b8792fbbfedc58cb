#include <benchmark/benchmark.h>

#include "topiceval/parsers.hpp"

using namespace topiceval;

namespace {

const std::vector<std::string> kRef = {"car", "automobile", "vehicle", "engine", "auto",
                                       "road", "drive", "driver", "motor", "speed"};

void BM_ParseRating(benchmark::State& state) {
  const std::string raw = "The words are mostly related to driving and vehicles.\nThe rate is: 2";
  for (auto _ : state) benchmark::DoNotOptimize(parse_rating(raw));
}
BENCHMARK(BM_ParseRating);

void BM_ParseWordList(benchmark::State& state) {
  const std::string raw = "The semantically inconsistent words are: road, speed\nExplanation: not vehicle parts.";
  for (auto _ : state) benchmark::DoNotOptimize(parse_word_list(raw, &kRef));
}
BENCHMARK(BM_ParseWordList);

void BM_ParsePairList(benchmark::State& state) {
  const std::string raw = "(car, automobile), (car, auto), (motor, engine)";
  for (auto _ : state) benchmark::DoNotOptimize(parse_pair_list(raw, kRef));
}
BENCHMARK(BM_ParsePairList);

}  // namespace
BENCHMARK_MAIN();
