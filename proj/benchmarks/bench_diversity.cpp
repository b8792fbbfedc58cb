#include <benchmark/benchmark.h>

#include "topiceval/diversity.hpp"
#include "topiceval/random.hpp"

using namespace topiceval;

namespace {

WordLists random_topics(std::size_t k, std::size_t pool) {
  Rng rng(3);
  WordLists out;
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<std::string> topic;
    for (auto i : sample_without_replacement(pool, 10, rng)) topic.push_back("v" + std::to_string(i));
    out.push_back(std::move(topic));
  }
  return out;
}

void BM_Rbo(benchmark::State& state) {
  const auto topics = random_topics(2, 30);
  for (auto _ : state) benchmark::DoNotOptimize(rbo(topics[0], topics[1], 0.9));
}
BENCHMARK(BM_Rbo);

void BM_Irbo(benchmark::State& state) {
  const auto topics = random_topics(static_cast<std::size_t>(state.range(0)), 2000);
  for (auto _ : state) benchmark::DoNotOptimize(irbo(topics, 10, 0.9));
}
BENCHMARK(BM_Irbo)->Arg(20)->Arg(100);

void BM_DiversitySet(benchmark::State& state) {
  const auto topics = random_topics(100, 2000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(topic_diversity_td(topics, 10));
    benchmark::DoNotOptimize(topic_uniqueness_tu(topics, 10));
    benchmark::DoNotOptimize(topic_redundancy_tr(topics, 10));
  }
}
BENCHMARK(BM_DiversitySet);

}  // namespace
