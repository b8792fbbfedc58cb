#include <benchmark/benchmark.h>

#include "topiceval/coherence.hpp"
#include "topiceval/cooccurrence.hpp"
#include "topiceval/random.hpp"

using namespace topiceval;

namespace {

struct SyntheticCorpus {
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> vocab;
};

// Zipf-ish token draws over a fixed vocabulary.
SyntheticCorpus make_corpus(std::size_t n_docs, std::size_t doc_len, std::size_t vocab_size) {
  SyntheticCorpus c;
  for (std::size_t v = 0; v < vocab_size; ++v) c.vocab.push_back("w" + std::to_string(v));
  Rng rng(1);
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::vector<std::string> doc;
    for (std::size_t t = 0; t < doc_len; ++t) {
      const double u = uniform_unit(rng);
      doc.push_back(c.vocab[static_cast<std::size_t>(u * u * static_cast<double>(vocab_size))]);
    }
    c.docs.push_back(std::move(doc));
  }
  return c;
}

void BM_CountWindows(benchmark::State& state) {
  const auto corpus = make_corpus(2000, 150, 5000);
  CountOptions opts;
  opts.threads = static_cast<int>(state.range(1));
  std::unordered_set<std::string> targets(corpus.vocab.begin(), corpus.vocab.begin() + 100);
  opts.targets = targets;
  for (auto _ : state) {
    auto counts = count_cooccurrences(corpus.docs, corpus.vocab, CountMode::sliding(state.range(0)), opts);
    benchmark::DoNotOptimize(counts.unit_total());
  }
  state.SetItemsProcessed(state.iterations() * 2000 * 150);
}
BENCHMARK(BM_CountWindows)->Args({10, 1})->Args({110, 1})->Args({10, 4})->Unit(benchmark::kMillisecond);

void BM_CountDocuments(benchmark::State& state) {
  const auto corpus = make_corpus(2000, 150, 5000);
  for (auto _ : state) {
    auto counts = count_cooccurrences(corpus.docs, corpus.vocab, CountMode::document());
    benchmark::DoNotOptimize(counts.pair_entries());
  }
}
BENCHMARK(BM_CountDocuments)->Unit(benchmark::kMillisecond);

void BM_CoherenceScores(benchmark::State& state) {
  const auto corpus = make_corpus(1000, 100, 500);
  const auto counts = count_cooccurrences(corpus.docs, corpus.vocab, CountMode::sliding(10));
  const std::vector<std::string> topic(corpus.vocab.begin(), corpus.vocab.begin() + 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(c_npmi(topic, counts));
    benchmark::DoNotOptimize(c_v(topic, counts));
  }
}
BENCHMARK(BM_CoherenceScores);

}  // namespace
