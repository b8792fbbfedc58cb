#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "topiceval/diversity.hpp"
#include "topiceval/random.hpp"

using namespace topiceval;
using namespace topiceval::testing;

namespace {

std::vector<std::string> words(int from, int n = 10) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("w" + std::to_string(from + i));
  return out;
}

WordLists random_topics(Rng& rng, std::size_t k, std::size_t m, std::size_t pool) {
  WordLists out;
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<std::string> topic;
    for (auto i : sample_without_replacement(pool, m, rng)) topic.push_back("v" + std::to_string(i));
    out.push_back(topic);
  }
  return out;
}

// Set-count oracles written from the definitions.
double td_oracle(const WordLists& t, std::size_t k) {
  std::set<std::string> all;
  for (const auto& l : t) all.insert(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(k));
  return static_cast<double>(all.size()) / static_cast<double>(t.size() * k);
}

std::size_t topics_containing(const WordLists& t, std::size_t k, const std::string& w) {
  std::size_t c = 0;
  for (const auto& l : t) c += std::count(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(k), w) > 0;
  return c;
}

double tu_oracle(const WordLists& t, std::size_t k) {
  double total = 0;
  for (const auto& l : t) {
    double s = 0;
    for (std::size_t i = 0; i < k; ++i) s += 1.0 / static_cast<double>(topics_containing(t, k, l[i]));
    total += s / static_cast<double>(k);
  }
  return total / static_cast<double>(t.size());
}

double tr_oracle(const WordLists& t, std::size_t k) {
  double total = 0;
  std::size_t n = 0;
  for (const auto& l : t) {
    for (std::size_t i = 0; i < k; ++i) {
      total += static_cast<double>(topics_containing(t, k, l[i]) - 1) / static_cast<double>(t.size() - 1);
      ++n;
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace

TEST(Diversity, IdenticalTopicsClosedForms) {
  const WordLists t = {words(0), words(0)};
  EXPECT_DOUBLE_EQ(topic_diversity_td(t, 10), 0.5);
  EXPECT_DOUBLE_EQ(topic_uniqueness_tu(t, 10), 0.5);
  EXPECT_DOUBLE_EQ(topic_redundancy_tr(t, 10), 1.0);
}

TEST(Diversity, DisjointTopicsClosedForms) {
  const WordLists t = {words(0), words(10)};
  EXPECT_DOUBLE_EQ(topic_diversity_td(t, 10), 1.0);
  EXPECT_DOUBLE_EQ(topic_uniqueness_tu(t, 10), 1.0);
  EXPECT_DOUBLE_EQ(topic_redundancy_tr(t, 10), 0.0);
  EXPECT_DOUBLE_EQ(irbo(t, 10, 0.9), 1.0);
}

TEST(Rbo, IdenticalListsMatchGeometricSum) {
  const auto a = words(0);
  const double closed = 1.0 - std::pow(0.9, 10);
  EXPECT_NEAR(rbo(a, a, 0.9), closed, 1e-12);
  EXPECT_NEAR(rbo_direct(a, a, 0.9), closed, 1e-12);
  EXPECT_NEAR(irbo({a, a}, 10, 0.9), 1.0 - closed, 1e-12);
}

TEST(Rbo, DisjointIsZero) { EXPECT_DOUBLE_EQ(rbo(words(0), words(10), 0.9), 0.0); }

TEST(Rbo, DuplicateInRankingIsRejected) {
  EXPECT_THROW(rbo({"a", "b", "a"}, {"a", "b", "c"}, 0.9), std::invalid_argument);
  EXPECT_THROW(rbo({"a"}, {"a"}, 1.0), std::invalid_argument);
}

TEST(Rbo, KIdenticalTopicsGiveUniformIrbo) {
  const auto a = words(0);
  EXPECT_NEAR(irbo({a, a, a, a}, 10, 0.9), 1.0 - rbo(a, a, 0.9), 1e-12);
}

TEST(Rbo, RandomListsMatchDirectSummation) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_topics(rng, 2, 10, 18);
    const double p = 0.5 + 0.45 * uniform_unit(rng);
    const double got = rbo(t[0], t[1], p);
    EXPECT_NEAR(got, rbo_direct(t[0], t[1], p), 1e-12);
    EXPECT_NEAR(got, rbo(t[1], t[0], p), 1e-12);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(Diversity, RandomTopicsMatchSetCountOracles) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 5);
    const auto t = random_topics(rng, k, 10, 25);
    const std::size_t top = 5 + uniform_index(rng, 6);
    EXPECT_NEAR(topic_diversity_td(t, top), td_oracle(t, top), 1e-12);
    EXPECT_NEAR(topic_uniqueness_tu(t, top), tu_oracle(t, top), 1e-12);
    EXPECT_NEAR(topic_redundancy_tr(t, top), tr_oracle(t, top), 1e-12);
    const double ib = irbo(t, top, 0.9);
    EXPECT_GE(ib, 0.0);
    EXPECT_LE(ib, 1.0);
    EXPECT_GE(topic_diversity_td(t, top), 0.0);
    EXPECT_LE(topic_diversity_td(t, top), 1.0);

    // Permutation invariance over topic order.
    auto shuffled = t;
    shuffle(shuffled, rng);
    EXPECT_NEAR(topic_diversity_td(shuffled, top), topic_diversity_td(t, top), 1e-12);
    EXPECT_NEAR(topic_uniqueness_tu(shuffled, top), topic_uniqueness_tu(t, top), 1e-12);
    EXPECT_NEAR(topic_redundancy_tr(shuffled, top), topic_redundancy_tr(t, top), 1e-12);
    EXPECT_NEAR(irbo(shuffled, top, 0.9), ib, 1e-12);
  }
}
