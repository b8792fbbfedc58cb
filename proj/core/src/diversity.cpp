#include "topiceval/diversity.hpp"

#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace topiceval {
namespace {

WordLists top_k(const WordLists& topics, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top-k must be > 0");
  WordLists out;
  out.reserve(topics.size());
  for (const auto& t : topics) {
    if (t.size() < k) {
      throw std::invalid_argument("top-k " + std::to_string(k) + " exceeds topic length " +
                                  std::to_string(t.size()));
    }
    out.emplace_back(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

// Number of lists containing each word.
std::unordered_map<std::string, std::size_t> list_counts(const WordLists& lists) {
  std::unordered_map<std::string, std::size_t> cnt;
  for (const auto& l : lists) {
    std::unordered_set<std::string> seen(l.begin(), l.end());
    for (const auto& w : seen) ++cnt[w];
  }
  return cnt;
}

}  // namespace

double topic_diversity_td(const WordLists& topics, std::size_t k) {
  const auto lists = top_k(topics, k);
  if (lists.empty()) return 0.0;
  std::unordered_set<std::string> distinct;
  for (const auto& l : lists) distinct.insert(l.begin(), l.end());
  return static_cast<double>(distinct.size()) / static_cast<double>(lists.size() * k);
}

double topic_uniqueness_tu(const WordLists& topics, std::size_t k) {
  const auto lists = top_k(topics, k);
  if (lists.empty()) return 0.0;
  const auto cnt = list_counts(lists);
  double total = 0.0;
  for (const auto& l : lists) {
    double s = 0.0;
    for (const auto& w : l) s += 1.0 / static_cast<double>(cnt.at(w));
    total += s / static_cast<double>(k);
  }
  return total / static_cast<double>(lists.size());
}

double topic_redundancy_tr(const WordLists& topics, std::size_t k) {
  const auto lists = top_k(topics, k);
  if (lists.size() < 2) return 0.0;
  const auto cnt = list_counts(lists);
  const double others = static_cast<double>(lists.size() - 1);
  double total = 0.0;
  std::size_t slots = 0;
  for (const auto& l : lists) {
    for (const auto& w : l) {
      total += static_cast<double>(cnt.at(w) - 1) / others;
      ++slots;
    }
  }
  return total / static_cast<double>(slots);
}

double rbo(const std::vector<std::string>& a, const std::vector<std::string>& b, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("rbo: p must lie in (0, 1)");
  auto check = [](const std::vector<std::string>& l) {
    std::unordered_set<std::string> seen;
    for (const auto& w : l) {
      if (!seen.insert(w).second) throw std::invalid_argument("rbo: duplicate item '" + w + "' in ranking");
    }
  };
  check(a);
  check(b);
  const std::size_t depth = std::min(a.size(), b.size());
  std::unordered_set<std::string> seen_a;
  std::unordered_set<std::string> seen_b;
  std::size_t overlap = 0;
  double weight = 1.0;  // p^(d-1)
  double sum = 0.0;
  for (std::size_t d = 1; d <= depth; ++d) {
    const auto& x = a[d - 1];
    const auto& y = b[d - 1];
    if (x == y) {
      ++overlap;
    } else {
      if (seen_b.contains(x)) ++overlap;
      if (seen_a.contains(y)) ++overlap;
    }
    seen_a.insert(x);
    seen_b.insert(y);
    sum += weight * static_cast<double>(overlap) / static_cast<double>(d);
    weight *= p;
  }
  return (1.0 - p) * sum;
}

double irbo(const WordLists& topics, std::size_t k, double p) {
  const auto lists = top_k(topics, k);
  if (lists.size() < 2) return 1.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (std::size_t j = i + 1; j < lists.size(); ++j) {
      total += rbo(lists[i], lists[j], p);
      ++pairs;
    }
  }
  return 1.0 - total / static_cast<double>(pairs);
}

}  // namespace topiceval
