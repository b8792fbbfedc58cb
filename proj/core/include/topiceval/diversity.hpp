#pragma once

#include <string>
#include <vector>

namespace topiceval {

using WordLists = std::vector<std::vector<std::string>>;

// All diversity scores consider the top-k words of each list and throw
// std::invalid_argument when k is 0 or exceeds a list's length.

// |distinct words across top-k lists| / (K * k).
double topic_diversity_td(const WordLists& topics, std::size_t k);

// (1/K) sum_t (1/k) sum_{w in top-k(t)} 1/cnt(w), cnt(w) = lists containing w.
double topic_uniqueness_tu(const WordLists& topics, std::size_t k);

// Mean over all (topic, word) slots of (other topics containing the word)/(K-1).
// Defined as 0 for a single topic.
double topic_redundancy_tr(const WordLists& topics, std::size_t k);

// Truncated rank-biased overlap over the shared depth min(|a|, |b|):
//   (1 - p) * sum_{d=1..depth} p^(d-1) * |A_d ∩ B_d| / d
// Throws std::invalid_argument on duplicates within a list or p outside (0,1).
double rbo(const std::vector<std::string>& a, const std::vector<std::string>& b, double p);

// 1 - mean RBO over all unordered topic pairs. Lists are cut to top-k first.
double irbo(const WordLists& topics, std::size_t k, double p);

}  // namespace topiceval
