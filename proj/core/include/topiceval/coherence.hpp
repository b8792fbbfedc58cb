#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topiceval/cooccurrence.hpp"
#include "topiceval/diagnostics.hpp"

namespace topiceval {

inline constexpr double kPmiEpsilon = 1e-12;

// Topic words whose occurrence count is zero (or which are out of vocabulary)
// are dropped one at a time with a warning. Every score is nullopt when fewer
// than two usable words remain.

// Mean over ordered pairs (j < i, words sorted by descending corpus document
// frequency) of log((D(w_i, w_j) + 1) / D(w_j)). Expects document counts.
std::optional<double> c_umass(const std::vector<std::string>& topic_words,
                              const CooccurrenceCounts& doc_counts, Diagnostics* diag = nullptr);

// Mean over unordered pairs of log((P(a,b) + eps) / (P(a) P(b))).
std::optional<double> c_uci(const std::vector<std::string>& topic_words,
                            const CooccurrenceCounts& window_counts, Diagnostics* diag = nullptr);

// Mean over unordered pairs of PMI(a,b) / -log(P(a,b) + eps).
std::optional<double> c_npmi(const std::vector<std::string>& topic_words,
                             const CooccurrenceCounts& window_counts, Diagnostics* diag = nullptr);

// Single-pair terms, exposed for testing and for C_V.
double pmi_term(double p_ab, double p_a, double p_b);
double npmi_term(double p_ab, double p_a, double p_b);

// One-set segmentation C_V: each word's NPMI vector against all topic words,
// scored by cosine similarity against the topic's summed vector, averaged.
std::optional<double> c_v(const std::vector<std::string>& topic_words,
                          const CooccurrenceCounts& window_counts, Diagnostics* diag = nullptr);

// Mean cosine of each vector against the sum of all vectors. A zero vector
// contributes a cosine of 0.
double mean_cosine_to_sum(const std::vector<std::vector<double>>& vectors,
                          Diagnostics* diag = nullptr);

}  // namespace topiceval
