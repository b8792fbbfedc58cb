#include "topiceval/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topiceval {
namespace {

std::vector<std::string> usable_words(const std::vector<std::string>& words,
                                      const CooccurrenceCounts& counts, const char* metric,
                                      Diagnostics* diag) {
  std::vector<std::string> out;
  for (const auto& w : words) {
    if (counts.occ(w) == 0) {
      warn(diag, std::string(metric) + ": topic word '" + w + "' has no occurrences; excluded");
      continue;
    }
    out.push_back(w);
  }
  if (out.size() < 2) {
    warn(diag, std::string(metric) + ": fewer than two usable topic words; score missing");
  }
  return out;
}

double prob(std::uint64_t count, std::uint64_t total) {
  return static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

double pmi_term(double p_ab, double p_a, double p_b) {
  return std::log((p_ab + kPmiEpsilon) / (p_a * p_b));
}

double npmi_term(double p_ab, double p_a, double p_b) {
  // A pair present in every unit is maximally associated; the general formula
  // degenerates to 0/0 there.
  if (p_ab >= 1.0) return 1.0;
  const double value = pmi_term(p_ab, p_a, p_b) / -std::log(p_ab + kPmiEpsilon);
  return std::clamp(value, -1.0, 1.0);
}

std::optional<double> c_umass(const std::vector<std::string>& topic_words,
                              const CooccurrenceCounts& counts, Diagnostics* diag) {
  auto words = usable_words(topic_words, counts, "C_UMass", diag);
  if (words.size() < 2) return std::nullopt;
  // stable: ties keep topic rank order
  std::stable_sort(words.begin(), words.end(), [&](const std::string& a, const std::string& b) {
    return counts.occ(a) > counts.occ(b);
  });
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 1; i < words.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double joint = static_cast<double>(counts.cooc(words[i], words[j]));
      sum += std::log((joint + 1.0) / static_cast<double>(counts.occ(words[j])));
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

namespace {

template <typename Term>
std::optional<double> mean_pair_term(const std::vector<std::string>& topic_words,
                                     const CooccurrenceCounts& counts, const char* metric,
                                     Diagnostics* diag, Term term) {
  const auto words = usable_words(topic_words, counts, metric, diag);
  if (words.size() < 2) return std::nullopt;
  const auto total = counts.unit_total();
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      sum += term(prob(counts.cooc(words[i], words[j]), total), prob(counts.occ(words[i]), total),
                  prob(counts.occ(words[j]), total));
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

}  // namespace

std::optional<double> c_uci(const std::vector<std::string>& topic_words,
                            const CooccurrenceCounts& counts, Diagnostics* diag) {
  return mean_pair_term(topic_words, counts, "C_UCI", diag, pmi_term);
}

std::optional<double> c_npmi(const std::vector<std::string>& topic_words,
                             const CooccurrenceCounts& counts, Diagnostics* diag) {
  return mean_pair_term(topic_words, counts, "C_NPMI", diag, npmi_term);
}

double mean_cosine_to_sum(const std::vector<std::vector<double>>& vectors, Diagnostics* diag) {
  if (vectors.empty()) return 0.0;
  const std::size_t dim = vectors.front().size();
  std::vector<double> sum(dim, 0.0);
  for (const auto& v : vectors) {
    for (std::size_t k = 0; k < dim; ++k) sum[k] += v[k];
  }
  const double sum_norm = std::sqrt(std::inner_product(sum.begin(), sum.end(), sum.begin(), 0.0));
  double total = 0.0;
  for (const auto& v : vectors) {
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm == 0.0 || sum_norm == 0.0) {
      warn(diag, "C_V: zero context vector; cosine term set to 0");
      continue;
    }
    total += std::inner_product(v.begin(), v.end(), sum.begin(), 0.0) / (norm * sum_norm);
  }
  return total / static_cast<double>(vectors.size());
}

std::optional<double> c_v(const std::vector<std::string>& topic_words,
                          const CooccurrenceCounts& counts, Diagnostics* diag) {
  const auto words = usable_words(topic_words, counts, "C_V", diag);
  if (words.size() < 2) return std::nullopt;
  const auto total = counts.unit_total();
  std::vector<std::vector<double>> vectors(words.size(), std::vector<double>(words.size(), 0.0));
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      vectors[i][j] = npmi_term(prob(counts.cooc(words[i], words[j]), total),
                                prob(counts.occ(words[i]), total), prob(counts.occ(words[j]), total));
    }
  }
  return mean_cosine_to_sum(vectors, diag);
}

}  // namespace topiceval
