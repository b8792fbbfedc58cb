#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace topiceval {

// Counting unit: whole documents, or sliding windows of `window` tokens that
// advance one token at a time. A document shorter than the window forms a
// single (partial) window.
struct CountMode {
  enum class Kind { kDocument, kWindow };
  Kind kind = Kind::kDocument;
  std::size_t window = 0;

  static CountMode document() { return {Kind::kDocument, 0}; }
  static CountMode sliding(std::size_t w) { return {Kind::kWindow, w}; }
  std::string describe() const;
};

struct CountOptions {
  int threads = 1;
  // When set, only these words are tracked (other vocabulary tokens still
  // occupy window positions). Keeps pair tables small for large vocabularies.
  std::optional<std::unordered_set<std::string>> targets;
};

// Boolean per-unit counts: a word counts at most once per document/window.
class CooccurrenceCounts {
 public:
  CooccurrenceCounts() = default;
  CooccurrenceCounts(CountMode mode, std::vector<std::string> vocab);

  const CountMode& mode() const noexcept { return mode_; }
  std::uint64_t unit_total() const noexcept { return unit_total_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }

  bool contains(std::string_view word) const;
  std::uint64_t occ(std::string_view word) const;
  // Symmetric; cooc(w, w) == occ(w).
  std::uint64_t cooc(std::string_view a, std::string_view b) const;
  std::size_t pair_entries() const noexcept { return pairs_.size(); }

  void merge(const CooccurrenceCounts& other);

  // Used by the counting routine.
  std::optional<std::uint32_t> id_of(std::string_view word) const;
  void add_unit(const std::vector<std::uint32_t>& distinct_ids);

 private:
  static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  CountMode mode_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::uint64_t> occ_;
  std::unordered_map<std::uint64_t, std::uint64_t> pairs_;
  std::uint64_t unit_total_ = 0;
};

// Throws std::invalid_argument for an empty vocabulary or a window < 2.
CooccurrenceCounts count_cooccurrences(const std::vector<std::vector<std::string>>& docs,
                                       const std::vector<std::string>& vocab, CountMode mode,
                                       const CountOptions& opts = {});

}  // namespace topiceval
