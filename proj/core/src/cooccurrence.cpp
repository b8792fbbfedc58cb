#include "topiceval/cooccurrence.hpp"

#include <algorithm>
#include <stdexcept>

#include "topiceval/parallel.hpp"

namespace topiceval {

std::string CountMode::describe() const {
  return kind == Kind::kDocument ? "document" : "window(" + std::to_string(window) + ")";
}

CooccurrenceCounts::CooccurrenceCounts(CountMode mode, std::vector<std::string> vocab)
    : mode_(mode), vocab_(std::move(vocab)), occ_(vocab_.size(), 0) {
  index_.reserve(vocab_.size());
  for (std::uint32_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
}

std::optional<std::uint32_t> CooccurrenceCounts::id_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool CooccurrenceCounts::contains(std::string_view word) const { return id_of(word).has_value(); }

std::uint64_t CooccurrenceCounts::occ(std::string_view word) const {
  const auto id = id_of(word);
  return id ? occ_[*id] : 0;
}

std::uint64_t CooccurrenceCounts::cooc(std::string_view a, std::string_view b) const {
  const auto ia = id_of(a);
  const auto ib = id_of(b);
  if (!ia || !ib) return 0;
  if (*ia == *ib) return occ_[*ia];
  auto it = pairs_.find(key(*ia, *ib));
  return it == pairs_.end() ? 0 : it->second;
}

void CooccurrenceCounts::add_unit(const std::vector<std::uint32_t>& ids) {
  ++unit_total_;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ++occ_[ids[i]];
    for (std::size_t j = i + 1; j < ids.size(); ++j) ++pairs_[key(ids[i], ids[j])];
  }
}

void CooccurrenceCounts::merge(const CooccurrenceCounts& other) {
  if (other.vocab_ != vocab_) throw std::invalid_argument("merge: vocabularies differ");
  unit_total_ += other.unit_total_;
  for (std::size_t i = 0; i < occ_.size(); ++i) occ_[i] += other.occ_[i];
  for (const auto& [k, v] : other.pairs_) pairs_[k] += v;
}

namespace {

constexpr std::uint32_t kUntracked = UINT32_MAX;

// Tracks the distinct tracked ids inside the current window.
class WindowState {
 public:
  explicit WindowState(std::size_t vocab_size) : count_(vocab_size, 0), slot_(vocab_size, 0) {}

  void add(std::uint32_t id) {
    if (id == kUntracked) return;
    if (count_[id]++ == 0) {
      slot_[id] = present_.size();
      present_.push_back(id);
    }
  }

  void remove(std::uint32_t id) {
    if (id == kUntracked) return;
    if (--count_[id] == 0) {
      const auto pos = slot_[id];
      const auto last = present_.back();
      present_[pos] = last;
      slot_[last] = pos;
      present_.pop_back();
    }
  }

  void clear() {
    for (auto id : present_) count_[id] = 0;
    present_.clear();
  }

  const std::vector<std::uint32_t>& present() const { return present_; }

 private:
  std::vector<std::uint32_t> count_;
  std::vector<std::size_t> slot_;
  std::vector<std::uint32_t> present_;
};

void count_document(const std::vector<std::uint32_t>& ids, const CountMode& mode,
                    WindowState& state, std::vector<std::uint32_t>& scratch,
                    CooccurrenceCounts& out) {
  auto emit = [&] {
    scratch = state.present();
    std::sort(scratch.begin(), scratch.end());
    out.add_unit(scratch);
  };
  const std::size_t n = ids.size();
  if (mode.kind == CountMode::Kind::kDocument || n <= mode.window) {
    if (n == 0) return;
    for (auto id : ids) state.add(id);
    emit();
    state.clear();
    return;
  }
  const std::size_t w = mode.window;
  for (std::size_t i = 0; i < w; ++i) state.add(ids[i]);
  emit();
  for (std::size_t start = 1; start + w <= n; ++start) {
    state.remove(ids[start - 1]);
    state.add(ids[start + w - 1]);
    emit();
  }
  state.clear();
}

}  // namespace

CooccurrenceCounts count_cooccurrences(const std::vector<std::vector<std::string>>& docs,
                                       const std::vector<std::string>& vocab, CountMode mode,
                                       const CountOptions& opts) {
  if (vocab.empty()) throw std::invalid_argument("count_cooccurrences: empty vocabulary");
  if (mode.kind == CountMode::Kind::kWindow && mode.window < 2) {
    throw std::invalid_argument("count_cooccurrences: window size must be >= 2");
  }

  const CooccurrenceCounts proto(mode, vocab);
  std::vector<bool> tracked(vocab.size(), true);
  if (opts.targets) {
    for (std::uint32_t i = 0; i < vocab.size(); ++i) tracked[i] = opts.targets->contains(vocab[i]);
  }

  const std::size_t n_chunks = static_cast<std::size_t>(std::max(1, opts.threads));
  std::vector<CooccurrenceCounts> partial(n_chunks, proto);
  parallel_for(n_chunks, opts.threads, [&](std::size_t c) {
    WindowState state(vocab.size());
    std::vector<std::uint32_t> ids;
    std::vector<std::uint32_t> scratch;
    // Contiguous chunks keep each worker's documents in corpus order.
    const std::size_t begin = docs.size() * c / n_chunks;
    const std::size_t end = docs.size() * (c + 1) / n_chunks;
    for (std::size_t d = begin; d < end; ++d) {
      ids.clear();
      for (const auto& tok : docs[d]) {
        const auto id = proto.id_of(tok);
        if (!id) continue;  // out-of-vocabulary tokens are removed before windowing
        ids.push_back(tracked[*id] ? *id : kUntracked);
      }
      count_document(ids, mode, state, scratch, partial[c]);
    }
  });

  CooccurrenceCounts total = std::move(partial[0]);
  for (std::size_t c = 1; c < n_chunks; ++c) total.merge(partial[c]);
  return total;
}

}  // namespace topiceval
