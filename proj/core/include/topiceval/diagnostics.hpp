#pragma once

#include <mutex>
#include <string>
#include <vector>

namespace topiceval {

// Collects non-fatal warnings raised while computing metrics or parsing
// judge output. Safe to share across worker threads.
class Diagnostics {
 public:
  void warn(std::string message) {
    std::lock_guard lock(mu_);
    warnings_.push_back(std::move(message));
  }

  std::vector<std::string> warnings() const {
    std::lock_guard lock(mu_);
    return warnings_;
  }

  std::size_t count() const {
    std::lock_guard lock(mu_);
    return warnings_.size();
  }

  void clear() {
    std::lock_guard lock(mu_);
    warnings_.clear();
  }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> warnings_;
};

// Null-tolerant helper so callers can pass nullptr when they don't care.
inline void warn(Diagnostics* diag, std::string message) {
  if (diag) diag->warn(std::move(message));
}

}  // namespace topiceval
