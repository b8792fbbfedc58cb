#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topiceval/judgment.hpp"

namespace topiceval {

// Input slots a template may reference. The answer placeholders that close
// each template ("[RATE]", "[WORD LIST]", ...) are part of the template text
// and are sent verbatim.
enum class Slot { kTopicWords, kTopicWords1, kTopicWords2, kDocument, kAnchor };

inline constexpr std::array<Slot, 5> kAllSlots = {Slot::kTopicWords, Slot::kTopicWords1,
                                                  Slot::kTopicWords2, Slot::kDocument, Slot::kAnchor};

std::string_view slot_marker(Slot slot);  // e.g. "[TOPIC WORDS]"

using SlotValues = std::map<Slot, std::string>;

class PromptError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Comma-separated, in rank order.
std::string render_word_list(const std::vector<std::string>& words);

struct RenderedPrompt {
  MetricId template_id = MetricId::kLRate;
  std::string text;
};

// 64-bit content hash of (template id, rendered text, model identifier,
// temperature). Keys the response cache.
std::uint64_t prompt_hash(MetricId template_id, std::string_view rendered,
                          std::string_view model_identifier, double temperature);

// The built-in templates, optionally overridden per template from files.
class PromptLibrary {
 public:
  PromptLibrary();

  const std::string& text(MetricId id) const;
  std::vector<Slot> required_slots(MetricId id) const;

  // Replaces every slot marker in one pass; slot values are never re-scanned.
  // Throws PromptError naming the first missing slot.
  RenderedPrompt render(MetricId id, const SlotValues& slots) const;

  // Inverse of render: identifies which template produced `rendered` and
  // recovers its slot values. Mock judges use this to answer prompts.
  std::optional<std::pair<MetricId, SlotValues>> match(std::string_view rendered) const;

  void set_override(MetricId id, std::string text);
  // Loads "<metric name>.txt" files (e.g. "C_rate.txt") found in `dir`.
  void load_overrides(const std::string& dir);

 private:
  std::map<MetricId, std::string> texts_;
};

// The shipped template text for a metric.
std::string_view builtin_template(MetricId id);

}  // namespace topiceval
