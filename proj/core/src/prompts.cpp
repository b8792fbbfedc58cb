#include "topiceval/prompts.hpp"

#include <filesystem>

#include "topiceval/text.hpp"

namespace topiceval {

namespace {

constexpr std::string_view kLRate =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, assess whether the words are "
    "syntactically well-formed, lexically valid, and understandable in isolation. Assign an ordinal "
    "rating from 1 to 3, where 1 indicates serious issues (e.g., malformed tokens, nonwords, vague "
    "terms);\n"
    "2 indicates mostly valid with minor issues;\n"
    "3 indicates clean, readable, and suitable for human interpretation.\n"
    "The rate is: [RATE]";

constexpr std::string_view kLNonword =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, identify words that are garbled "
    "or malformed (e.g., typos, broken strings, random characters) or extremely rare abbreviations "
    "with unclear form or interpretation.\n"
    "Return a comma-separated list of these words or tokens or [ ] if there are none.\n"
    "The invalid words or tokens are: [WORD LIST]";

constexpr std::string_view kAdvNonword =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, identify words that are garbled "
    "or malformed (e.g., typos, broken strings, random characters) or extremely rare abbreviations "
    "with unclear form or interpretation.\n"
    "Return a comma-separated list of these words or tokens or [ ] if there are none.\n"
    "Then, on a new line starting with \"Explanation:\", explain in one sentence why these words or "
    "tokens are lexically invalid.\n"
    "The invalid words or tokens are: [WORD LIST]";

constexpr std::string_view kCRate =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, assess the degree of semantic "
    "consistency among the words in the context of the topic.\n"
    "Assign an ordinal rating from 1 to 3 for coherence, where 1 indicates that the words are mostly "
    "unrelated, and 3 indicates that the words are highly related and form a clear, unified theme.\n"
    "The rate is: [RATE]";

constexpr std::string_view kCOutlier =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, identify the words that do not "
    "semantically belong to the same conceptual theme as the others.\n"
    "Put them into a comma-separated list.\n"
    "The semantically inconsistent words are: [WORD LIST]";

constexpr std::string_view kAdvOutlier =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, identify the words that do not "
    "semantically belong to the same conceptual theme as the others.\n"
    "Put them into a comma-separated list.\n"
    "If all words consistent, reply: No outliers\n"
    "The semantically inconsistent words are: [WORD LIST]";

constexpr std::string_view kRRate =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, evaluate if there are "
    "semantically equivalent words.\n"
    "Assign an ordinal rating from 1 to 3 for repetitiveness, where 1 indicates highly repetitive "
    "with significant semantic overlap, and 3 indicates minimal repetition with diverse and "
    "distinctive words.\n"
    "The rate is: [RATE]";

constexpr std::string_view kRDuplicate =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, identify pairs of words that "
    "refer to the concepts or ideas that are exactly the same (not just related or similar). Provide "
    "each pair as a tuple in a comma-separated list.\n"
    "The word pairs are: [WORD LIST]";

constexpr std::string_view kAdvDuplicate =
    "Given a topic word set [TOPIC WORDS] produced by a topic model, identify pairs of words that "
    "refer to the concepts or ideas that are exactly the same (not just related or similar). Provide "
    "each pair as a tuple in a comma-separated list.\n"
    "The anchor word [ANCHOR] refers to the same concept as another word in the set; pair the anchor "
    "with that word.\n"
    "The word pairs are: [WORD LIST]";

constexpr std::string_view kDRate =
    "Given two groups of topic words: Group 1: [TOPIC WORDS 1], Group 2 [TOPIC WORDS 2], analyze the "
    "themes represented by the two groups.\n"
    "Assign an ordinal rating from 1 to 3 based on the degree of thematic distinctiveness between the "
    "two groups:\n"
    "Rate 1: Partial overlapping themes.\n"
    "Rate 3: Highly distinctive themes.\n"
    "The rate is: [RATE]";

constexpr std::string_view kAIrtw =
    "Given a document: [DOCUMENT] and a topic word set [TOPIC WORDS], identify which topics in the "
    "word list are not relevant to the document.\n"
    "Return these extraneous topics, or [ ] if all topics in the word list are relevant to the "
    "document.\n"
    "Return the extraneous topics list or [ ]: [TOPIC WORDS/[ ]]";

constexpr std::string_view kAMissing =
    "Given a document: [DOCUMENT] and a topic word set [TOPIC WORDS], identify which themes present "
    "in the document are not included in the topic word set.\n"
    "Return these missing themes, or [ ] if all themes from the document are included in the word "
    "list.\n"
    "Return the missed themes list or [ ]: [MISSING THEMES/[ ]]";

}  // namespace

std::string_view builtin_template(MetricId id) {
  switch (id) {
    case MetricId::kLRate: return kLRate;
    case MetricId::kLNonword: return kLNonword;
    case MetricId::kAdvNonword: return kAdvNonword;
    case MetricId::kCRate: return kCRate;
    case MetricId::kCOutlier: return kCOutlier;
    case MetricId::kAdvOutlier: return kAdvOutlier;
    case MetricId::kRRate: return kRRate;
    case MetricId::kRDuplicate: return kRDuplicate;
    case MetricId::kAdvDuplicate: return kAdvDuplicate;
    case MetricId::kDRate: return kDRate;
    case MetricId::kAIrtw: return kAIrtw;
    case MetricId::kAMissingTheme: return kAMissing;
  }
  return {};
}

std::string_view slot_marker(Slot slot) {
  switch (slot) {
    case Slot::kTopicWords: return "[TOPIC WORDS]";
    case Slot::kTopicWords1: return "[TOPIC WORDS 1]";
    case Slot::kTopicWords2: return "[TOPIC WORDS 2]";
    case Slot::kDocument: return "[DOCUMENT]";
    case Slot::kAnchor: return "[ANCHOR]";
  }
  return {};
}

std::string render_word_list(const std::vector<std::string>& words) { return join(words, ", "); }

std::uint64_t prompt_hash(MetricId template_id, std::string_view rendered,
                          std::string_view model_identifier, double temperature) {
  std::uint64_t h = fnv1a64(to_string(template_id));
  h = fnv1a64("\x1f", h);
  h = fnv1a64(rendered, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(model_identifier, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(format_double(temperature), h);
  return h;
}

PromptLibrary::PromptLibrary() {
  for (int i = 0; i <= static_cast<int>(MetricId::kAdvDuplicate); ++i) {
    const auto id = static_cast<MetricId>(i);
    texts_[id] = std::string(builtin_template(id));
  }
}

const std::string& PromptLibrary::text(MetricId id) const { return texts_.at(id); }

std::vector<Slot> PromptLibrary::required_slots(MetricId id) const {
  std::vector<Slot> out;
  const auto& t = text(id);
  for (auto slot : kAllSlots) {
    if (t.find(slot_marker(slot)) != std::string::npos) out.push_back(slot);
  }
  return out;
}

RenderedPrompt PromptLibrary::render(MetricId id, const SlotValues& slots) const {
  for (auto slot : required_slots(id)) {
    if (!slots.contains(slot)) {
      throw PromptError("template " + std::string(to_string(id)) + ": missing slot " +
                        std::string(slot_marker(slot)));
    }
  }
  const auto& t = text(id);
  std::string out;
  out.reserve(t.size() + 256);
  std::size_t i = 0;
  while (i < t.size()) {
    bool replaced = false;
    if (t[i] == '[') {
      for (auto slot : kAllSlots) {
        const auto marker = slot_marker(slot);
        if (t.compare(i, marker.size(), marker) == 0) {
          out += slots.at(slot);
          i += marker.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += t[i++];
  }
  return {id, std::move(out)};
}

namespace {

struct Piece {
  std::string literal;
  std::optional<Slot> slot_before;  // slot that precedes this literal
};

std::vector<Piece> split_template(std::string_view t) {
  std::vector<Piece> pieces{{"", std::nullopt}};
  std::size_t i = 0;
  while (i < t.size()) {
    bool hit = false;
    if (t[i] == '[') {
      for (auto slot : kAllSlots) {
        const auto marker = slot_marker(slot);
        if (t.compare(i, marker.size(), marker) == 0) {
          pieces.push_back({"", slot});
          i += marker.size();
          hit = true;
          break;
        }
      }
    }
    if (!hit) pieces.back().literal += t[i++];
  }
  return pieces;
}

}  // namespace

std::optional<std::pair<MetricId, SlotValues>> PromptLibrary::match(std::string_view rendered) const {
  for (const auto& [id, t] : texts_) {
    const auto pieces = split_template(t);
    if (!rendered.starts_with(pieces.front().literal)) continue;
    if (pieces.size() == 1) {
      if (rendered == pieces.front().literal) return std::make_pair(id, SlotValues{});
      continue;
    }
    if (!rendered.ends_with(pieces.back().literal)) continue;
    const std::size_t end = rendered.size() - pieces.back().literal.size();
    std::size_t pos = pieces.front().literal.size();
    SlotValues slots;
    bool ok = pos <= end;
    for (std::size_t p = 1; ok && p + 1 < pieces.size(); ++p) {
      const auto& piece = pieces[p];
      const auto window = rendered.substr(0, end);
      // Documents are free text, so the literal after one is taken as late as possible.
      const std::size_t at = piece.slot_before == Slot::kDocument ? window.rfind(piece.literal)
                                                                  : window.find(piece.literal, pos);
      if (at == std::string_view::npos || at < pos) {
        ok = false;
        break;
      }
      slots[*piece.slot_before] = std::string(rendered.substr(pos, at - pos));
      pos = at + piece.literal.size();
    }
    if (!ok || pos > end) continue;
    slots[*pieces.back().slot_before] = std::string(rendered.substr(pos, end - pos));
    return std::make_pair(id, std::move(slots));
  }
  return std::nullopt;
}

void PromptLibrary::set_override(MetricId id, std::string text) { texts_[id] = std::move(text); }

void PromptLibrary::load_overrides(const std::string& dir) {
  for (const auto& [id, _] : texts_) {
    const auto path = std::filesystem::path(dir) / (std::string(to_string(id)) + ".txt");
    if (std::filesystem::exists(path)) {
      auto contents = read_file(path.string());
      while (!contents.empty() && (contents.back() == '\n' || contents.back() == '\r')) contents.pop_back();
      texts_[id] = std::move(contents);
    }
  }
}

}  // namespace topiceval
