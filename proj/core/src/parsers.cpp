#include "topiceval/parsers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <set>
#include <unordered_map>

#include "topiceval/text.hpp"

namespace topiceval {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Reads the integer at `pos` if it is a whole number (not a decimal).
std::optional<long> read_integer(std::string_view s, std::size_t pos) {
  if (pos >= s.size() || !is_digit(s[pos])) return std::nullopt;
  std::size_t end = pos;
  while (end < s.size() && is_digit(s[end])) ++end;
  if (end + 1 < s.size() && s[end] == '.' && is_digit(s[end + 1])) return std::nullopt;
  if (end - pos > 6) return std::nullopt;
  return std::stol(std::string(s.substr(pos, end - pos)));
}

std::optional<long> anchored_rating(std::string_view lower) {
  static constexpr std::array<std::string_view, 3> kKeywords = {"rate", "rating", "score"};
  std::size_t best_pos = std::string_view::npos;
  std::optional<long> best;
  for (auto kw : kKeywords) {
    std::size_t from = 0;
    while (true) {
      const auto at = lower.find(kw, from);
      if (at == std::string_view::npos) break;
      from = at + 1;
      if (at > 0 && is_alpha(lower[at - 1])) continue;
      std::size_t p = at + kw.size();
      if (p < lower.size() && is_alpha(lower[p])) continue;
      auto skip_ws = [&] {
        while (p < lower.size() && (lower[p] == ' ' || lower[p] == '\t')) ++p;
      };
      skip_ws();
      for (std::string_view joiner : {"is", "of"}) {
        if (lower.substr(p, joiner.size()) == joiner &&
            (p + joiner.size() >= lower.size() || !is_alpha(lower[p + joiner.size()]))) {
          p += joiner.size();
          skip_ws();
          break;
        }
      }
      if (p < lower.size() && (lower[p] == ':' || lower[p] == '=')) ++p;
      skip_ws();
      while (p < lower.size() && (lower[p] == '*' || lower[p] == '"' || lower[p] == '\'' ||
                                  lower[p] == '[' || lower[p] == '(' || lower[p] == ' ')) {
        ++p;
      }
      const auto value = read_integer(lower, p);
      if (!value) continue;
      if (at < best_pos) {
        best_pos = at;
        best = value;
      }
      break;
    }
  }
  return best;
}

}  // namespace

std::optional<int> parse_rating(std::string_view raw) {
  const std::string lower = fold_case(raw);
  if (const auto anchored = anchored_rating(lower)) {
    if (*anchored >= 1 && *anchored <= 3) return static_cast<int>(*anchored);
    return std::nullopt;
  }
  std::set<int> candidates;
  std::size_t i = 0;
  while (i < lower.size()) {
    if (!is_digit(lower[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < lower.size() && is_digit(lower[end])) ++end;
    const bool letter_adjacent = (i > 0 && is_alpha(lower[i - 1])) ||
                                 (end < lower.size() && is_alpha(lower[end]));
    const bool decimal = (i >= 2 && lower[i - 1] == '.' && is_digit(lower[i - 2])) ||
                         (end + 1 < lower.size() && lower[end] == '.' && is_digit(lower[end + 1]));
    if (end - i == 1 && !letter_adjacent && !decimal) {
      const int d = lower[i] - '0';
      if (d >= 1 && d <= 3) candidates.insert(d);
    }
    i = end;
  }
  if (candidates.size() == 1) return *candidates.begin();
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 16> kEmptyPrefixes = {
    "[ ]",        "[]",           "none",        "no ",       "n/a",           "nothing",
    "there are no", "there is no", "all words",   "all the words", "all topics", "all themes",
    "all topic words", "all of the words", "no.",   "no,"};

// Only empty when they are the whole response ("Null hypothesis" is a theme).
constexpr std::array<std::string_view, 3> kEmptyWords = {"no", "null", "empty"};

constexpr std::array<std::string_view, 4> kExplanationMarkers = {
    "explanation:", "justification:", "reasoning:", "reason:"};

const std::set<std::string>& label_words() {
  static const std::set<std::string> words = {
      "are",      "is",     "answer",  "outliers", "outlier",   "words",      "word",
      "tokens",   "token",  "pairs",   "pair",     "themes",    "theme",      "topics",
      "result",   "output", "list",    "here",     "invalid",   "inconsistent", "extraneous",
      "missing",  "irrelevant", "duplicates", "duplicate", "response", "identified", "nonwords"};
  return words;
}

std::string cut_explanation(std::string_view raw) {
  std::size_t cut = std::string_view::npos;
  const auto lower = fold_case(raw);
  for (auto marker : kExplanationMarkers) cut = std::min(cut, lower.find(marker));
  return std::string(raw.substr(0, cut));
}

// Drops a leading "The invalid words are:" style label on the first line.
std::string strip_label(std::string_view text) {
  const auto nl = text.find('\n');
  const auto first_line = text.substr(0, nl);
  const auto colon = first_line.find(':');
  if (colon == std::string_view::npos) return std::string(text);
  const auto prefix = fold_case(first_line.substr(0, colon));
  std::string cleaned;
  for (char c : prefix) cleaned += is_alpha(c) ? c : ' ';
  const auto words = split_whitespace(cleaned);
  const bool is_label = std::any_of(words.begin(), words.end(),
                                    [](const std::string& w) { return label_words().contains(w); });
  if (!is_label) return std::string(text);
  return std::string(text.substr(colon + 1));
}

std::string strip_bullet(std::string_view s) {
  s = trim(s);
  if (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '+')) {
    s.remove_prefix(1);
  } else if (s.starts_with("•")) {
    s.remove_prefix(std::string_view("•").size());
  } else {
    std::size_t p = 0;
    while (p < s.size() && is_digit(s[p])) ++p;
    if (p > 0 && p < s.size() && (s[p] == '.' || s[p] == ')') &&
        (p + 1 == s.size() || s[p + 1] == ' ')) {
      s.remove_prefix(p + 1);
    }
  }
  return std::string(trim(s));
}

std::string strip_wrapping(std::string_view s) {
  auto junk = [](char c) {
    return c == '"' || c == '\'' || c == '`' || c == '*' || c == '[' || c == ']' || c == '{' ||
           c == '}' || c == ' ' || c == '\t';
  };
  auto tail_junk = [&](char c) { return junk(c) || c == '.' || c == ';' || c == '!' || c == ','; };
  while (!s.empty() && junk(s.front())) s.remove_prefix(1);
  while (!s.empty() && tail_junk(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string cut_item_explanation(std::string_view item) {
  static constexpr std::array<std::string_view, 7> kCuts = {" - ", " – ", " — ", ": ",
                                                            " (", " because", " as "};
  std::size_t cut = std::string_view::npos;
  for (auto c : kCuts) cut = std::min(cut, item.find(c));
  return std::string(item.substr(0, cut));
}

std::vector<std::string> split_items(std::string_view body) {
  std::vector<std::string> raw_items;
  char sep = 0;
  if (body.find(',') != std::string_view::npos) {
    sep = ',';
  } else if (body.find(';') != std::string_view::npos) {
    sep = ';';
  }
  for (const auto& line : split_lines(body)) {
    if (sep) {
      for (auto& part : split(line, sep)) raw_items.push_back(std::move(part));
    } else {
      raw_items.push_back(line);
    }
  }
  return raw_items;
}

// Shared front half of the list parsers: the cleaned items, pre-matching.
std::vector<std::string> list_items(std::string_view raw, bool cut_explanations) {
  std::string text = cut_explanation(raw);
  if (is_empty_marker(text)) return {};
  std::string body = strip_label(trim(text));
  if (is_empty_marker(body)) return {};
  std::vector<std::string> out;
  for (const auto& raw_item : split_items(body)) {
    std::string item = strip_bullet(raw_item);
    if (cut_explanations) item = cut_item_explanation(item);
    item = strip_wrapping(item);
    if (item.empty() || is_empty_marker(item)) continue;
    // "soda and berkeley"
    std::size_t start = 0;
    while (true) {
      const auto at = item.find(" and ", start);
      if (at == std::string::npos || !cut_explanations) {
        out.push_back(strip_wrapping(item.substr(start)));
        break;
      }
      out.push_back(strip_wrapping(item.substr(start, at - start)));
      start = at + 5;
    }
  }
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

}  // namespace

bool is_empty_marker(std::string_view text) {
  std::string t = fold_case(trim(text));
  std::size_t b = 0;
  while (b < t.size() && (t[b] == '"' || t[b] == '\'' || t[b] == '*' || t[b] == '`')) ++b;
  std::string_view v(t);
  v.remove_prefix(b);
  if (v.empty()) return true;
  while (!v.empty() && (v.back() == '.' || v.back() == '!' || v.back() == '"' || v.back() == '\'' ||
                        v.back() == '*' || v.back() == '`')) {
    v.remove_suffix(1);
  }
  if (std::find(kEmptyWords.begin(), kEmptyWords.end(), v) != kEmptyWords.end()) return true;
  return std::any_of(kEmptyPrefixes.begin(), kEmptyPrefixes.end(), [&](std::string_view p) {
    if (!v.starts_with(p)) return false;
    // "none" must not swallow "nonetheless"
    return !is_alpha(p.back()) || v.size() == p.size() || !std::isalnum(static_cast<unsigned char>(v[p.size()]));
  });
}

std::optional<std::string> extract_explanation(std::string_view raw) {
  const auto lower = fold_case(raw);
  for (auto marker : kExplanationMarkers) {
    const auto at = lower.find(marker);
    if (at != std::string::npos) return trim_copy(raw.substr(at + marker.size()));
  }
  return std::nullopt;
}

std::vector<std::string> parse_word_list(std::string_view raw, const std::vector<std::string>* reference,
                                         Diagnostics* diag) {
  const auto items = list_items(raw, true);
  std::unordered_map<std::string, std::string> ref_index;
  if (reference) {
    for (const auto& w : *reference) ref_index.emplace(fold_case(w), w);
  }
  std::vector<std::string> out;
  for (const auto& item : items) {
    auto folded = fold_case(item);
    std::string word;
    if (reference) {
      auto it = ref_index.find(folded);
      if (it == ref_index.end()) {
        warn(diag, "word list: '" + item + "' is not a topic word; discarded");
        continue;
      }
      word = it->second;
    } else {
      word = std::move(folded);
    }
    if (std::find(out.begin(), out.end(), word) == out.end()) out.push_back(std::move(word));
  }
  return out;
}

std::vector<WordPair> parse_pair_list(std::string_view raw, const std::vector<std::string>& reference,
                                      Diagnostics* diag) {
  std::unordered_map<std::string, std::string> ref_index;
  for (const auto& w : reference) ref_index.emplace(fold_case(w), w);

  static const std::regex kTuple(R"([\(\[]\s*([^()\[\],\n]+?)\s*,\s*([^()\[\],\n]+?)\s*[\)\]])");
  static const std::regex kArrow(R"(([^\s,;()]+)\s*(?:<->|↔|<=>)\s*([^\s,;()]+))");

  std::vector<std::pair<std::string, std::string>> found;
  const std::string text = cut_explanation(raw);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kTuple); it != std::sregex_iterator(); ++it) {
    found.emplace_back((*it)[1].str(), (*it)[2].str());
  }
  if (found.empty()) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), kArrow); it != std::sregex_iterator(); ++it) {
      found.emplace_back((*it)[1].str(), (*it)[2].str());
    }
  }

  std::vector<WordPair> out;
  for (const auto& [a_raw, b_raw] : found) {
    const auto a = fold_case(strip_wrapping(a_raw));
    const auto b = fold_case(strip_wrapping(b_raw));
    if (a == b) {
      warn(diag, "pair list: self-pair (" + a + ", " + b + ") discarded");
      continue;
    }
    auto ia = ref_index.find(a);
    auto ib = ref_index.find(b);
    if (ia == ref_index.end() || ib == ref_index.end()) {
      warn(diag, "pair list: (" + a + ", " + b + ") names a word outside the topic; discarded");
      continue;
    }
    WordPair p = ia->second < ib->second ? WordPair{ia->second, ib->second}
                                         : WordPair{ib->second, ia->second};
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> parse_theme_list(std::string_view raw) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& item : list_items(raw, false)) {
    if (seen.insert(fold_case(item)).second) out.push_back(std::move(item));
  }
  return out;
}

}  // namespace topiceval
