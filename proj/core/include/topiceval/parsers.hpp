#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topiceval/diagnostics.hpp"
#include "topiceval/judgment.hpp"

namespace topiceval {

// Parsers for free-text judge responses. None of them throw.

// An anchored "rate is: N" (also "rating:", "score is", ...) wins when
// present; an anchored value outside 1..3 is a failure. Otherwise the
// response must contain exactly one distinct standalone digit in {1,2,3}.
std::optional<int> parse_rating(std::string_view raw);

// True when the whole response says "nothing found" ("[ ]", "None",
// "No outliers", ...).
bool is_empty_marker(std::string_view text);

// Comma-separated items (falling back to ';' then one item per line) after
// dropping any leading "...:" label and trailing "Explanation:" lines. With a
// reference list, items are case-fold matched to it and returned in the
// reference spelling; anything else is discarded with a warning. Without one,
// items are case-folded.
std::vector<std::string> parse_word_list(std::string_view raw,
                                         const std::vector<std::string>* reference = nullptr,
                                         Diagnostics* diag = nullptr);

// Extracts "(a, b)" tuples. Pairs are unordered (returned with the smaller
// member first), self-pairs are dropped, and pairs with a member outside
// `reference` are discarded with a warning.
std::vector<WordPair> parse_pair_list(std::string_view raw, const std::vector<std::string>& reference,
                                      Diagnostics* diag = nullptr);

// Free-form themes: no reference matching.
std::vector<std::string> parse_theme_list(std::string_view raw);

// Text following a trailing "Explanation:" marker, if any.
std::optional<std::string> extract_explanation(std::string_view raw);

}  // namespace topiceval
