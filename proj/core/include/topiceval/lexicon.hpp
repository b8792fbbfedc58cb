#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace topiceval {

// Symmetric word -> same-concept alternatives table (synonyms and
// abbreviations). Words are stored case-folded.
class SynonymLexicon {
 public:
  // The bundled table of common pairs.
  static SynonymLexicon builtin();

  void add(std::string_view a, std::string_view b);
  // Lines of "word<TAB>alt1,alt2" (also "word: alt1, alt2"); '#' starts a comment.
  void merge_file(const std::string& path);
  void merge_text(std::string_view text);

  // Sorted alternatives; empty when the word is unknown.
  std::vector<std::string> alternatives(std::string_view word) const;
  bool same_concept(std::string_view a, std::string_view b) const;
  std::size_t pair_count() const;

 private:
  std::map<std::string, std::set<std::string>> table_;
};

}  // namespace topiceval
