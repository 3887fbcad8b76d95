#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "litscape/corpus.hpp"

namespace litscape {

struct Heading {
  std::string heading_id;
  std::string preferred_name;
  std::vector<std::string> entry_terms;  // normalized, sorted, unique; includes preferred name
  std::vector<std::string> tree_numbers;
};

// Dictionary of headings compiled into a token-trie matcher.
class Lexicon {
 public:
  // Throws DuplicateEntryTerm, EmptyLexicon, MalformedLine.
  static Lexicon build(std::vector<Heading> headings);

  const std::vector<Heading>& headings() const { return headings_; }
  std::size_t size() const { return headings_.size(); }
  std::optional<std::size_t> index_of(std::string_view heading_id) const;
  const Heading& heading(std::size_t i) const { return headings_[i]; }

  // Preferred name, or the shortest entry term when the preferred name is empty.
  std::string display_name(std::size_t i) const;

  struct TrieNode {
    std::unordered_map<std::string, std::size_t> next;
    // Heading index and normalized term, set when a term ends here.
    std::optional<std::size_t> heading;
    std::string term;
  };
  const std::vector<TrieNode>& trie() const { return trie_; }

 private:
  std::vector<Heading> headings_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<TrieNode> trie_;
};

// Lexicon TSV with header "heading_id\tpreferred_name\ttree_numbers\tentry_terms".
// Headings are kept iff a tree number starts with branch_filter (when given).
Lexicon compile_lexicon(std::istream& source, std::optional<std::string> branch_filter = {});

struct Match {
  std::string doc_id;
  std::size_t passage_index = 0;
  std::size_t start = 0;  // code points within the passage
  std::size_t end = 0;
  std::string matched_term;
  std::string heading_id;

  friend bool operator==(const Match&, const Match&) = default;
};

struct TextMatch {
  std::size_t start = 0;  // code points
  std::size_t end = 0;
  std::size_t heading = 0;
  std::string_view term;  // owned by the lexicon
};

// Case-insensitive, token-boundary matching with leftmost-longest resolution.
std::vector<TextMatch> tag_text(const Lexicon& lexicon, std::string_view text);

std::vector<Match> tag_document(const Lexicon& lexicon, const Document& doc);

struct HeadingCount {
  std::string heading_id;
  std::string name;
  std::size_t article_count = 0;
  std::vector<std::size_t> docs;  // ascending corpus indices
};

struct HeadingCounts {
  std::vector<HeadingCount> rows;  // non-zero headings, count desc, name asc
  std::size_t docs_with_any_match = 0;
};

struct TaggingOptions {
  PassageKindSet passage_kinds{PassageKind::Title, PassageKind::Abstract};
  unsigned threads = 1;
};

HeadingCounts heading_article_counts(const Corpus& corpus, const Lexicon& lexicon,
                                     const TaggingOptions& opts = {});

// Each heading contributes its documents to every distinct tree prefix cut at
// `depth` dot-separated components; groups count the union of documents.
// Throws std::invalid_argument when a counted heading has no tree number or depth is 0.
std::map<std::string, std::size_t> group_by_tree(const std::vector<HeadingCount>& counts,
                                                 const Lexicon& lexicon, std::size_t depth);

// Additive variant for callers that only have counts (no document sets).
std::map<std::string, std::size_t> group_by_tree_additive(
    const std::vector<std::pair<std::string, std::size_t>>& counts, const Lexicon& lexicon,
    std::size_t depth);

struct CoMentionMatrix {
  std::vector<std::size_t> headings;  // lexicon indices
  std::vector<std::vector<std::size_t>> cells;

  std::size_t at(std::size_t row, std::size_t col) const { return cells[row][col]; }
  // Sub-matrix over the n headings with the largest diagonal (desc, then lexicon order),
  // restricted to non-zero diagonals.
  CoMentionMatrix top(std::size_t n) const;
};

// Cell (a, b) counts documents having a single allowed passage that matches both a and b.
CoMentionMatrix comention_matrix(const Corpus& corpus, const Lexicon& lexicon,
                                 const TaggingOptions& opts);

}  // namespace litscape
