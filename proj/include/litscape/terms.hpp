#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "litscape/corpus.hpp"

namespace litscape {

using TermIndex = std::uint32_t;
using DocIndex = std::uint32_t;

// Unigrams and two-word phrases with their document postings.
struct TermVocabulary {
  std::vector<std::string> terms;                // sorted
  std::vector<std::vector<DocIndex>> postings;   // per term, ascending
  std::vector<std::vector<TermIndex>> doc_terms; // per document, ascending
  std::vector<std::string> doc_ids;              // corpus order
  std::size_t num_docs = 0;

  std::size_t size() const { return terms.size(); }
  bool empty() const { return terms.empty(); }
  std::size_t df(TermIndex t) const { return postings[t].size(); }
  std::optional<TermIndex> find(std::string_view term) const;
};

using Stopwords = std::set<std::string, std::less<>>;

// One word per line; '#' starts a comment.
Stopwords parse_stopwords(std::istream& in);
// The versioned English function-word list shipped in data/.
Stopwords default_stopwords();

struct TermOptions {
  std::size_t min_df = 3;
  unsigned threads = 1;
};

// Lowercased tokens are maximal runs of letters, digits and hyphens; a
// slash splits tokens but the slash-joined form is kept as an extra unigram.
// Bigrams pair adjacent tokens within a sentence when neither is a stopword.
struct Tokenized {
  std::vector<std::string> unigrams;
  std::vector<std::string> bigrams;
};
Tokenized tokenize_terms(std::string_view text, const Stopwords& stopwords);

TermVocabulary extract_terms(const Corpus& corpus, const Stopwords& stopwords,
                             const TermOptions& opts = {});

// Builds a vocabulary from explicit per-document term sets (tests and tools).
TermVocabulary vocabulary_from_sets(const std::vector<std::set<std::string>>& docs,
                                    std::size_t min_df = 1);

}  // namespace litscape
