#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "litscape/corpus.hpp"

namespace litscape {

enum class ParseMode { Strict, Lenient };

struct ParseStats {
  std::size_t documents = 0;
  std::size_t annotations = 0;
  std::size_t skipped_lines = 0;
  std::size_t dropped_annotations = 0;
  // Annotations whose mention only matched under the newline-joined convention.
  std::size_t newline_offset_fallbacks = 0;
};

// PubTator exchange format:
//   <pmid>|t|<title>
//   <pmid>|a|<abstract>
//   <pmid>\t<start>\t<end>\t<mention>\t<type>[\t<concept_id>]
// Blocks are separated by blank lines. In strict mode any malformed line
// throws MalformedLine; in lenient mode it is skipped and counted.
// DuplicateDocId is raised in both modes.
Corpus parse_pubtator(std::istream& in, ParseMode mode, ParseStats* stats = nullptr);
void write_pubtator(const Corpus& corpus, std::ostream& out);

struct DocMetadata {
  std::optional<Date> pub_date;
  CategorySet categories;

  friend bool operator==(const DocMetadata&, const DocMetadata&) = default;
};

// Tab-separated table with header "doc_id\tpub_date\tcategories".
// Throws UnknownCategory, BadDate, MalformedLine.
std::map<std::string, DocMetadata> parse_corpus_sidecar(std::istream& in);

// Attaches metadata to matching documents. Returns doc ids absent from the corpus.
std::vector<std::string> merge_metadata(Corpus& corpus,
                                        const std::map<std::string, DocMetadata>& meta);

// Extra passages table with header "doc_id\tkind\ttext". Rows are appended to
// the matching document in file order. Returns doc ids absent from the corpus.
std::vector<std::string> merge_passages(Corpus& corpus, std::istream& in);

// Canonical export: one JSON object per document per line, fields in fixed order.
void write_canonical(const Corpus& corpus, std::ostream& out);
Corpus read_canonical(std::istream& in);

}  // namespace litscape
