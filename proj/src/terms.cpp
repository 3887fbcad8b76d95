#include "litscape/terms.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "litscape/text.hpp"
#include "parallel.hpp"
#include "stopwords_data.hpp"

namespace litscape {

namespace {

enum class CharClass { Word, Slash, SentenceEnd, Other };

// Decodes one code point starting at i; returns its byte length.
std::size_t decode(std::string_view s, std::size_t i, char32_t& cp) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  std::size_t n = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
  if (i + n > s.size()) n = 1;
  if (n == 1) {
    cp = c;
    return 1;
  }
  cp = c & (0x7F >> n);
  for (std::size_t j = 1; j < n; ++j) {
    unsigned char cc = static_cast<unsigned char>(s[i + j]);
    if ((cc & 0xC0) != 0x80) {
      cp = c;
      return 1;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  return n;
}

CharClass classify(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') || cp == '-') {
    return CharClass::Word;
  }
  if (cp == '/') return CharClass::Slash;
  if (cp == '.' || cp == '!' || cp == '?' || cp == ';' || cp == ':') return CharClass::SentenceEnd;
  if (cp < 0x80) return CharClass::Other;
  // Latin-1 punctuation and symbols, general punctuation block.
  if ((cp >= 0xA0 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7) return CharClass::Other;
  if (cp >= 0x2000 && cp <= 0x206F) return CharClass::Other;
  if (cp >= 0x3000 && cp <= 0x303F) return CharClass::Other;
  return CharClass::Word;
}

std::string strip_hyphens(std::string_view w) {
  while (!w.empty() && w.front() == '-') w.remove_prefix(1);
  while (!w.empty() && w.back() == '-') w.remove_suffix(1);
  return text::ascii_lower(w);
}

}  // namespace

std::optional<TermIndex> TermVocabulary::find(std::string_view term) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), term,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == terms.end() || *it != term) return std::nullopt;
  return static_cast<TermIndex>(it - terms.begin());
}

Stopwords parse_stopwords(std::istream& in) {
  Stopwords out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto w = text::trim(line);
    if (!w.empty()) out.insert(text::ascii_lower(w));
  }
  return out;
}

Stopwords default_stopwords() {
  std::istringstream in{std::string(detail::kStopwordsEnV1)};
  return parse_stopwords(in);
}

Tokenized tokenize_terms(std::string_view s, const Stopwords& stopwords) {
  Tokenized out;
  std::vector<std::string> sentence;  // tokens of the current sentence
  std::vector<bool> slash_joined;     // token i is slash-joined to token i-1
  std::vector<std::string> compound;  // slash-joined run in progress
  bool after_slash = false;

  auto flush_compound = [&] {
    if (compound.size() >= 2) {
      bool stop = std::any_of(compound.begin(), compound.end(),
                              [&](const std::string& w) { return stopwords.count(w) > 0; });
      if (!stop) out.unigrams.push_back(text::join(compound, "/"));
    }
    compound.clear();
  };
  auto flush_sentence = [&] {
    for (std::size_t i = 0; i + 1 < sentence.size(); ++i) {
      if (slash_joined[i + 1]) continue;
      if (stopwords.count(sentence[i]) || stopwords.count(sentence[i + 1])) continue;
      out.bigrams.push_back(sentence[i] + " " + sentence[i + 1]);
    }
    sentence.clear();
    slash_joined.clear();
  };

  std::size_t i = 0;
  while (i < s.size()) {
    char32_t cp;
    std::size_t len = decode(s, i, cp);
    CharClass cls = classify(cp);
    if (cls != CharClass::Word) {
      if (cls == CharClass::Slash) {
        after_slash = !compound.empty();
      } else {
        flush_compound();
        after_slash = false;
        if (cls == CharClass::SentenceEnd) flush_sentence();
      }
      i += len;
      continue;
    }
    std::size_t b = i;
    while (i < s.size()) {
      std::size_t l = decode(s, i, cp);
      if (classify(cp) != CharClass::Word) break;
      i += l;
    }
    std::string tok = strip_hyphens(s.substr(b, i - b));
    bool joined_by_slash = after_slash && b > 0 && s[b - 1] == '/';
    if (!joined_by_slash) flush_compound();
    after_slash = false;
    if (tok.empty()) {
      flush_compound();
      continue;
    }
    compound.push_back(tok);
    if (!stopwords.count(tok)) out.unigrams.push_back(tok);
    slash_joined.push_back(joined_by_slash && compound.size() >= 2);
    sentence.push_back(std::move(tok));
  }
  flush_compound();
  flush_sentence();
  return out;
}

namespace {

TermVocabulary build_vocabulary(const std::vector<std::vector<std::string>>& doc_terms,
                                std::vector<std::string> doc_ids, std::size_t min_df) {
  std::map<std::string, std::vector<DocIndex>> postings;
  for (std::size_t d = 0; d < doc_terms.size(); ++d) {
    for (const auto& t : doc_terms[d]) postings[t].push_back(static_cast<DocIndex>(d));
  }
  TermVocabulary v;
  v.num_docs = doc_terms.size();
  v.doc_ids = std::move(doc_ids);
  v.doc_terms.resize(v.num_docs);
  for (auto& [term, docs] : postings) {
    if (docs.size() < std::max<std::size_t>(min_df, 1)) continue;
    auto idx = static_cast<TermIndex>(v.terms.size());
    v.terms.push_back(term);
    for (auto d : docs) v.doc_terms[d].push_back(idx);
    v.postings.push_back(std::move(docs));
  }
  return v;
}

}  // namespace

TermVocabulary extract_terms(const Corpus& corpus, const Stopwords& stopwords, const TermOptions& opts) {
  std::vector<std::vector<std::string>> per_doc(corpus.size());
  const std::size_t shards = detail::shard_count(corpus.size(), opts.threads);
  detail::for_shards(corpus.size(), opts.threads, shards, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t d = b; d < e; ++d) {
      const Document& doc = corpus.document(d);
      std::vector<std::string> terms;
      for (std::string_view part : {std::string_view(doc.title), std::string_view(doc.abstract)}) {
        auto tk = tokenize_terms(part, stopwords);
        terms.insert(terms.end(), tk.unigrams.begin(), tk.unigrams.end());
        terms.insert(terms.end(), tk.bigrams.begin(), tk.bigrams.end());
      }
      std::sort(terms.begin(), terms.end());
      terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
      per_doc[d] = std::move(terms);
    }
  });
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& d : corpus.documents()) ids.push_back(d.doc_id);
  return build_vocabulary(per_doc, std::move(ids), opts.min_df);
}

TermVocabulary vocabulary_from_sets(const std::vector<std::set<std::string>>& docs, std::size_t min_df) {
  std::vector<std::vector<std::string>> per_doc;
  std::vector<std::string> ids;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    per_doc.emplace_back(docs[d].begin(), docs[d].end());
    ids.push_back("d" + std::to_string(d));
  }
  return build_vocabulary(per_doc, std::move(ids), min_df);
}

}  // namespace litscape
