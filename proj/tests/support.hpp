// Shared helpers for the unit and acceptance tests: fixture access, small
// corpus builders and independent brute-force reference implementations.
#pragma once

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "litscape/corpus.hpp"
#include "litscape/formats.hpp"
#include "litscape/lexicon.hpp"

namespace testing {

inline std::string fixture_path(const std::string& name) { return std::string(LITSCAPE_FIXTURES) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline litscape::Corpus parse(const std::string& text, litscape::ParseMode mode = litscape::ParseMode::Strict,
                              litscape::ParseStats* stats = nullptr) {
  std::istringstream in(text);
  return litscape::parse_pubtator(in, mode, stats);
}

inline litscape::Corpus load_fixture(const std::string& stem, bool with_meta = true) {
  litscape::Corpus c = parse(read_file(fixture_path(stem + ".pubtator")));
  if (with_meta) {
    std::ifstream meta(fixture_path(stem + "_meta.tsv"));
    litscape::merge_metadata(c, litscape::parse_corpus_sidecar(meta));
    std::ifstream passages(fixture_path(stem + "_passages.tsv"));
    if (passages) litscape::merge_passages(c, passages);
  }
  return c;
}

struct DocSpec {
  std::string id;
  std::string title;
  std::string abstract;
  std::string date;  // empty = undated
  std::vector<litscape::Category> categories;
  std::vector<std::string> captions;
};

inline litscape::Corpus make_corpus(const std::vector<DocSpec>& specs) {
  litscape::Corpus c;
  for (const auto& s : specs) {
    litscape::Document d;
    d.doc_id = s.id;
    d.title = s.title;
    d.abstract = s.abstract;
    if (!s.date.empty()) d.pub_date = litscape::Date::parse(s.date);
    for (auto cat : s.categories) d.categories.insert(cat);
    for (const auto& cap : s.captions) d.extra_passages.push_back({litscape::PassageKind::Caption, cap});
    c.add_document(std::move(d));
  }
  return c;
}

inline litscape::Lexicon lexicon_from_tsv(const std::string& body, std::optional<std::string> branch = {}) {
  std::istringstream in("heading_id\tpreferred_name\ttree_numbers\tentry_terms\n" + body);
  return litscape::compile_lexicon(in, std::move(branch));
}

// ---------------------------------------------------------------------------
// Random mini-corpora for the counting oracles. Text uses only lowercase and
// capitalized ASCII words, single spaces, and sentence punctuation, so the
// naive scanners below see exactly the token boundaries the library uses.

inline std::string random_case(std::mt19937& rng, const std::string& w) {
  std::string out = w;
  if (rng() % 3 == 0 && !out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

inline std::string naive_collapse(const std::string& s);

struct MiniCase {
  litscape::Corpus corpus;
  std::vector<litscape::Heading> headings;
};

// Builds a corpus of up to 20 documents and up to 10 entities, with a lexicon
// whose entry terms never overlap one another.
inline MiniCase random_mini_case(std::mt19937& rng) {
  static const std::vector<std::string> filler = {"patients", "study", "with", "were", "and", "the", "results",
                                                  "showed", "level", "high", "case", "report", "group"};
  // Entry-term words are drawn from a disjoint pool, one word per term slot.
  static const std::vector<std::string> term_words = {
      "fever", "cough", "rash", "pain", "nausea", "chills", "anosmia", "sepsis", "malaise", "dyspnea",
      "edema", "fatigue", "myalgia", "vertigo", "tremor", "pallor", "lethargy", "ageusia", "pruritus", "syncope"};

  MiniCase mc;
  std::vector<std::string> pool = term_words;
  std::shuffle(pool.begin(), pool.end(), rng);
  std::size_t next = 0;
  std::size_t n_headings = 1 + rng() % 6;
  std::vector<std::string> all_terms;
  for (std::size_t h = 0; h < n_headings && next < pool.size(); ++h) {
    litscape::Heading hd;
    hd.heading_id = "H" + std::to_string(h);
    std::size_t n_terms = 1 + rng() % 2;
    for (std::size_t t = 0; t < n_terms && next < pool.size(); ++t) {
      if (rng() % 3 == 0 && next + 1 < pool.size()) {
        hd.entry_terms.push_back(pool[next] + " " + pool[next + 1]);
        next += 2;
      } else {
        hd.entry_terms.push_back(pool[next++]);
      }
    }
    hd.tree_numbers = {"C23." + std::to_string(100 + h)};
    hd.preferred_name = hd.entry_terms.front();
    for (const auto& t : hd.entry_terms) all_terms.push_back(t);
    mc.headings.push_back(hd);
  }
  // Unused term-pool words act as near-miss noise.
  std::vector<std::string> noise(pool.begin() + static_cast<long>(next), pool.end());

  static const std::vector<std::string> types = {"Chemical", "Gene", "Disease"};
  std::size_t n_entities = 1 + rng() % 10;
  std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> ents;
  for (std::size_t e = 0; e < n_entities; ++e) {
    std::string type = types[rng() % types.size()];
    std::string id;
    switch (rng() % 4) {
      case 0: id = ""; break;
      case 1: id = "-"; break;
      default: id = "ID" + std::to_string(rng() % 6); break;
    }
    std::vector<std::string> surfaces = {"ent" + std::to_string(e), "Ent" + std::to_string(e) + "  x",
                                         "alias" + std::to_string(rng() % 5)};
    ents.emplace_back(type, id, surfaces);
  }

  std::set<std::tuple<std::string, std::string, bool>> seen_keys;
  std::size_t n_docs = 1 + rng() % 20;
  for (std::size_t d = 0; d < n_docs; ++d) {
    litscape::Document doc;
    doc.doc_id = std::to_string(1000 + d);
    auto sentence = [&](std::size_t len) {
      std::string s;
      for (std::size_t i = 0; i < len; ++i) {
        std::string w;
        auto r = rng() % 10;
        if (r < 3 && !all_terms.empty()) w = all_terms[rng() % all_terms.size()];
        else if (r < 4 && !noise.empty()) w = noise[rng() % noise.size()];
        else w = filler[rng() % filler.size()];
        if (!s.empty()) s += ' ';
        s += random_case(rng, w);
        if (rng() % 8 == 0) s += ',';
      }
      return s + ".";
    };
    doc.title = sentence(2 + rng() % 4);
    doc.abstract = sentence(3 + rng() % 6) + " " + sentence(3 + rng() % 6);
    if (rng() % 4 == 0) doc.abstract.clear();
    mc.corpus.add_document(std::move(doc));
    std::size_t n_ann = rng() % 6;
    for (std::size_t a = 0; a < n_ann; ++a) {
      const auto& [type, id, surfaces] = ents[rng() % ents.size()];
      std::string mention = surfaces[rng() % surfaces.size()];
      bool keep_id = !id.empty() || rng() % 2;
      // Keep the number of distinct counting keys at ten or fewer.
      bool keyed = keep_id && id != "" && id != "-";
      auto key = std::make_tuple(type, keyed ? id : naive_collapse(mention), !keyed);
      if (!seen_keys.count(key) && seen_keys.size() >= 10) continue;
      seen_keys.insert(key);
      litscape::EntityAnnotation ann;
      ann.doc_id = std::to_string(1000 + d);
      ann.start = rng() % 10;
      ann.end = ann.start + 1 + rng() % 5;
      ann.mention = mention;
      ann.concept_type = type;
      if (keep_id) ann.concept_id = id;
      mc.corpus.add_annotation(std::move(ann));
    }
  }
  return mc;
}

// ---------------------------------------------------------------------------
// Naive reference implementations.

struct NaiveEntity {
  std::set<std::size_t> docs;
  std::size_t mentions = 0;
  std::set<std::string> surfaces;
};

inline std::string naive_collapse(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// Key: (type, key, from_mention).
inline std::map<std::tuple<std::string, std::string, bool>, NaiveEntity> naive_mention_counts(
    const litscape::Corpus& c) {
  std::map<std::tuple<std::string, std::string, bool>, NaiveEntity> out;
  for (std::size_t d = 0; d < c.size(); ++d) {
    for (const auto& a : c.annotations(d)) {
      bool has_id = a.concept_id && *a.concept_id != "" && *a.concept_id != "-";
      auto key = has_id ? std::make_tuple(a.concept_type, *a.concept_id, false)
                        : std::make_tuple(a.concept_type, naive_collapse(a.mention), true);
      auto& e = out[key];
      e.docs.insert(d);
      e.mentions += 1;
      e.surfaces.insert(a.mention);
    }
  }
  return out;
}

// Splits text into chunks at punctuation and at any whitespace other than a
// single space; a term matches when its words occur contiguously in a chunk.
inline std::vector<std::vector<std::string>> naive_chunks(const std::string& text) {
  std::vector<std::vector<std::string>> chunks(1);
  std::string word;
  auto end_word = [&] {
    if (!word.empty()) chunks.back().push_back(word);
    word.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool single_space = c == ' ' && (i + 1 >= text.size() || text[i + 1] != ' ') && (i == 0 || text[i - 1] != ' ');
    if (std::isalnum(static_cast<unsigned char>(c))) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (single_space) {
      end_word();
    } else {
      end_word();
      chunks.emplace_back();
    }
  }
  end_word();
  return chunks;
}

inline bool naive_contains(const std::string& passage, const std::string& term) {
  std::vector<std::string> words;
  std::istringstream ts(term);
  for (std::string w; ts >> w;) words.push_back(w);
  for (const auto& chunk : naive_chunks(passage)) {
    if (chunk.size() < words.size()) continue;
    for (std::size_t i = 0; i + words.size() <= chunk.size(); ++i) {
      if (std::equal(words.begin(), words.end(), chunk.begin() + static_cast<long>(i))) return true;
    }
  }
  return false;
}

// heading_id -> set of document indices, title and abstract passages.
inline std::map<std::string, std::set<std::size_t>> naive_heading_docs(const litscape::Corpus& c,
                                                                      const std::vector<litscape::Heading>& hs) {
  std::map<std::string, std::set<std::size_t>> out;
  for (std::size_t d = 0; d < c.size(); ++d) {
    const auto& doc = c.document(d);
    for (const auto& h : hs) {
      for (const auto& t : h.entry_terms) {
        if (naive_contains(doc.title, t) || naive_contains(doc.abstract, t)) out[h.heading_id].insert(d);
      }
    }
  }
  return out;
}

// Wilson bounds by bisection on the score equation (p_hat - p)^2 = z^2 p (1 - p) / n.
inline std::pair<double, double> wilson_by_bisection(std::size_t k, std::size_t n, double z) {
  double ph = static_cast<double>(k) / static_cast<double>(n);
  auto g = [&](double p) { return (ph - p) * (ph - p) - z * z * p * (1 - p) / static_cast<double>(n); };
  auto solve = [&](double lo, double hi) {
    // g(lo) and g(hi) have opposite signs (or one is zero).
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if ((g(lo) > 0) == (g(mid) > 0)) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  double lo = k == 0 ? 0.0 : solve(0.0, ph);
  double hi = k == n ? 1.0 : solve(1.0, ph);
  return {lo, hi};
}

// Independent affinity evaluation for the partition oracle.
inline double naive_affinity(std::size_t k, std::size_t m, std::size_t nt, std::size_t N) {
  if (m == 0) return 0.0;
  double p = static_cast<double>(nt) / static_cast<double>(N);
  double q = (static_cast<double>(k) + 0.5) / (static_cast<double>(m) + 1.0);
  double f = static_cast<double>(k) * std::log(q / p) + static_cast<double>(m - k) * std::log((1 - q) / (1 - p));
  return static_cast<double>(k) * static_cast<double>(N) > static_cast<double>(m) * static_cast<double>(nt)
             ? f
             : -std::fabs(f);
}

// docs[i] = set of term ids in document i; clusters = list of term-id sets.
inline double naive_partition_score(const std::vector<std::set<int>>& docs, const std::vector<std::set<int>>& clusters) {
  double total = 0;
  for (const auto& cl : clusters) {
    for (int t : cl) {
      std::size_t m = 0, k = 0, nt = 0;
      for (const auto& d : docs) {
        bool has_t = d.count(t) > 0;
        bool ctx = std::any_of(cl.begin(), cl.end(), [&](int u) { return u != t && d.count(u); });
        nt += has_t;
        m += ctx;
        k += ctx && has_t;
      }
      total += naive_affinity(k, m, nt, docs.size());
    }
  }
  return total;
}

// Every set partition of {0..n-1} as lists of blocks.
inline std::vector<std::vector<std::set<int>>> all_partitions(int n) {
  std::vector<std::vector<std::set<int>>> out;
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  // Restricted growth strings.
  std::function<void(int, int)> rec = [&](int i, int max_label) {
    if (i == n) {
      std::vector<std::set<int>> blocks(static_cast<std::size_t>(max_label + 1));
      for (int t = 0; t < n; ++t) blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(t)])].insert(t);
      out.push_back(blocks);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      label[static_cast<std::size_t>(i)] = l;
      rec(i + 1, std::max(max_label, l));
    }
  };
  if (n == 0) return out;
  label[0] = 0;
  rec(1, 0);
  return out;
}

}  // namespace testing
