#include "litscape/lexicon.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "litscape/errors.hpp"
#include "litscape/text.hpp"
#include "parallel.hpp"

namespace litscape {

namespace {

bool in_branch(const std::string& tree, const std::string& branch) {
  if (tree.compare(0, branch.size(), branch) != 0) return false;
  return tree.size() == branch.size() || tree[branch.size()] == '.' || branch.back() == '.';
}

std::string tree_prefix(const std::string& tree, std::size_t depth) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    pos = tree.find('.', pos);
    if (pos == std::string::npos) return tree;
    if (i + 1 < depth) ++pos;
  }
  return tree.substr(0, pos);
}

struct Token {
  std::size_t raw_begin, raw_end;  // bytes, whitespace-delimited
  std::size_t begin, end;          // bytes, edge punctuation stripped
  std::string norm;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && text::is_space(s[i])) ++i;
    if (i >= s.size()) break;
    Token t;
    t.raw_begin = i;
    while (i < s.size() && !text::is_space(s[i])) ++i;
    t.raw_end = i;
    t.begin = t.raw_begin;
    t.end = t.raw_end;
    while (t.begin < t.end && text::is_punct(s[t.begin])) ++t.begin;
    while (t.end > t.begin && text::is_punct(s[t.end - 1])) --t.end;
    t.norm = text::ascii_lower(s.substr(t.begin, t.end - t.begin));
    toks.push_back(std::move(t));
  }
  return toks;
}

// Tokens j-1 and j may belong to one multi-word match: a single whitespace
// character between them and no punctuation stripped at the join.
bool adjacent(const Token& a, const Token& b) {
  return a.end == a.raw_end && b.begin == b.raw_begin && b.raw_begin == a.raw_end + 1;
}

}  // namespace

Lexicon Lexicon::build(std::vector<Heading> headings) {
  if (headings.empty()) throw EmptyLexicon();
  Lexicon lex;
  std::unordered_map<std::string, std::size_t> owner;
  for (std::size_t h = 0; h < headings.size(); ++h) {
    Heading& hd = headings[h];
    if (hd.heading_id.empty()) throw Error("heading with empty id");
    if (!lex.index_.emplace(hd.heading_id, h).second) throw Error("duplicate heading id " + hd.heading_id);
    std::vector<std::string> terms;
    for (const auto& t : hd.entry_terms) {
      std::string n = text::normalize_term(t);
      if (n.empty()) throw Error("entry term '" + t + "' of " + hd.heading_id + " is empty after normalization");
      terms.push_back(std::move(n));
    }
    if (!hd.preferred_name.empty()) {
      std::string n = text::normalize_term(hd.preferred_name);
      if (!n.empty()) terms.push_back(std::move(n));
    }
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.empty()) throw Error("heading " + hd.heading_id + " has no entry terms");
    for (const auto& t : terms) {
      auto [it, fresh] = owner.emplace(t, h);
      if (!fresh) throw DuplicateEntryTerm(t, headings[it->second].heading_id, hd.heading_id);
    }
    hd.entry_terms = std::move(terms);
  }
  lex.headings_ = std::move(headings);

  lex.trie_.emplace_back();
  for (std::size_t h = 0; h < lex.headings_.size(); ++h) {
    for (const auto& term : lex.headings_[h].entry_terms) {
      std::size_t node = 0;
      for (auto word : text::split(term, ' ')) {
        auto it = lex.trie_[node].next.find(std::string(word));
        if (it == lex.trie_[node].next.end()) {
          lex.trie_.emplace_back();
          it = lex.trie_[node].next.emplace(std::string(word), lex.trie_.size() - 1).first;
        }
        node = it->second;
      }
      lex.trie_[node].heading = h;
      lex.trie_[node].term = term;
    }
  }
  return lex;
}

std::optional<std::size_t> Lexicon::index_of(std::string_view heading_id) const {
  auto it = index_.find(std::string(heading_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Lexicon::display_name(std::size_t i) const {
  const Heading& h = headings_[i];
  if (!h.preferred_name.empty()) return h.preferred_name;
  std::string best;
  for (const auto& t : h.entry_terms) {
    if (best.empty() || t.size() < best.size() || (t.size() == best.size() && t < best)) best = t;
  }
  return best;
}

Lexicon compile_lexicon(std::istream& source, std::optional<std::string> branch_filter) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<Heading> headings;
  std::set<std::string> ids;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    if (!header) {
      if (line != "heading_id\tpreferred_name\ttree_numbers\tentry_terms") {
        throw MalformedLine(line_no, "expected lexicon header");
      }
      header = true;
      continue;
    }
    auto f = text::split(line, '\t');
    if (f.size() != 4) throw MalformedLine(line_no, "lexicon rows have 4 tab-separated fields");
    Heading h;
    h.heading_id = std::string(text::trim(f[0]));
    h.preferred_name = std::string(text::trim(f[1]));
    if (h.heading_id.empty()) throw MalformedLine(line_no, "empty heading_id");
    if (!ids.insert(h.heading_id).second) throw MalformedLine(line_no, "duplicate heading_id " + h.heading_id);
    for (auto t : text::split(f[2], '|')) {
      auto tt = text::trim(t);
      if (!tt.empty()) h.tree_numbers.emplace_back(tt);
    }
    for (auto t : text::split(f[3], '|')) {
      if (text::trim(t).empty()) continue;
      if (text::normalize_term(t).empty()) {
        throw MalformedLine(line_no, "entry term '" + std::string(t) + "' is empty after normalization");
      }
      h.entry_terms.emplace_back(t);
    }
    if (h.entry_terms.empty() && text::normalize_term(h.preferred_name).empty()) {
      throw MalformedLine(line_no, "heading " + h.heading_id + " has no entry terms");
    }
    if (branch_filter && !branch_filter->empty()) {
      bool keep = std::any_of(h.tree_numbers.begin(), h.tree_numbers.end(),
                              [&](const std::string& t) { return in_branch(t, *branch_filter); });
      if (!keep) continue;
    }
    headings.push_back(std::move(h));
  }
  if (!header) throw MalformedLine(line_no, "missing lexicon header");
  return Lexicon::build(std::move(headings));
}

std::vector<TextMatch> tag_text(const Lexicon& lexicon, std::string_view s) {
  std::vector<TextMatch> out;
  auto toks = tokenize(s);
  if (toks.empty()) return out;
  const auto& trie = lexicon.trie();

  std::vector<std::size_t> cp_at(s.size() + 1, 0);
  {
    std::size_t cp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      cp_at[i] = cp;
      if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++cp;
    }
    cp_at[s.size()] = cp;
  }

  std::size_t i = 0;
  while (i < toks.size()) {
    std::size_t node = 0;
    std::optional<std::size_t> best_end;
    std::size_t best_node = 0;
    for (std::size_t j = i; j < toks.size(); ++j) {
      if (toks[j].norm.empty()) break;
      if (j > i && !adjacent(toks[j - 1], toks[j])) break;
      auto it = trie[node].next.find(toks[j].norm);
      if (it == trie[node].next.end()) break;
      node = it->second;
      if (trie[node].heading) {
        best_end = j;
        best_node = node;
      }
    }
    if (!best_end) {
      ++i;
      continue;
    }
    TextMatch m;
    m.start = cp_at[toks[i].begin];
    m.end = cp_at[toks[*best_end].end];
    m.heading = *trie[best_node].heading;
    m.term = trie[best_node].term;
    out.push_back(m);
    i = *best_end + 1;
  }
  return out;
}

std::vector<Match> tag_document(const Lexicon& lexicon, const Document& doc) {
  std::vector<Match> out;
  auto passages = doc.passages();
  for (std::size_t p = 0; p < passages.size(); ++p) {
    for (const auto& m : tag_text(lexicon, passages[p].text)) {
      out.push_back({doc.doc_id, p, m.start, m.end, std::string(m.term),
                     lexicon.heading(m.heading).heading_id});
    }
  }
  return out;
}

HeadingCounts heading_article_counts(const Corpus& corpus, const Lexicon& lexicon,
                                     const TaggingOptions& opts) {
  const std::size_t H = lexicon.size();
  const std::size_t shards = detail::shard_count(corpus.size(), opts.threads);
  std::vector<std::vector<std::vector<std::size_t>>> partial(shards);
  std::vector<std::size_t> any(shards, 0);
  detail::for_shards(corpus.size(), opts.threads, shards, [&](std::size_t s, std::size_t b, std::size_t e) {
    auto& docs = partial[s];
    docs.assign(H, {});
    std::vector<char> hit(H, 0);
    for (std::size_t d = b; d < e; ++d) {
      std::vector<std::size_t> touched;
      for (const auto& p : corpus.document(d).passages()) {
        if (!opts.passage_kinds.contains(p.kind)) continue;
        for (const auto& m : tag_text(lexicon, p.text)) {
          if (!hit[m.heading]) {
            hit[m.heading] = 1;
            touched.push_back(m.heading);
          }
        }
      }
      if (!touched.empty()) ++any[s];
      for (auto h : touched) {
        docs[h].push_back(d);
        hit[h] = 0;
      }
    }
  });

  HeadingCounts out;
  for (auto a : any) out.docs_with_any_match += a;
  for (std::size_t h = 0; h < H; ++h) {
    HeadingCount row;
    for (std::size_t s = 0; s < shards; ++s) {
      row.docs.insert(row.docs.end(), partial[s][h].begin(), partial[s][h].end());
    }
    if (row.docs.empty()) continue;
    row.heading_id = lexicon.heading(h).heading_id;
    row.name = lexicon.display_name(h);
    row.article_count = row.docs.size();
    out.rows.push_back(std::move(row));
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const HeadingCount& a, const HeadingCount& b) {
    if (a.article_count != b.article_count) return a.article_count > b.article_count;
    if (a.name != b.name) return a.name < b.name;
    return a.heading_id < b.heading_id;
  });
  return out;
}

namespace {

std::set<std::string> heading_prefixes(const Lexicon& lexicon, const std::string& heading_id,
                                       std::size_t depth) {
  if (depth == 0) throw std::invalid_argument("tree depth must be at least 1");
  auto h = lexicon.index_of(heading_id);
  if (!h) throw std::invalid_argument("heading " + heading_id + " is not in the lexicon");
  const auto& trees = lexicon.heading(*h).tree_numbers;
  if (trees.empty()) throw std::invalid_argument("heading " + heading_id + " has no tree number");
  std::set<std::string> prefixes;
  for (const auto& t : trees) prefixes.insert(tree_prefix(t, depth));
  return prefixes;
}

}  // namespace

std::map<std::string, std::size_t> group_by_tree(const std::vector<HeadingCount>& counts,
                                                 const Lexicon& lexicon, std::size_t depth) {
  std::map<std::string, std::set<std::size_t>> groups;
  for (const auto& row : counts) {
    for (const auto& p : heading_prefixes(lexicon, row.heading_id, depth)) {
      groups[p].insert(row.docs.begin(), row.docs.end());
    }
  }
  std::map<std::string, std::size_t> out;
  for (const auto& [p, docs] : groups) out[p] = docs.size();
  return out;
}

std::map<std::string, std::size_t> group_by_tree_additive(
    const std::vector<std::pair<std::string, std::size_t>>& counts, const Lexicon& lexicon,
    std::size_t depth) {
  std::map<std::string, std::size_t> out;
  for (const auto& [id, n] : counts) {
    for (const auto& p : heading_prefixes(lexicon, id, depth)) out[p] += n;
  }
  return out;
}

CoMentionMatrix CoMentionMatrix::top(std::size_t n) const {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < headings.size(); ++i) {
    if (cells[i][i] > 0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cells[a][a] > cells[b][b]; });
  if (order.size() > n) order.resize(n);
  CoMentionMatrix sub;
  for (auto i : order) sub.headings.push_back(headings[i]);
  sub.cells.assign(order.size(), std::vector<std::size_t>(order.size(), 0));
  for (std::size_t r = 0; r < order.size(); ++r) {
    for (std::size_t c = 0; c < order.size(); ++c) sub.cells[r][c] = cells[order[r]][order[c]];
  }
  return sub;
}

CoMentionMatrix comention_matrix(const Corpus& corpus, const Lexicon& lexicon,
                                 const TaggingOptions& opts) {
  const std::size_t H = lexicon.size();
  const std::size_t shards = detail::shard_count(corpus.size(), opts.threads);
  std::vector<std::map<std::pair<std::size_t, std::size_t>, std::size_t>> partial(shards);
  detail::for_shards(corpus.size(), opts.threads, shards, [&](std::size_t s, std::size_t b, std::size_t e) {
    for (std::size_t d = b; d < e; ++d) {
      std::set<std::pair<std::size_t, std::size_t>> pairs;
      for (const auto& p : corpus.document(d).passages()) {
        if (!opts.passage_kinds.contains(p.kind)) continue;
        std::set<std::size_t> hs;
        for (const auto& m : tag_text(lexicon, p.text)) hs.insert(m.heading);
        for (auto a : hs) {
          for (auto b2 : hs) {
            if (a <= b2) pairs.emplace(a, b2);
          }
        }
      }
      for (const auto& pr : pairs) ++partial[s][pr];
    }
  });
  CoMentionMatrix m;
  m.headings.resize(H);
  for (std::size_t h = 0; h < H; ++h) m.headings[h] = h;
  m.cells.assign(H, std::vector<std::size_t>(H, 0));
  for (const auto& part : partial) {
    for (const auto& [pr, n] : part) {
      m.cells[pr.first][pr.second] += n;
      if (pr.first != pr.second) m.cells[pr.second][pr.first] += n;
    }
  }
  return m;
}

}  // namespace litscape
