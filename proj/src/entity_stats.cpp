#include "litscape/entity_stats.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <stdexcept>

#include "litscape/errors.hpp"
#include "litscape/text.hpp"
#include "parallel.hpp"

namespace litscape {

namespace {

struct Accum {
  std::string display;
  std::size_t mentions = 0;
  std::vector<std::size_t> docs;
};

bool shorter_name(const std::string& a, const std::string& b) {
  auto la = text::utf8_length(a), lb = text::utf8_length(b);
  if (la != lb) return la < lb;
  return a < b;
}

bool count_order(const EntityCount& a, const EntityCount& b) {
  if (a.article_count != b.article_count) return a.article_count > b.article_count;
  if (a.key.display_name != b.key.display_name) return a.key.display_name < b.key.display_name;
  return a.key.id < b.key.id;
}

}  // namespace

std::string EntityId::describe() const {
  return concept_type + ":" + (from_mention ? "\"" + key + "\"" : key);
}

EntityId entity_id_of(const EntityAnnotation& ann) {
  if (ann.concept_id && !ann.concept_id->empty() && *ann.concept_id != "-") {
    return {ann.concept_type, *ann.concept_id, false};
  }
  return {ann.concept_type, text::normalize_term(ann.mention), true};
}

std::vector<EntityCount> mention_counts(const Corpus& corpus, const EntityCountOptions& opts) {
  const std::size_t shards = detail::shard_count(corpus.size(), opts.threads);
  std::vector<std::map<EntityId, Accum>> partial(shards);
  detail::for_shards(corpus.size(), opts.threads, shards, [&](std::size_t s, std::size_t b, std::size_t e) {
    auto& acc = partial[s];
    for (std::size_t i = b; i < e; ++i) {
      for (const auto& ann : corpus.annotations(i)) {
        if (opts.type_filter && !opts.type_filter->count(ann.concept_type)) continue;
        EntityId id = entity_id_of(ann);
        if (id.key.empty()) continue;
        auto [it, fresh] = acc.try_emplace(std::move(id));
        Accum& a = it->second;
        if (fresh || shorter_name(ann.mention, a.display)) a.display = ann.mention;
        ++a.mentions;
        if (a.docs.empty() || a.docs.back() != i) a.docs.push_back(i);
      }
    }
  });

  std::map<EntityId, Accum> merged = std::move(partial[0]);
  for (std::size_t s = 1; s < shards; ++s) {
    for (auto& [id, a] : partial[s]) {
      auto [it, fresh] = merged.try_emplace(id);
      if (fresh) {
        it->second = std::move(a);
        continue;
      }
      Accum& m = it->second;
      if (shorter_name(a.display, m.display)) m.display = a.display;
      m.mentions += a.mentions;
      m.docs.insert(m.docs.end(), a.docs.begin(), a.docs.end());
    }
  }

  std::vector<EntityCount> out;
  out.reserve(merged.size());
  for (auto& [id, a] : merged) {
    EntityCount c;
    c.key = {id, a.display};
    c.article_count = a.docs.size();
    c.mention_count = a.mentions;
    c.docs = std::move(a.docs);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), count_order);
  return out;
}

std::vector<EntityCount> top_k(const std::vector<EntityCount>& counts, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  std::vector<EntityCount> out = counts;
  std::sort(out.begin(), out.end(), count_order);
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<WeekCount> weekly_trend(const Corpus& corpus, const EntityId& id, const Date& anchor) {
  bool seen = false;
  std::map<std::int64_t, std::size_t> bins;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    bool hit = false;
    for (const auto& ann : corpus.annotations(i)) {
      if (ann.concept_type == id.concept_type && entity_id_of(ann) == id) {
        hit = true;
        break;
      }
    }
    if (!hit) continue;
    seen = true;
    const auto& date = corpus.document(i).pub_date;
    if (date) ++bins[week_index(anchor, *date)];
  }
  if (!seen) throw UnknownKey(id.describe());
  std::vector<WeekCount> out;
  for (const auto& [w, c] : bins) out.push_back({w, c});
  return out;
}

std::map<std::string, std::string> parse_association_table(std::istream& in) {
  std::map<std::string, std::string> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 2) throw MalformedLine(line_no, "association rows have 2 tab-separated fields");
    table[std::string(text::trim(f[0]))] = std::string(text::trim(f[1]));
  }
  return table;
}

}  // namespace litscape
