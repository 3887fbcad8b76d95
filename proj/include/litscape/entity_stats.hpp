#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "litscape/corpus.hpp"
#include "litscape/corpus_stats.hpp"

namespace litscape {

// Identity of an entity: its concept type plus either the concept id, or the
// normalized mention text when the annotation carries no id.
struct EntityId {
  std::string concept_type;
  std::string key;
  bool from_mention = false;

  auto operator<=>(const EntityId&) const = default;
  std::string describe() const;
};

// Concept ids "" and "-" count as absent.
EntityId entity_id_of(const EntityAnnotation& ann);

struct EntityKey {
  EntityId id;
  // Shortest surface mention observed, ties broken lexicographically.
  std::string display_name;
};

struct EntityCount {
  EntityKey key;
  std::size_t article_count = 0;
  std::size_t mention_count = 0;
  std::vector<std::size_t> docs;  // ascending corpus indices
};

struct EntityCountOptions {
  std::optional<std::set<std::string>> type_filter;
  unsigned threads = 1;
};

// One row per distinct entity, sorted by article_count desc, display_name asc.
std::vector<EntityCount> mention_counts(const Corpus& corpus, const EntityCountOptions& opts = {});

// First k rows under the same ordering. Throws std::invalid_argument for k == 0.
std::vector<EntityCount> top_k(const std::vector<EntityCount>& counts, std::size_t k);

// Per-week article counts for documents mentioning the entity. Throws UnknownKey.
std::vector<WeekCount> weekly_trend(const Corpus& corpus, const EntityId& id, const Date& anchor);

// Optional variant -> gene association supplied by the user; two-column TSV
// "variant\tgene" keyed by display name or concept id.
std::map<std::string, std::string> parse_association_table(std::istream& in);

}  // namespace litscape
