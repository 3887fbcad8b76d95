#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "litscape/corpus.hpp"
#include "litscape/pdc.hpp"
#include "litscape/terms.hpp"

namespace litscape {

struct WeightedTerm {
  std::string term;
  double weight = 0.0;
};

struct DocScore {
  DocIndex doc = 0;
  double score = 0.0;
};

struct Topic {
  std::size_t topic_id = 0;
  std::vector<WeightedTerm> terms;  // weight desc, term asc
  std::string title;
  std::vector<DocScore> doc_scores;     // non-zero scores, doc ascending
  std::vector<DocScore> assigned_docs;  // score desc, doc id asc
  double threshold = 0.0;
  std::optional<std::int64_t> onset_week;
  std::optional<Category> category;

  bool significant(std::size_t min_terms = 10) const { return terms.size() >= min_terms; }
};

struct TopicPartition {
  std::vector<Topic> topics;
  const TermVocabulary* vocabulary = nullptr;
};

TopicPartition make_partition(const PdcResult& clusters, const TermVocabulary& vocab);

struct ThresholdRule {
  enum class Mode { Fixed, Percentile } mode = Mode::Percentile;
  double value = 0.9;  // fixed threshold, or quantile in (0, 1]

  static ThresholdRule fixed(double t) { return {Mode::Fixed, t}; }
  static ThresholdRule percentile(double q) { return {Mode::Percentile, q}; }
};

struct ScoreOptions {
  ThresholdRule threshold;
  unsigned threads = 1;
};

// score(d, C) = sum of weights of C's terms present in d. A document is
// assigned to its argmax topic (lowest id on ties) when that score is positive
// and at least the topic's threshold.
void score_documents(TopicPartition& partition, const Corpus& corpus, const ScoreOptions& opts = {});

// Nearest-rank quantile of the positive values; 0 when there are none.
double nearest_rank_quantile(std::vector<double> values, double q);

std::string make_title(const std::vector<WeightedTerm>& terms, std::size_t max_words = 4);

// Earliest date among the top_k assigned documents; throws NoDatedDocuments.
std::int64_t topic_onset(const Topic& topic, const Corpus& corpus, std::size_t top_k,
                         const Date& anchor);

// Most frequent label among the top_n assigned documents; ties by summed
// document score, then label name.
std::optional<Category> associate_category(const Topic& topic, const Corpus& corpus,
                                           std::size_t top_n = 5);

struct CategoryHeatmap {
  // cells[P][Q]: mean over topics with primary P of the fraction of assigned
  // labeled documents carrying Q. Diagonal uses the same definition.
  std::array<std::array<double, kNumCategories>, kNumCategories> cells{};
  std::array<std::size_t, kNumCategories> topics_per_row{};
};

CategoryHeatmap category_heatmap(const TopicPartition& partition, const Corpus& corpus);

// Topics with at least min_terms terms, and the rest.
struct TopicSplit {
  std::vector<std::size_t> significant;
  std::vector<std::size_t> specific;
};
TopicSplit split_by_size(const TopicPartition& partition, std::size_t min_terms = 10);

}  // namespace litscape
