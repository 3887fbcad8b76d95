#include "litscape/topics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "litscape/errors.hpp"
#include "litscape/text.hpp"
#include "parallel.hpp"

namespace litscape {

TopicPartition make_partition(const PdcResult& clusters, const TermVocabulary& vocab) {
  TopicPartition part;
  part.vocabulary = &vocab;
  for (std::size_t i = 0; i < clusters.clusters.size(); ++i) {
    Topic topic;
    topic.topic_id = i;
    for (const auto& ct : clusters.clusters[i].terms) {
      topic.terms.push_back({vocab.terms[ct.term], ct.weight});
    }
    part.topics.push_back(std::move(topic));
  }
  return part;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !(v > 0.0); }),
               values.end());
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

void score_documents(TopicPartition& partition, const Corpus& corpus, const ScoreOptions& opts) {
  if (!partition.vocabulary) throw std::invalid_argument("partition has no vocabulary");
  const TermVocabulary& vocab = *partition.vocabulary;
  if (vocab.num_docs != corpus.size()) {
    throw std::invalid_argument("vocabulary was built from a different corpus");
  }
  if (opts.threshold.mode == ThresholdRule::Mode::Fixed && !(opts.threshold.value >= 0.0)) {
    throw std::invalid_argument("threshold must be non-negative");
  }
  if (opts.threshold.mode == ThresholdRule::Mode::Percentile &&
      !(opts.threshold.value > 0.0 && opts.threshold.value <= 1.0)) {
    throw std::invalid_argument("percentile must lie in (0, 1]");
  }

  struct Owner {
    std::size_t topic = 0;
    double weight = 0.0;
    bool set = false;
  };
  std::vector<Owner> owner(vocab.size());
  for (const auto& topic : partition.topics) {
    for (const auto& wt : topic.terms) {
      auto idx = vocab.find(wt.term);
      if (!idx) throw std::invalid_argument("topic term '" + wt.term + "' is not in the vocabulary");
      owner[*idx] = {topic.topic_id, wt.weight, true};
    }
  }
  std::vector<std::size_t> slot(partition.topics.empty() ? 0 : partition.topics.back().topic_id + 1, 0);
  for (std::size_t i = 0; i < partition.topics.size(); ++i) {
    if (partition.topics[i].topic_id >= slot.size()) slot.resize(partition.topics[i].topic_id + 1);
    slot[partition.topics[i].topic_id] = i;
  }

  // Per document: (topic slot, score) for every non-zero score, slot ascending.
  std::vector<std::vector<std::pair<std::size_t, double>>> per_doc(vocab.num_docs);
  const std::size_t shards = detail::shard_count(vocab.num_docs, opts.threads);
  detail::for_shards(vocab.num_docs, opts.threads, shards, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<double> acc(partition.topics.size(), 0.0);
    std::vector<std::size_t> touched;
    for (std::size_t d = b; d < e; ++d) {
      for (auto t : vocab.doc_terms[d]) {
        const Owner& o = owner[t];
        if (!o.set || o.weight == 0.0) continue;
        std::size_t s = slot[o.topic];
        if (acc[s] == 0.0) touched.push_back(s);
        acc[s] += o.weight;
      }
      std::sort(touched.begin(), touched.end());
      for (auto s : touched) {
        if (acc[s] != 0.0) per_doc[d].push_back({s, acc[s]});
        acc[s] = 0.0;
      }
      touched.clear();
    }
  });

  for (auto& topic : partition.topics) {
    topic.doc_scores.clear();
    topic.assigned_docs.clear();
  }
  for (std::size_t d = 0; d < per_doc.size(); ++d) {
    for (const auto& [s, score] : per_doc[d]) {
      partition.topics[s].doc_scores.push_back({static_cast<DocIndex>(d), score});
    }
  }
  for (auto& topic : partition.topics) {
    if (opts.threshold.mode == ThresholdRule::Mode::Fixed) {
      topic.threshold = opts.threshold.value;
    } else {
      std::vector<double> scores;
      for (const auto& ds : topic.doc_scores) scores.push_back(ds.score);
      topic.threshold = nearest_rank_quantile(std::move(scores), opts.threshold.value);
    }
  }
  for (std::size_t d = 0; d < per_doc.size(); ++d) {
    const auto& row = per_doc[d];
    if (row.empty()) continue;
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i) {
      const auto& a = row[i];
      const auto& b = row[best];
      if (a.second > b.second ||
          (a.second == b.second &&
           partition.topics[a.first].topic_id < partition.topics[b.first].topic_id)) {
        best = i;
      }
    }
    auto [s, score] = row[best];
    Topic& topic = partition.topics[s];
    if (score > 0.0 && score >= topic.threshold) topic.assigned_docs.push_back({static_cast<DocIndex>(d), score});
  }
  for (auto& topic : partition.topics) {
    std::sort(topic.assigned_docs.begin(), topic.assigned_docs.end(),
              [&](const DocScore& a, const DocScore& b) {
                if (a.score != b.score) return a.score > b.score;
                return vocab.doc_ids[a.doc] < vocab.doc_ids[b.doc];
              });
  }
}

namespace {

std::string title_case(const std::string& word) {
  std::string out = word;
  bool start = true;
  for (char& c : out) {
    if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    start = (c == '/');
  }
  return out;
}

}  // namespace

std::string make_title(const std::vector<WeightedTerm>& terms, std::size_t max_words) {
  if (terms.empty()) throw std::invalid_argument("cannot title an empty topic");
  if (max_words == 0) throw std::invalid_argument("max_words must be at least 1");
  std::vector<const WeightedTerm*> ranked;
  for (const auto& t : terms) ranked.push_back(&t);
  std::stable_sort(ranked.begin(), ranked.end(), [](const WeightedTerm* a, const WeightedTerm* b) {
    if (a->weight != b->weight) return a->weight > b->weight;
    return a->term < b->term;
  });

  auto words_of = [](const std::string& term) {
    std::vector<std::string> w;
    for (auto p : text::split(term, ' ')) {
      if (!p.empty()) w.emplace_back(p);
    }
    return w;
  };

  std::vector<std::string> title;
  std::set<std::string> used_terms;
  auto in_title = [&](const std::string& w) {
    return std::find(title.begin(), title.end(), w) != title.end();
  };

  for (const WeightedTerm* t : ranked) {
    if (title.size() >= max_words) break;
    if (used_terms.count(t->term)) continue;
    auto words = words_of(t->term);
    std::string chosen = t->term;
    if (words.size() == 1) {
      // A unigram yields to the best-ranked two-word phrase containing it.
      for (const WeightedTerm* p : ranked) {
        if (used_terms.count(p->term)) continue;
        auto pw = words_of(p->term);
        if (pw.size() != 2 || (pw[0] != words[0] && pw[1] != words[0])) continue;
        if (in_title(pw[0]) || in_title(pw[1])) continue;
        if (title.size() + 2 > max_words) continue;
        chosen = p->term;
        words = pw;
        break;
      }
    }
    used_terms.insert(t->term);
    used_terms.insert(chosen);
    if (std::any_of(words.begin(), words.end(), in_title)) continue;
    if (title.size() + words.size() > max_words) continue;
    for (auto& w : words) {
      used_terms.insert(w);
      title.push_back(w);
    }
  }
  std::vector<std::string> cased;
  for (const auto& w : title) cased.push_back(title_case(w));
  return text::join(cased, " ");
}

std::int64_t topic_onset(const Topic& topic, const Corpus& corpus, std::size_t top_k, const Date& anchor) {
  std::optional<Date> earliest;
  std::size_t n = std::min(top_k, topic.assigned_docs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& date = corpus.document(topic.assigned_docs[i].doc).pub_date;
    if (date && (!earliest || *date < *earliest)) earliest = date;
  }
  if (!earliest) throw NoDatedDocuments();
  return week_index(anchor, *earliest);
}

std::optional<Category> associate_category(const Topic& topic, const Corpus& corpus, std::size_t top_n) {
  std::array<std::size_t, kNumCategories> count{};
  std::array<double, kNumCategories> score{};
  std::size_t n = std::min(top_n, topic.assigned_docs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ds = topic.assigned_docs[i];
    for (Category c : corpus.document(ds.doc).categories.members()) {
      auto ci = static_cast<std::size_t>(c);
      ++count[ci];
      score[ci] += ds.score;
    }
  }
  std::optional<Category> best;
  for (Category c : kAllCategories) {
    auto ci = static_cast<std::size_t>(c);
    if (count[ci] == 0) continue;
    if (!best) {
      best = c;
      continue;
    }
    auto bi = static_cast<std::size_t>(*best);
    if (count[ci] != count[bi]) {
      if (count[ci] > count[bi]) best = c;
    } else if (score[ci] != score[bi]) {
      if (score[ci] > score[bi]) best = c;
    } else if (category_name(c) < category_name(*best)) {
      best = c;
    }
  }
  return best;
}

CategoryHeatmap category_heatmap(const TopicPartition& partition, const Corpus& corpus) {
  CategoryHeatmap hm;
  std::array<std::array<double, kNumCategories>, kNumCategories> sums{};
  for (const auto& topic : partition.topics) {
    if (!topic.category) continue;
    std::size_t labeled = 0;
    std::array<std::size_t, kNumCategories> with{};
    for (const auto& ds : topic.assigned_docs) {
      const auto& cats = corpus.document(ds.doc).categories;
      if (cats.empty()) continue;
      ++labeled;
      for (Category c : cats.members()) ++with[static_cast<std::size_t>(c)];
    }
    if (labeled == 0) continue;
    auto p = static_cast<std::size_t>(*topic.category);
    ++hm.topics_per_row[p];
    for (std::size_t q = 0; q < kNumCategories; ++q) {
      sums[p][q] += static_cast<double>(with[q]) / static_cast<double>(labeled);
    }
  }
  for (std::size_t p = 0; p < kNumCategories; ++p) {
    if (hm.topics_per_row[p] == 0) continue;
    for (std::size_t q = 0; q < kNumCategories; ++q) {
      hm.cells[p][q] = sums[p][q] / static_cast<double>(hm.topics_per_row[p]);
    }
  }
  return hm;
}

TopicSplit split_by_size(const TopicPartition& partition, std::size_t min_terms) {
  TopicSplit split;
  for (std::size_t i = 0; i < partition.topics.size(); ++i) {
    if (partition.topics[i].terms.size() >= min_terms) split.significant.push_back(i);
    else split.specific.push_back(i);
  }
  return split;
}

}  // namespace litscape
