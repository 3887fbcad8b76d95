#include <algorithm>
#include <random>

#include "doctest.h"
#include "litscape/errors.hpp"
#include "litscape/topics.hpp"
#include "support.hpp"

using namespace litscape;
using testing::make_corpus;

namespace {

// Builds a corpus, a vocabulary over it and a hand-made single-topic partition.
struct Scene {
  Corpus corpus;
  TermVocabulary vocab;
  TopicPartition part;
};

Scene scene(const std::vector<testing::DocSpec>& docs, const std::vector<WeightedTerm>& topic_terms,
            const std::vector<std::vector<WeightedTerm>>& extra = {}) {
  Scene s;
  s.corpus = make_corpus(docs);
  TermOptions opts;
  opts.min_df = 1;
  s.vocab = extract_terms(s.corpus, {}, opts);
  s.part.vocabulary = &s.vocab;
  Topic t;
  t.topic_id = 0;
  t.terms = topic_terms;
  s.part.topics.push_back(t);
  for (std::size_t i = 0; i < extra.size(); ++i) {
    Topic e;
    e.topic_id = i + 1;
    e.terms = extra[i];
    s.part.topics.push_back(e);
  }
  return s;
}

}  // namespace

TEST_CASE("additive scores and fixed thresholds") {
  auto s = scene({{"1", "spike ace2", "", "", {}, {}}} , {{"spike", 2.0}, {"ace2", 1.5}});
  score_documents(s.part, s.corpus, {ThresholdRule::fixed(0.0), 1});
  REQUIRE(s.part.topics[0].doc_scores.size() == 1);
  CHECK(s.part.topics[0].doc_scores[0].score == doctest::Approx(3.5));
  CHECK(s.part.topics[0].assigned_docs.size() == 1);
  score_documents(s.part, s.corpus, {ThresholdRule::fixed(4.0), 1});
  CHECK(s.part.topics[0].assigned_docs.empty());
  CHECK(s.part.topics[0].doc_scores.size() == 1);
}

TEST_CASE("documents go to their argmax topic, lowest id on ties") {
  auto s = scene({{"1", "alpha beta", "", "", {}, {}}, {"2", "alpha gamma", "", "", {}, {}}},
                 {{"alpha", 1.0}}, {{{"beta", 1.0}}, {{"gamma", 3.0}}});
  score_documents(s.part, s.corpus, {ThresholdRule::fixed(0.5), 1});
  // doc 1 ties topics 0 and 1 -> topic 0; doc 2 -> topic 2.
  CHECK(s.part.topics[0].assigned_docs.size() == 1);
  CHECK(s.part.topics[0].assigned_docs[0].doc == 0);
  CHECK(s.part.topics[1].assigned_docs.empty());
  CHECK(s.part.topics[1].doc_scores.size() == 1);
  CHECK(s.part.topics[2].assigned_docs[0].doc == 1);
}

TEST_CASE("percentile threshold") {
  CHECK(nearest_rank_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9) == 9);
  CHECK(nearest_rank_quantile({0, 0, 5}, 0.9) == 5);
  CHECK(nearest_rank_quantile({}, 0.9) == 0.0);
  CHECK(nearest_rank_quantile({3, 1, 2}, 1.0) == 3);
  CHECK(nearest_rank_quantile({3, 1, 2}, 0.01) == 1);
}

TEST_CASE("assigned documents meet the threshold, removing a term never raises a score") {
  Corpus c = testing::load_fixture("corpus50");
  auto vocab = extract_terms(c, default_stopwords());
  auto clusters = pdc_cluster(vocab);
  auto part = make_partition(clusters, vocab);
  score_documents(part, c);
  for (const auto& t : part.topics) {
    for (const auto& d : t.assigned_docs) CHECK(d.score >= t.threshold);
    for (std::size_t i = 1; i < t.assigned_docs.size(); ++i) {
      CHECK(t.assigned_docs[i - 1].score >= t.assigned_docs[i].score);
    }
  }
  // Drop the last term of every multi-term topic and rescore.
  auto shrunk = part;
  for (auto& t : shrunk.topics)
    if (t.terms.size() > 1) t.terms.pop_back();
  score_documents(shrunk, c, {ThresholdRule::fixed(0.0), 1});
  score_documents(part, c, {ThresholdRule::fixed(0.0), 1});
  for (std::size_t i = 0; i < part.topics.size(); ++i) {
    for (const auto& ds : shrunk.topics[i].doc_scores) {
      auto it = std::find_if(part.topics[i].doc_scores.begin(), part.topics[i].doc_scores.end(),
                             [&](const DocScore& x) { return x.doc == ds.doc; });
      REQUIRE(it != part.topics[i].doc_scores.end());
      CHECK(ds.score <= it->score + 1e-12);
    }
  }

  ScoreOptions par;
  par.threads = 4;
  auto p1 = make_partition(clusters, vocab);
  auto p4 = make_partition(clusters, vocab);
  score_documents(p1, c);
  score_documents(p4, c, par);
  for (std::size_t i = 0; i < p1.topics.size(); ++i) {
    REQUIRE(p1.topics[i].assigned_docs.size() == p4.topics[i].assigned_docs.size());
    for (std::size_t j = 0; j < p1.topics[i].assigned_docs.size(); ++j) {
      CHECK(p1.topics[i].assigned_docs[j].doc == p4.topics[i].assigned_docs[j].doc);
      CHECK(p1.topics[i].assigned_docs[j].score == p4.topics[i].assigned_docs[j].score);
    }
  }
}

TEST_CASE("scoring rejects a mismatched corpus") {
  auto s = scene({{"1", "x", "", "", {}, {}}}, {{"x", 1.0}});
  Corpus other = make_corpus({{"1", "x", "", "", {}, {}}, {"2", "y", "", "", {}, {}}});
  CHECK_THROWS_AS(score_documents(s.part, other), std::invalid_argument);
}

TEST_CASE("title rule") {
  CHECK(make_title({{"angiotensin", 9}, {"converting", 8}, {"converting enzyme", 7}, {"ace2", 3}}, 4) ==
        "Angiotensin Converting Enzyme Ace2");
  CHECK(make_title({{"cytokine storm", 0}}) == "Cytokine Storm");
  CHECK(make_title({{"zeta", 0}, {"beta", 0}, {"alpha", 0}}, 2) == "Alpha Beta");
  CHECK(make_title({{"lopinavir/ritonavir", 2}}) == "Lopinavir/Ritonavir");
  CHECK_THROWS_AS(make_title({}), std::invalid_argument);
}

TEST_CASE("title words come from topic terms and respect the budget") {
  std::mt19937 rng(8);
  const char* words[] = {"spike", "protein", "ace2", "receptor", "binding", "cell", "entry", "viral"};
  for (int round = 0; round < 200; ++round) {
    std::vector<WeightedTerm> terms;
    std::set<std::string> seen;
    for (int i = 0; i < 6; ++i) {
      std::string t = words[rng() % 8];
      if (rng() % 2) t += std::string(" ") + words[rng() % 8];
      if (!seen.insert(t).second) continue;
      terms.push_back({t, static_cast<double>(rng() % 5)});
    }
    std::set<std::string> allowed;
    for (const auto& t : terms) {
      std::istringstream in(t.term);
      for (std::string w; in >> w;) allowed.insert(w);
    }
    std::size_t budget = 1 + rng() % 5;
    std::string title = make_title(terms, budget);
    std::istringstream in(title);
    std::size_t n = 0;
    for (std::string w; in >> w; ++n) {
      w[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(w[0])));
      CHECK(allowed.count(w));
    }
    CHECK(n >= 1);
    CHECK(n <= budget);
  }
}

TEST_CASE("topic onset") {
  Topic t;
  Corpus c = make_corpus({{"1", "x", "", "2020-03-12", {}, {}},
                          {"2", "x", "", "2020-03-10", {}, {}},
                          {"3", "x", "", "2020-02-02", {}, {}},
                          {"4", "x", "", "", {}, {}}});
  t.assigned_docs = {{0, 5.0}, {1, 4.0}, {3, 3.0}, {2, 1.0}};
  CHECK(topic_onset(t, c, 3, default_anchor()) == 5);
  CHECK(topic_onset(t, c, 10, default_anchor()) == 0);
  Topic undated;
  undated.assigned_docs = {{3, 1.0}};
  CHECK_THROWS_AS(topic_onset(undated, c, 10, default_anchor()), NoDatedDocuments);
  Topic empty;
  CHECK_THROWS_AS(topic_onset(empty, c, 10, default_anchor()), NoDatedDocuments);
}

TEST_CASE("category association") {
  using C = Category;
  Corpus c = make_corpus({{"1", "x", "", "", {C::Treatment}, {}},
                          {"2", "x", "", "", {C::Treatment}, {}},
                          {"3", "x", "", "", {C::Mechanism}, {}},
                          {"4", "x", "", "", {C::Treatment, C::Mechanism}, {}},
                          {"5", "x", "", "", {}, {}},
                          {"6", "x", "", "", {C::Mechanism}, {}}});
  Topic t;
  t.assigned_docs = {{0, 5}, {1, 4}, {2, 3}, {3, 2}, {4, 1}, {5, 0.5}};
  CHECK(associate_category(t, c) == C::Treatment);

  Topic none;
  none.assigned_docs = {{4, 1}};
  CHECK_FALSE(associate_category(none, c).has_value());

  // Count tie broken by summed score.
  Topic tie;
  tie.assigned_docs = {{2, 9}, {0, 1}};
  CHECK(associate_category(tie, c) == C::Mechanism);
  // Count and score tie broken by label name.
  Topic tie2;
  tie2.assigned_docs = {{2, 1}, {0, 1}};
  CHECK(associate_category(tie2, c) == C::Mechanism);
}

TEST_CASE("category heatmap") {
  using C = Category;
  Corpus c = make_corpus({{"1", "x", "", "", {C::Treatment, C::Mechanism}, {}},
                          {"2", "x", "", "", {C::Treatment}, {}},
                          {"3", "x", "", "", {C::Treatment, C::Mechanism}, {}},
                          {"4", "x", "", "", {C::Treatment}, {}},
                          {"5", "x", "", "", {C::Diagnosis}, {}}});
  TopicPartition p;
  Topic t;
  t.assigned_docs = {{0, 1}, {1, 1}, {2, 1}, {3, 1}};
  t.category = C::Treatment;
  p.topics.push_back(t);
  Topic d;
  d.topic_id = 1;
  d.assigned_docs = {{4, 1}};
  d.category = C::Diagnosis;
  p.topics.push_back(d);
  auto hm = category_heatmap(p, c);
  auto T = static_cast<std::size_t>(C::Treatment), M = static_cast<std::size_t>(C::Mechanism),
       D = static_cast<std::size_t>(C::Diagnosis);
  CHECK(hm.cells[T][M] == doctest::Approx(0.5));
  CHECK(hm.cells[T][T] == doctest::Approx(1.0));
  CHECK(hm.topics_per_row[T] == 1);
  for (std::size_t q = 0; q < kNumCategories; ++q) {
    if (q != D) CHECK(hm.cells[D][q] == 0.0);
  }
  for (const auto& row : hm.cells)
    for (double v : row) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("split by size") {
  TopicPartition p;
  for (std::size_t n : {5u, 15u, 10u}) {
    Topic t;
    t.topic_id = p.topics.size();
    for (std::size_t i = 0; i < n; ++i) t.terms.push_back({"t" + std::to_string(i), 1.0});
    p.topics.push_back(t);
  }
  auto s = split_by_size(p);
  CHECK(s.significant == std::vector<std::size_t>{1, 2});
  CHECK(s.specific == std::vector<std::size_t>{0});
}
