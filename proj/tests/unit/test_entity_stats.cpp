#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "litscape/entity_stats.hpp"
#include "litscape/errors.hpp"
#include "support.hpp"

using namespace litscape;
using testing::make_corpus;

namespace {

void annotate(Corpus& c, const std::string& doc, const std::string& mention, const std::string& type,
              std::optional<std::string> id) {
  EntityAnnotation a;
  a.doc_id = doc;
  a.start = 0;
  a.end = 1;
  a.mention = mention;
  a.concept_type = type;
  a.concept_id = std::move(id);
  c.add_annotation(a);
}

}  // namespace

TEST_CASE("synonyms merge on concept id") {
  Corpus c = make_corpus({{"1", "t", "", "", {}, {}}, {"2", "t", "", "", {}, {}}});
  annotate(c, "1", "remdesivir", "Chemical", "X");
  annotate(c, "1", "remdesivir", "Chemical", "X");
  annotate(c, "1", "GS-5734", "Chemical", "X");
  annotate(c, "2", "remdesivir", "Chemical", "X");
  auto rows = mention_counts(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].article_count == 2);
  CHECK(rows[0].mention_count == 4);
  CHECK(rows[0].key.display_name == "GS-5734");
}

TEST_CASE("display name is the shortest mention, ties lexicographic") {
  Corpus c = make_corpus({{"1", "t", "", "", {}, {}}});
  annotate(c, "1", "betaX", "Gene", "G");
  annotate(c, "1", "alphaY", "Gene", "G");
  annotate(c, "1", "Bbb", "Gene", "G");
  annotate(c, "1", "Aaa", "Gene", "G");
  CHECK(mention_counts(c)[0].key.display_name == "Aaa");
}

TEST_CASE("missing ids fall back to normalized mention text") {
  Corpus c = make_corpus({{"1", "t", "", "", {}, {}}, {"2", "t", "", "", {}, {}}});
  annotate(c, "1", "Spike  Protein", "Gene", std::nullopt);
  annotate(c, "2", "spike protein", "Gene", "-");
  annotate(c, "2", "spike protein", "Gene", "");
  annotate(c, "2", "spike protein", "Chemical", std::nullopt);
  auto rows = mention_counts(c);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key.id.concept_type == "Gene");
  CHECK(rows[0].key.id.key == "spike protein");
  CHECK(rows[0].key.id.from_mention);
  CHECK(rows[0].article_count == 2);
  CHECK(rows[0].mention_count == 3);
}

TEST_CASE("type filter") {
  Corpus c = make_corpus({{"1", "t", "", "", {}, {}}});
  annotate(c, "1", "ACE2", "Gene", "59272");
  annotate(c, "1", "chloroquine", "Chemical", "C");
  EntityCountOptions opts;
  opts.type_filter = std::set<std::string>{"Gene"};
  auto rows = mention_counts(c, opts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].key.display_name == "ACE2");
}

TEST_CASE("no annotations yields no rows") { CHECK(mention_counts(make_corpus({{"1", "t", "", "", {}, {}}})).empty()); }

TEST_CASE("top_k ordering and bounds") {
  Corpus c = make_corpus({{"1", "t", "", "", {}, {}}, {"2", "t", "", "", {}, {}}, {"3", "t", "", "", {}, {}},
                          {"4", "t", "", "", {}, {}}, {"5", "t", "", "", {}, {}}});
  for (const char* d : {"1", "2", "3", "4", "5"}) annotate(c, d, "B", "Gene", "b");
  for (const char* d : {"1", "2", "3", "4", "5"}) annotate(c, d, "A", "Gene", "a");
  annotate(c, "1", "C", "Gene", "c");
  auto rows = mention_counts(c);
  auto top = top_k(rows, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].key.display_name == "A");
  CHECK(top[1].key.display_name == "B");
  CHECK(top_k(rows, 50).size() == 3);
  CHECK_THROWS_AS(top_k(rows, 0), std::invalid_argument);
}

TEST_CASE("weekly trend") {
  Corpus c = make_corpus({{"1", "t", "", "2020-02-01", {}, {}},
                          {"2", "t", "", "2020-02-05", {}, {}},
                          {"3", "t", "", "2020-02-17", {}, {}},
                          {"4", "t", "", "", {}, {}},
                          {"5", "t", "", "", {}, {}}});
  for (const char* d : {"1", "2", "3", "4"}) annotate(c, d, "hcq", "Chemical", "H");
  annotate(c, "5", "only undated", "Chemical", "U");
  auto rows = mention_counts(c);
  const auto& hcq = *std::find_if(rows.begin(), rows.end(), [](const EntityCount& e) { return e.key.id.key == "H"; });
  auto trend = weekly_trend(c, hcq.key.id, default_anchor());
  REQUIRE(trend.size() == 2);
  CHECK(trend[0] == WeekCount{0, 2});
  CHECK(trend[1] == WeekCount{2, 1});
  std::size_t dated = trend[0].count + trend[1].count;
  CHECK(dated + 1 == hcq.article_count);

  EntityId undated{"Chemical", "U", false};
  CHECK(weekly_trend(c, undated, default_anchor()).empty());
  EntityId never{"Chemical", "nope", false};
  CHECK_THROWS_AS(weekly_trend(c, never, default_anchor()), UnknownKey);
}

TEST_CASE("counts match the naive scan and ignore annotation order and threads") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 60; ++round) {
    auto mc = testing::random_mini_case(rng);
    auto naive = testing::naive_mention_counts(mc.corpus);
    auto rows = mention_counts(mc.corpus);
    REQUIRE(rows.size() == naive.size());
    for (const auto& r : rows) {
      auto it = naive.find({r.key.id.concept_type, r.key.id.key, r.key.id.from_mention});
      REQUIRE(it != naive.end());
      CHECK(r.article_count == it->second.docs.size());
      CHECK(r.mention_count == it->second.mentions);
      CHECK(r.mention_count >= r.article_count);
      CHECK(std::vector<std::size_t>(it->second.docs.begin(), it->second.docs.end()) == r.docs);
    }
    CHECK(std::is_sorted(rows.begin(), rows.end(), [](const EntityCount& a, const EntityCount& b) {
      if (a.article_count != b.article_count) return a.article_count > b.article_count;
      return a.key.display_name < b.key.display_name;
    }));

    EntityCountOptions par;
    par.threads = 4;
    auto rows_par = mention_counts(mc.corpus, par);
    REQUIRE(rows_par.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows_par[i].key.id == rows[i].key.id);
      CHECK(rows_par[i].key.display_name == rows[i].key.display_name);
      CHECK(rows_par[i].docs == rows[i].docs);
    }

    // Rebuild the corpus with every document's annotations reversed.
    Corpus shuffled;
    for (std::size_t d = 0; d < mc.corpus.size(); ++d) shuffled.add_document(mc.corpus.document(d));
    for (std::size_t d = 0; d < mc.corpus.size(); ++d) {
      auto anns = mc.corpus.annotations(d);
      for (auto it = anns.rbegin(); it != anns.rend(); ++it) shuffled.add_annotation(*it);
    }
    auto rows_rev = mention_counts(shuffled);
    REQUIRE(rows_rev.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows_rev[i].key.id == rows[i].key.id);
      CHECK(rows_rev[i].article_count == rows[i].article_count);
    }
  }
}

TEST_CASE("association table") {
  std::istringstream in("# variant to gene\nD614G\tS\nN501Y\tS\n\n");
  auto m = parse_association_table(in);
  CHECK(m.size() == 2);
  CHECK(m.at("D614G") == "S");
  std::istringstream bad("only-one-column\n");
  CHECK_THROWS_AS(parse_association_table(bad), MalformedLine);
}
