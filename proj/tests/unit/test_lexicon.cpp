#include <algorithm>
#include <random>

#include "doctest.h"
#include "litscape/errors.hpp"
#include "litscape/lexicon.hpp"
#include "litscape/text.hpp"
#include "support.hpp"

using namespace litscape;
using testing::lexicon_from_tsv;
using testing::make_corpus;

namespace {

const std::string kFever = "D005334\tFever\tC23.888.119.344\tfever|pyrexia\n";

std::vector<std::string> matched(const Lexicon& lex, std::string_view text) {
  std::vector<std::string> out;
  for (const auto& m : tag_text(lex, text)) out.emplace_back(m.term);
  return out;
}

}  // namespace

TEST_CASE("branch filter keeps matching headings") {
  Lexicon lex = lexicon_from_tsv(kFever, "C23");
  REQUIRE(lex.size() == 1);
  CHECK(lex.heading(0).entry_terms == std::vector<std::string>{"fever", "pyrexia"});
  CHECK_THROWS_AS(lexicon_from_tsv(kFever, "C14"), EmptyLexicon);
}

TEST_CASE("branch filter respects tree components") {
  Lexicon lex = lexicon_from_tsv(kFever + "X1\tOther\tC230.1\tother thing\n", "C23");
  CHECK(lex.size() == 1);
  CHECK(lexicon_from_tsv(kFever, "C23.888").size() == 1);
}

TEST_CASE("duplicate entry terms across headings are rejected") {
  std::string body = "H1\tEdema\tC23.1\tedema\nH2\tSwelling\tC23.2\tswelling|Edema\n";
  try {
    lexicon_from_tsv(body);
    FAIL("expected DuplicateEntryTerm");
  } catch (const DuplicateEntryTerm& e) {
    CHECK(e.term() == "edema");
  }
}

TEST_CASE("malformed lexicon sources") {
  std::istringstream wrong_header("id\tname\n");
  CHECK_THROWS_AS(compile_lexicon(wrong_header), MalformedLine);
  CHECK_THROWS_AS(lexicon_from_tsv("H1\tName\tC23.1\n"), MalformedLine);
  CHECK_THROWS_AS(lexicon_from_tsv(""), EmptyLexicon);
}

TEST_CASE("entry terms are normalized") {
  Lexicon lex = lexicon_from_tsv("H1\tShortness of Breath\tC23.1\t  Shortness   OF breath.|(Dyspnea)\n");
  CHECK(lex.heading(0).entry_terms == std::vector<std::string>{"dyspnea", "shortness of breath"});
}

TEST_CASE("leftmost-longest resolution") {
  Lexicon lex = lexicon_from_tsv(
      "H1\tRDS\tC23.1\trespiratory distress\nH2\tARDS\tC23.2\tacute respiratory distress\n");
  auto m = tag_text(lex, "acute respiratory distress");
  REQUIRE(m.size() == 1);
  CHECK(m[0].term == "acute respiratory distress");
  CHECK(m[0].start == 0);
  CHECK(m[0].end == 26);
}

TEST_CASE("token boundaries and case") {
  Lexicon lex = lexicon_from_tsv(kFever);
  CHECK(matched(lex, "feverish").empty());
  CHECK(matched(lex, "Fever, then fever again").size() == 2);
  CHECK(matched(lex, "(Pyrexia).") == std::vector<std::string>{"pyrexia"});
  CHECK(matched(lex, "anti-fever").empty());
}

TEST_CASE("multi-word terms need single spaces and no punctuation at the join") {
  Lexicon lex = lexicon_from_tsv("H1\tChest Pain\tC23.1\tchest pain\n");
  CHECK(matched(lex, "severe chest pain today").size() == 1);
  CHECK(matched(lex, "Chest Pain").size() == 1);
  CHECK(matched(lex, "chest  pain").empty());
  CHECK(matched(lex, "chest, pain").empty());
  CHECK(matched(lex, "chest\npain").size() == 1);
}

TEST_CASE("match spans are code points and reproduce the term") {
  Lexicon lex = lexicon_from_tsv(kFever);
  std::string sample = "Zürich 武汉 fever";
  auto m = tag_text(lex, sample);
  REQUIRE(m.size() == 1);
  CHECK(m[0].start == 10);
  std::string span;
  REQUIRE(text::utf8_substr(sample, m[0].start, m[0].end, span));
  CHECK(text::normalize_term(span) == m[0].term);
}

TEST_CASE("rollup counts each document once per heading") {
  Lexicon lex = lexicon_from_tsv(kFever + "D003371\tCough\tC23.888.852.293\tcough\n");
  Corpus c = make_corpus({{"1", "Pyrexia and fever", "fever again", "", {}, {}},
                          {"2", "Cough", "", "", {}, {}},
                          {"3", "nothing", "here", "", {}, {}}});
  auto hc = heading_article_counts(c, lex);
  REQUIRE(hc.rows.size() == 2);
  CHECK(hc.rows[0].name == "Cough");  // tie at 1, name ascending
  CHECK(hc.rows[1].article_count == 1);
  CHECK(hc.docs_with_any_match == 2);
}

TEST_CASE("passage kinds restrict tagging") {
  Lexicon lex = lexicon_from_tsv(kFever);
  Corpus c = make_corpus({{"1", "none", "none", "", {}, {"fever in caption"}}});
  CHECK(heading_article_counts(c, lex).rows.empty());
  TaggingOptions opts;
  opts.passage_kinds = {PassageKind::Caption};
  CHECK(heading_article_counts(c, lex, opts).rows.size() == 1);
}

TEST_CASE("tag_document reports passages and heading ids") {
  Lexicon lex = lexicon_from_tsv(kFever);
  Corpus c = make_corpus({{"42", "Fever", "no", "", {}, {"pyrexia"}}});
  auto ms = tag_document(lex, c.document(0));
  REQUIRE(ms.size() == 2);
  CHECK(ms[0] == Match{"42", 0, 0, 5, "fever", "D005334"});
  CHECK(ms[1].passage_index == 2);
  CHECK(ms[1].matched_term == "pyrexia");
}

TEST_CASE("group_by_tree") {
  Lexicon lex = lexicon_from_tsv(
      "H1\tFever\tC23.888.119\tfever\n"
      "H2\tCough\tC23.888.852|C08.618\tcough\n");
  Corpus c = make_corpus({{"1", "fever cough", "", "", {}, {}}, {"2", "cough", "", "", {}, {}}});
  auto hc = heading_article_counts(c, lex);
  auto g2 = group_by_tree(hc.rows, lex, 2);
  CHECK(g2.at("C23.888") == 2);  // union of {1} and {1, 2}
  CHECK(g2.at("C08.618") == 2);
  auto g1 = group_by_tree(hc.rows, lex, 1);
  CHECK(g1.at("C23") == 2);
  CHECK(g1.at("C08") == 2);
  CHECK_THROWS_AS(group_by_tree(hc.rows, lex, 0), std::invalid_argument);

  auto additive = group_by_tree_additive({{"H1", 1}, {"H2", 2}}, lex, 2);
  CHECK(additive.at("C23.888") == 3);
}

TEST_CASE("single-heading group equals the heading count") {
  Lexicon lex = lexicon_from_tsv(kFever);
  Corpus c = make_corpus({{"1", "fever", "", "", {}, {}}, {"2", "pyrexia", "", "", {}, {}}});
  auto hc = heading_article_counts(c, lex);
  CHECK(group_by_tree(hc.rows, lex, 2).at("C23.888") == hc.rows[0].article_count);
}

TEST_CASE("co-mention matrix on captions") {
  Lexicon lex = lexicon_from_tsv("F1\tEdema\tF\tedema\nF2\tMass\tF\tmass\nF3\tNodule\tF\tnodule\n");
  Corpus c = make_corpus({{"1", "t", "a", "", {}, {"Edema and a mass."}},
                          {"2", "t", "a", "", {}, {"mass with edema", "nodule"}},
                          {"3", "edema mass", "a", "", {}, {"nodule"}}});
  TaggingOptions opts;
  opts.passage_kinds = {PassageKind::Caption};
  auto m = comention_matrix(c, lex, opts);
  auto idx = [&](const char* id) {
    auto k = *lex.index_of(id);
    return static_cast<std::size_t>(std::find(m.headings.begin(), m.headings.end(), k) - m.headings.begin());
  };
  CHECK(m.at(idx("F1"), idx("F2")) == 2);
  CHECK(m.at(idx("F2"), idx("F1")) == 2);
  CHECK(m.at(idx("F1"), idx("F3")) == 0);
  CHECK(m.at(idx("F3"), idx("F3")) == 2);

  auto top = m.top(2);
  REQUIRE(top.headings.size() == 2);
  CHECK(top.at(0, 0) >= top.at(1, 1));

  TaggingOptions none;
  none.passage_kinds = {PassageKind::Other};
  auto z = comention_matrix(c, lex, none);
  for (const auto& row : z.cells)
    for (auto v : row) CHECK(v == 0);
}

TEST_CASE("co-mention matrix invariants on random corpora") {
  std::mt19937 rng(99);
  Lexicon lex = lexicon_from_tsv(
      "F1\tA\tF\talpha\nF2\tB\tF\tbeta\nF3\tC\tF\tgamma delta\nF4\tD\tF\tepsilon\n");
  const char* words[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "and"};
  for (int round = 0; round < 30; ++round) {
    std::vector<testing::DocSpec> specs;
    for (int d = 0; d < 12; ++d) {
      testing::DocSpec s{std::to_string(d), "t", "a", "", {}, {}};
      for (int p = 0; p < 3; ++p) {
        std::string cap;
        for (int w = 0; w < 6; ++w) cap += std::string(words[rng() % 7]) + " ";
        s.captions.push_back(cap);
      }
      specs.push_back(s);
    }
    Corpus c = make_corpus(specs);
    TaggingOptions opts;
    opts.passage_kinds = {PassageKind::Caption};
    auto m = comention_matrix(c, lex, opts);
    for (std::size_t a = 0; a < m.headings.size(); ++a) {
      for (std::size_t b = 0; b < m.headings.size(); ++b) {
        CHECK(m.at(a, b) == m.at(b, a));
        CHECK(m.at(a, b) <= std::min(m.at(a, a), m.at(b, b)));
      }
    }
    auto hc = heading_article_counts(c, lex, opts);
    for (const auto& r : hc.rows) {
      auto k = *lex.index_of(r.heading_id);
      auto pos = static_cast<std::size_t>(std::find(m.headings.begin(), m.headings.end(), k) - m.headings.begin());
      CHECK(m.at(pos, pos) == r.article_count);
    }
    opts.threads = 3;
    CHECK(comention_matrix(c, lex, opts).cells == m.cells);
  }
}

TEST_CASE("heading counts match the naive scan") {
  std::mt19937 rng(31337);
  for (int round = 0; round < 60; ++round) {
    auto mc = testing::random_mini_case(rng);
    Lexicon lex = Lexicon::build(mc.headings);
    auto hc = heading_article_counts(mc.corpus, lex);
    auto naive = testing::naive_heading_docs(mc.corpus, mc.headings);
    REQUIRE(hc.rows.size() == naive.size());
    for (const auto& r : hc.rows) {
      const auto& docs = naive.at(r.heading_id);
      CHECK(r.article_count == docs.size());
      CHECK(r.docs == std::vector<std::size_t>(docs.begin(), docs.end()));
    }
    TaggingOptions par;
    par.threads = 4;
    auto hp = heading_article_counts(mc.corpus, lex, par);
    REQUIRE(hp.rows.size() == hc.rows.size());
    for (std::size_t i = 0; i < hc.rows.size(); ++i) CHECK(hp.rows[i].docs == hc.rows[i].docs);
  }
}

TEST_CASE("matches never overlap and passage order does not change counts") {
  Lexicon lex = lexicon_from_tsv(
      "H1\tA\tC23.1\tsore throat\nH2\tB\tC23.2\tthroat\nH3\tC\tC23.3\tsore\nH4\tD\tC23.4\tthroat pain\n");
  std::mt19937 rng(5);
  const char* words[] = {"sore", "throat", "pain", "and"};
  for (int round = 0; round < 50; ++round) {
    std::string text;
    for (int i = 0; i < 12; ++i) text += std::string(words[rng() % 4]) + " ";
    auto ms = tag_text(lex, text);
    for (std::size_t i = 1; i < ms.size(); ++i) CHECK(ms[i - 1].end <= ms[i].start);
    Corpus fwd = make_corpus({{"1", "x", "y", "", {}, {text, "sore"}}});
    Corpus rev = make_corpus({{"1", "x", "y", "", {}, {"sore", text}}});
    TaggingOptions opts;
    opts.passage_kinds = {PassageKind::Caption};
    auto a = heading_article_counts(fwd, lex, opts);
    auto b = heading_article_counts(rev, lex, opts);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].heading_id == b.rows[i].heading_id);
  }
}

TEST_CASE("display name falls back to the shortest entry term") {
  Lexicon lex = Lexicon::build({Heading{"H1", "", {"pyrexia", "fever"}, {"C23.1"}}});
  CHECK(lex.display_name(0) == "fever");
}
