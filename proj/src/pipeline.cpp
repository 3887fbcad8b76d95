#include "litscape/pipeline.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "litscape/errors.hpp"
#include "litscape/pdc.hpp"
#include "litscape/text.hpp"

namespace litscape {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 6> kStageNames = {{
    {Stage::Ingest, "ingest"},
    {Stage::Stats, "stats"},
    {Stage::Entities, "entities"},
    {Stage::Symptoms, "symptoms"},
    {Stage::Compare, "compare"},
    {Stage::Topics, "topics"},
}};

constexpr std::array<std::pair<PlotKind, std::string_view>, 7> kPlotNames = {{
    {PlotKind::GrowthCurve, "growth_curve"},
    {PlotKind::CategoryBars, "category_bars"},
    {PlotKind::TrendLines, "trend_lines"},
    {PlotKind::ComentionHeatmap, "comention_heatmap"},
    {PlotKind::TopicTimeline, "topic_timeline"},
    {PlotKind::CategoryHeatmap, "category_heatmap"},
    {PlotKind::OrganIntensity, "organ_intensity"},
}};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

// Writes one TSV report and counts its data rows.
class TsvWriter {
 public:
  TsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
    write_line(header);
  }
  void row(const std::vector<std::string>& fields) {
    write_line(fields);
    ++rows_;
  }
  std::size_t finish() {
    out_.flush();
    if (!out_) throw Error("write failed");
    return rows_;
  }

 private:
  void write_line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << '\t';
      out_ << text::tsv_escape(fields[i]);
    }
    out_ << '\n';
  }
  std::ofstream out_;
  std::size_t rows_ = 0;
};

std::string week_start(const Date& anchor, std::int64_t week) { return anchor.plus_days(7 * week).iso(); }

std::string resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal().generic_string();
}

// ---- config parsing -------------------------------------------------------

const ojson& require_type(const ojson& v, ojson::value_t type, const std::string& key) {
  bool ok = v.type() == type ||
            (type == ojson::value_t::number_float && v.is_number()) ||
            (type == ojson::value_t::number_unsigned && v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) throw ConfigError("config key '" + key + "' has the wrong type");
  return v;
}

std::string get_string(const ojson& v, const std::string& key) {
  return require_type(v, ojson::value_t::string, key).get<std::string>();
}

std::size_t get_size(const ojson& v, const std::string& key) {
  return require_type(v, ojson::value_t::number_unsigned, key).get<std::size_t>();
}

double get_double(const ojson& v, const std::string& key) {
  return require_type(v, ojson::value_t::number_float, key).get<double>();
}

void check_keys(const ojson& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

CorpusInputs corpus_from_json(const ojson& j, const fs::path& base, const std::string& where) {
  check_keys(j, {"pubtator", "sidecar", "passages"}, where);
  CorpusInputs in;
  if (j.contains("pubtator")) {
    const auto& p = j["pubtator"];
    if (p.is_string()) {
      in.pubtator.push_back(resolve(base, p.get<std::string>()));
    } else if (p.is_array()) {
      for (const auto& e : p) in.pubtator.push_back(resolve(base, get_string(e, where + ".pubtator")));
    } else {
      throw ConfigError("config key '" + where + ".pubtator' must be a path or a list of paths");
    }
  }
  if (j.contains("sidecar")) in.sidecar = resolve(base, get_string(j["sidecar"], where + ".sidecar"));
  if (j.contains("passages")) in.passages = resolve(base, get_string(j["passages"], where + ".passages"));
  return in;
}

std::vector<PassageKind> kinds_from_json(const ojson& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("config key '" + key + "' must be a list");
  std::vector<PassageKind> kinds;
  for (const auto& e : j) {
    try {
      kinds.push_back(parse_passage_kind(get_string(e, key)));
    } catch (const std::invalid_argument&) {
      throw ConfigError("config key '" + key + "' has an unknown passage kind");
    }
  }
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  return kinds;
}

RunConfig config_from_ojson(const ojson& j, const fs::path& base) {
  check_keys(j,
             {"corpus", "compare_corpus", "lexicons", "symptom_branch", "stopwords", "association_table",
              "anchor_date", "z", "min_df", "threshold", "max_passes", "onset_top_k", "category_top_n",
              "entity_top_k", "title_words", "tree_depth", "min_topic_terms", "organ_top_n",
              "finding_top_n", "symptom_passages", "comention_passages", "mode", "threads", "out_dir"},
             "");
  RunConfig cfg;
  if (j.contains("corpus")) cfg.corpus = corpus_from_json(j["corpus"], base, "corpus");
  if (j.contains("compare_corpus")) cfg.compare_corpus = corpus_from_json(j["compare_corpus"], base, "compare_corpus");
  if (j.contains("lexicons")) {
    const auto& lx = j["lexicons"];
    check_keys(lx, {"symptoms", "organs", "findings"}, "lexicons");
    if (lx.contains("symptoms")) cfg.symptom_lexicon = resolve(base, get_string(lx["symptoms"], "lexicons.symptoms"));
    if (lx.contains("organs")) cfg.organ_lexicon = resolve(base, get_string(lx["organs"], "lexicons.organs"));
    if (lx.contains("findings")) cfg.finding_lexicon = resolve(base, get_string(lx["findings"], "lexicons.findings"));
  }
  if (j.contains("symptom_branch")) {
    if (j["symptom_branch"].is_null()) cfg.symptom_branch.reset();
    else cfg.symptom_branch = get_string(j["symptom_branch"], "symptom_branch");
  }
  if (j.contains("stopwords")) cfg.stopwords = resolve(base, get_string(j["stopwords"], "stopwords"));
  if (j.contains("association_table")) {
    cfg.association_table = resolve(base, get_string(j["association_table"], "association_table"));
  }
  if (j.contains("anchor_date")) {
    try {
      cfg.anchor = Date::parse(get_string(j["anchor_date"], "anchor_date"));
    } catch (const BadDate& e) {
      throw ConfigError(std::string("anchor_date: ") + e.what());
    }
  }
  if (j.contains("z")) cfg.z = get_double(j["z"], "z");
  if (j.contains("min_df")) cfg.min_df = get_size(j["min_df"], "min_df");
  if (j.contains("threshold")) {
    const auto& t = j["threshold"];
    check_keys(t, {"mode", "value"}, "threshold");
    std::string mode = t.contains("mode") ? get_string(t["mode"], "threshold.mode") : "percentile";
    double value = t.contains("value") ? get_double(t["value"], "threshold.value") : 0.9;
    if (mode == "percentile") cfg.threshold = ThresholdRule::percentile(value);
    else if (mode == "fixed") cfg.threshold = ThresholdRule::fixed(value);
    else throw ConfigError("threshold.mode must be 'percentile' or 'fixed'");
  }
  auto size_field = [&](const char* key, std::size_t& dst) {
    if (j.contains(key)) dst = get_size(j[key], key);
  };
  size_field("max_passes", cfg.max_passes);
  size_field("onset_top_k", cfg.onset_top_k);
  size_field("category_top_n", cfg.category_top_n);
  size_field("entity_top_k", cfg.entity_top_k);
  size_field("title_words", cfg.title_words);
  size_field("tree_depth", cfg.tree_depth);
  size_field("min_topic_terms", cfg.min_topic_terms);
  size_field("organ_top_n", cfg.organ_top_n);
  size_field("finding_top_n", cfg.finding_top_n);
  if (j.contains("symptom_passages")) cfg.symptom_passages = kinds_from_json(j["symptom_passages"], "symptom_passages");
  if (j.contains("comention_passages")) {
    cfg.comention_passages = kinds_from_json(j["comention_passages"], "comention_passages");
  }
  if (j.contains("mode")) {
    std::string m = get_string(j["mode"], "mode");
    if (m == "strict") cfg.mode = ParseMode::Strict;
    else if (m == "lenient") cfg.mode = ParseMode::Lenient;
    else throw ConfigError("mode must be 'strict' or 'lenient'");
  }
  if (j.contains("threads")) cfg.threads = static_cast<unsigned>(get_size(j["threads"], "threads"));
  if (j.contains("out_dir")) cfg.out_dir = resolve(base, get_string(j["out_dir"], "out_dir"));
  return cfg;
}

ojson corpus_to_json(const CorpusInputs& in) {
  ojson j = ojson::object();
  j["pubtator"] = in.pubtator;
  j["sidecar"] = in.sidecar ? ojson(*in.sidecar) : ojson(nullptr);
  j["passages"] = in.passages ? ojson(*in.passages) : ojson(nullptr);
  return j;
}

ojson opt_json(const std::optional<std::string>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson kinds_json(const std::vector<PassageKind>& kinds) {
  ojson a = ojson::array();
  for (auto k : kinds) a.push_back(std::string(passage_kind_name(k)));
  return a;
}

PassageKindSet kind_set(const std::vector<PassageKind>& kinds) {
  PassageKindSet s;
  for (auto k : kinds) s.insert(k);
  return s;
}

// ---- stage runner ---------------------------------------------------------

class Runner {
 public:
  Runner(const RunConfig& cfg, RunReport& report) : cfg_(cfg), report_(report), out_(cfg.out_dir) {}

  void ingest(bool write) {
    report_.corpus = load_corpus(cfg_.corpus, &report_.parse_stats);
    if (write) {
      fs::path path = out_ / "corpus.jsonl";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error("cannot open '" + path.string() + "' for writing");
      write_canonical(report_.corpus, out);
      out.flush();
      if (!out) throw Error("write failed");
      record("corpus.jsonl", Stage::Ingest, report_.corpus.size());
    }
  }

  void stats() {
    const Corpus& corpus = report_.corpus;
    report_.histogram = weekly_histogram(corpus, cfg_.anchor);
    {
      TsvWriter w(out_ / "weekly_histogram.tsv", {"week", "week_start", "count"});
      for (const auto& wc : report_.histogram->weeks) {
        w.row({fmt_int(wc.week), week_start(cfg_.anchor, wc.week), std::to_string(wc.count)});
      }
      w.row({"undated", "", std::to_string(report_.histogram->undated)});
      record("weekly_histogram.tsv", Stage::Stats, w.finish());
    }
    report_.categories = category_stats(corpus);
    const CategoryStats& cs = *report_.categories;
    TsvWriter w(out_ / "category_report.tsv", {"section", "key", "count"});
    w.row({"documents", "all", std::to_string(corpus.size())});
    for (Category c : kAllCategories) {
      w.row({"label", std::string(category_name(c)), std::to_string(cs.label_count(c))});
    }
    static constexpr std::array<const char*, 4> buckets = {"0", "1", "2", "3+"};
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      w.row({"labels_per_document", buckets[i], std::to_string(cs.by_label_count[i])});
    }
    for (const auto& p : cs.ranked_pairs()) {
      w.row({"pair", std::string(category_name(p.a)) + "|" + std::string(category_name(p.b)),
             std::to_string(p.count)});
    }
    record("category_report.tsv", Stage::Stats, w.finish());
  }

  void entities() {
    const Corpus& corpus = report_.corpus;
    EntityCountOptions opts;
    opts.threads = cfg_.threads;
    report_.entities = mention_counts(corpus, opts);
    const auto& counts = *report_.entities;
    {
      TsvWriter w(out_ / "entity_counts.tsv", {"type", "display_name", "concept_id", "article_count", "mention_count"});
      for (const auto& ec : counts) w.row(entity_fields(ec));
      record("entity_counts.tsv", Stage::Entities, w.finish());
    }

    std::map<std::string, std::string> assoc;
    if (cfg_.association_table) {
      std::ifstream in(*cfg_.association_table, std::ios::binary);
      if (!in) throw Error("cannot read association table");
      assoc = parse_association_table(in);
    }
    std::map<std::string, std::vector<EntityCount>> by_type;
    for (const auto& ec : counts) by_type[ec.key.id.concept_type].push_back(ec);

    std::vector<std::string> header = {"type", "rank", "display_name", "concept_id", "article_count", "mention_count"};
    if (cfg_.association_table) header.push_back("associated_gene");
    TsvWriter top(out_ / "entity_top.tsv", header);
    report_.trends.clear();
    for (const auto& [type, rows] : by_type) {
      auto best = top_k(rows, cfg_.entity_top_k);
      for (std::size_t r = 0; r < best.size(); ++r) {
        const auto& ec = best[r];
        auto f = entity_fields(ec);
        std::vector<std::string> row = {f[0], std::to_string(r + 1), f[1], f[2], f[3], f[4]};
        if (cfg_.association_table) {
          auto it = assoc.find(ec.key.display_name);
          if (it == assoc.end()) it = assoc.find(ec.key.id.key);
          row.push_back(it == assoc.end() ? "" : it->second);
        }
        top.row(row);
        report_.trends.emplace_back(ec.key, weekly_trend(corpus, ec.key.id, cfg_.anchor));
      }
    }
    record("entity_top.tsv", Stage::Entities, top.finish());

    TsvWriter tw(out_ / "entity_trends.tsv", {"type", "display_name", "concept_id", "week", "week_start", "article_count"});
    for (const auto& [key, series] : report_.trends) {
      for (const auto& wc : series) {
        tw.row({key.id.concept_type, key.display_name, key.id.from_mention ? "" : key.id.key, fmt_int(wc.week),
                week_start(cfg_.anchor, wc.week), std::to_string(wc.count)});
      }
    }
    record("entity_trends.tsv", Stage::Entities, tw.finish());
  }

  void symptoms(bool write) {
    ensure_symptom_lexicon();
    const Corpus& corpus = report_.corpus;
    const Lexicon& lex = *report_.symptom_lexicon;
    report_.symptoms = heading_article_counts(corpus, lex, tagging(cfg_.symptom_passages));
    if (!write) return;

    write_heading_counts(out_ / "heading_counts.tsv", "heading_counts.tsv", *report_.symptoms, corpus.size());

    auto groups = group_by_tree(report_.symptoms->rows, lex, cfg_.tree_depth);
    std::vector<std::pair<std::string, std::size_t>> ordered(groups.begin(), groups.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    {
      TsvWriter w(out_ / "symptom_groups.tsv", {"tree_prefix", "article_count"});
      for (const auto& [prefix, n] : ordered) w.row({prefix, std::to_string(n)});
      record("symptom_groups.tsv", Stage::Symptoms, w.finish());
    }
    {
      PassageKindSet allowed = kind_set(cfg_.symptom_passages);
      TsvWriter w(out_ / "symptom_matches.tsv", {"doc_id", "passage_index", "start", "end", "matched_term", "heading_id"});
      for (const auto& doc : corpus.documents()) {
        auto passages = doc.passages();
        for (const auto& m : tag_document(lex, doc)) {
          if (!allowed.contains(passages[m.passage_index].kind)) continue;
          w.row({m.doc_id, std::to_string(m.passage_index), std::to_string(m.start), std::to_string(m.end),
                 m.matched_term, m.heading_id});
        }
      }
      record("symptom_matches.tsv", Stage::Symptoms, w.finish());
    }
    if (cfg_.organ_lexicon) {
      report_.organ_lexicon = read_lexicon(*cfg_.organ_lexicon, std::nullopt);
      report_.organs = heading_article_counts(corpus, *report_.organ_lexicon, tagging(cfg_.symptom_passages));
      write_heading_counts(out_ / "organ_counts.tsv", "organ_counts.tsv", *report_.organs, corpus.size());
    }
    if (cfg_.finding_lexicon) {
      report_.finding_lexicon = read_lexicon(*cfg_.finding_lexicon, std::nullopt);
      report_.findings =
          comention_matrix(corpus, *report_.finding_lexicon, tagging(cfg_.comention_passages)).top(cfg_.finding_top_n);
      TsvWriter w(out_ / "finding_comentions.tsv", {"finding_a", "finding_b", "documents"});
      write_matrix(w, *report_.findings, *report_.finding_lexicon);
      record("finding_comentions.tsv", Stage::Symptoms, w.finish());
    }
  }

  void compare() {
    if (!report_.symptoms) symptoms(false);
    ParseStats stats;
    report_.compare_corpus = load_corpus(cfg_.compare_corpus, &stats);
    auto counts_b = heading_article_counts(*report_.compare_corpus, *report_.symptom_lexicon,
                                           tagging(cfg_.symptom_passages));
    auto freq = [](const HeadingCounts& hc) {
      std::vector<HeadingFrequency> out;
      for (const auto& r : hc.rows) out.push_back({r.heading_id, r.name, r.article_count});
      return out;
    };
    report_.comparison = compare_corpora(freq(*report_.symptoms), report_.corpus.size(), freq(counts_b),
                                         report_.compare_corpus->size(), cfg_.z);
    TsvWriter w(out_ / "comparison.tsv",
                {"heading", "k_a", "n_a", "lo_a", "hi_a", "k_b", "n_b", "lo_b", "hi_b", "verdict"});
    for (const auto& r : *report_.comparison) {
      w.row({r.name, std::to_string(r.k_a), std::to_string(r.n_a), fmt_double(r.ci_a.lo), fmt_double(r.ci_a.hi),
             std::to_string(r.k_b), std::to_string(r.n_b), fmt_double(r.ci_b.lo), fmt_double(r.ci_b.hi),
             std::string(verdict_name(r.verdict))});
    }
    record("comparison.tsv", Stage::Compare, w.finish());
  }

  void topics() {
    const Corpus& corpus = report_.corpus;
    Stopwords stop;
    if (cfg_.stopwords) {
      std::ifstream in(*cfg_.stopwords, std::ios::binary);
      if (!in) throw Error("cannot read stopwords file");
      stop = parse_stopwords(in);
    } else {
      stop = default_stopwords();
    }
    TermOptions topts;
    topts.min_df = cfg_.min_df;
    topts.threads = cfg_.threads;
    report_.vocabulary = std::make_unique<TermVocabulary>(extract_terms(corpus, stop, topts));
    const TermVocabulary& vocab = *report_.vocabulary;
    {
      TsvWriter w(out_ / "terms.tsv", {"term", "document_frequency"});
      for (TermIndex t = 0; t < vocab.size(); ++t) w.row({vocab.terms[t], std::to_string(vocab.df(t))});
      record("terms.tsv", Stage::Topics, w.finish());
    }

    PdcOptions popts;
    popts.max_passes = cfg_.max_passes;
    PdcResult clusters = pdc_cluster(vocab, popts);
    {
      TsvWriter w(out_ / "pdc_passes.tsv", {"pass", "total_affinity"});
      for (std::size_t p = 0; p < clusters.pass_totals.size(); ++p) {
        w.row({std::to_string(p), fmt_double(clusters.pass_totals[p])});
      }
      record("pdc_passes.tsv", Stage::Topics, w.finish());
    }

    TopicPartition part = make_partition(clusters, vocab);
    ScoreOptions sopts;
    sopts.threshold = cfg_.threshold;
    sopts.threads = cfg_.threads;
    score_documents(part, corpus, sopts);
    for (auto& topic : part.topics) {
      topic.title = make_title(topic.terms, cfg_.title_words);
      try {
        topic.onset_week = topic_onset(topic, corpus, cfg_.onset_top_k, cfg_.anchor);
      } catch (const NoDatedDocuments&) {
        topic.onset_week.reset();
      }
      topic.category = associate_category(topic, corpus, cfg_.category_top_n);
    }
    report_.heatmap = category_heatmap(part, corpus);

    {
      fs::path path = out_ / "topics.jsonl";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error("cannot open '" + path.string() + "' for writing");
      for (const auto& topic : part.topics) {
        ojson j;
        j["topic_id"] = topic.topic_id;
        j["title"] = topic.title;
        j["significant"] = topic.significant(cfg_.min_topic_terms);
        j["threshold"] = fmt_double(topic.threshold);
        j["onset_week"] = topic.onset_week ? ojson(*topic.onset_week) : ojson(nullptr);
        j["category"] = topic.category ? ojson(std::string(category_name(*topic.category))) : ojson(nullptr);
        ojson terms = ojson::array();
        for (const auto& t : topic.terms) terms.push_back({{"term", t.term}, {"weight", fmt_double(t.weight)}});
        j["terms"] = std::move(terms);
        ojson docs = ojson::array();
        for (const auto& d : topic.assigned_docs) {
          docs.push_back({{"doc_id", vocab.doc_ids[d.doc]}, {"score", fmt_double(d.score)}});
        }
        j["assigned_docs"] = std::move(docs);
        out << j.dump() << '\n';
      }
      out.flush();
      if (!out) throw Error("write failed");
      record("topics.jsonl", Stage::Topics, part.topics.size());
    }
    {
      TsvWriter w(out_ / "topic_summary.tsv", {"topic_id", "title", "term_count", "significant", "assigned_docs",
                                               "onset_week", "onset_week_start", "category", "top_terms"});
      for (const auto& topic : part.topics) {
        std::vector<std::string> top;
        for (std::size_t i = 0; i < topic.terms.size() && i < 10; ++i) top.push_back(topic.terms[i].term);
        w.row({std::to_string(topic.topic_id), topic.title, std::to_string(topic.terms.size()),
               topic.significant(cfg_.min_topic_terms) ? "yes" : "no", std::to_string(topic.assigned_docs.size()),
               topic.onset_week ? fmt_int(*topic.onset_week) : "",
               topic.onset_week ? week_start(cfg_.anchor, *topic.onset_week) : "",
               topic.category ? std::string(category_name(*topic.category)) : "", text::join(top, "|")});
      }
      record("topic_summary.tsv", Stage::Topics, w.finish());
    }
    {
      TsvWriter w(out_ / "category_heatmap.tsv", heatmap_header());
      write_heatmap(w, *report_.heatmap);
      record("category_heatmap.tsv", Stage::Topics, w.finish());
    }
    report_.topics = std::move(part);
    report_.topics->vocabulary = report_.vocabulary.get();
  }

 private:
  Corpus load_corpus(const CorpusInputs& in, ParseStats* stats) {
    Corpus corpus;
    for (const auto& path : in.pubtator) {
      std::ifstream f(path, std::ios::binary);
      if (!f) throw Error("cannot read '" + path + "'");
      ParseStats part;
      corpus.merge(parse_pubtator(f, cfg_.mode, &part));
      stats->documents += part.documents;
      stats->annotations += part.annotations;
      stats->skipped_lines += part.skipped_lines;
      stats->dropped_annotations += part.dropped_annotations;
      stats->newline_offset_fallbacks += part.newline_offset_fallbacks;
    }
    if (in.sidecar) {
      std::ifstream f(*in.sidecar, std::ios::binary);
      if (!f) throw Error("cannot read '" + *in.sidecar + "'");
      merge_metadata(corpus, parse_corpus_sidecar(f));
    }
    if (in.passages) {
      std::ifstream f(*in.passages, std::ios::binary);
      if (!f) throw Error("cannot read '" + *in.passages + "'");
      merge_passages(corpus, f);
    }
    return corpus;
  }

  Lexicon read_lexicon(const std::string& path, std::optional<std::string> branch) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read '" + path + "'");
    return compile_lexicon(f, std::move(branch));
  }

  void ensure_symptom_lexicon() {
    if (!report_.symptom_lexicon) report_.symptom_lexicon = read_lexicon(*cfg_.symptom_lexicon, cfg_.symptom_branch);
  }

  TaggingOptions tagging(const std::vector<PassageKind>& kinds) const {
    TaggingOptions opts;
    opts.passage_kinds = kind_set(kinds);
    opts.threads = cfg_.threads;
    return opts;
  }

  static std::vector<std::string> entity_fields(const EntityCount& ec) {
    return {ec.key.id.concept_type, ec.key.display_name, ec.key.id.from_mention ? "" : ec.key.id.key,
            std::to_string(ec.article_count), std::to_string(ec.mention_count)};
  }

  void write_heading_counts(const fs::path& path, const std::string& name, const HeadingCounts& hc, std::size_t n) {
    TsvWriter w(path, {"heading_id", "name", "article_count", "share"});
    for (const auto& r : hc.rows) {
      w.row({r.heading_id, r.name, std::to_string(r.article_count),
             fmt_double(n ? static_cast<double>(r.article_count) / static_cast<double>(n) : 0.0)});
    }
    w.row({"", "ANY", std::to_string(hc.docs_with_any_match),
           fmt_double(n ? static_cast<double>(hc.docs_with_any_match) / static_cast<double>(n) : 0.0)});
    record(name, Stage::Symptoms, w.finish());
  }

  void record(const std::string& path, Stage stage, std::size_t rows) {
    report_.outputs.push_back({path, std::string(stage_name(stage)), rows});
  }

  const RunConfig& cfg_;
  RunReport& report_;
  fs::path out_;

 public:
  static std::vector<std::string> heatmap_header() {
    std::vector<std::string> h = {"primary", "topics"};
    for (Category c : kAllCategories) h.emplace_back(category_name(c));
    return h;
  }

  static void write_heatmap(TsvWriter& w, const CategoryHeatmap& hm) {
    for (Category p : kAllCategories) {
      auto pi = static_cast<std::size_t>(p);
      std::vector<std::string> row = {std::string(category_name(p)), std::to_string(hm.topics_per_row[pi])};
      for (std::size_t q = 0; q < kNumCategories; ++q) row.push_back(fmt_double(hm.cells[pi][q]));
      w.row(row);
    }
  }

  static void write_matrix(TsvWriter& w, const CoMentionMatrix& m, const Lexicon& lex) {
    for (std::size_t r = 0; r < m.headings.size(); ++r) {
      for (std::size_t c = 0; c < m.headings.size(); ++c) {
        w.row({lex.display_name(m.headings[r]), lex.display_name(m.headings[c]), std::to_string(m.at(r, c))});
      }
    }
  }
};

void check_path(const std::optional<std::string>& p, const std::string& what) {
  if (p && !fs::is_regular_file(*p)) throw ConfigError(what + " '" + *p + "' does not exist");
}

void check_corpus(const CorpusInputs& in, const std::string& what) {
  if (in.pubtator.empty()) throw ConfigError(what + " has no annotation files");
  for (const auto& p : in.pubtator) check_path(p, what + " file");
  check_path(in.sidecar, what + " sidecar");
  check_path(in.passages, what + " passages file");
}

}  // namespace

std::string_view stage_name(Stage s) {
  for (const auto& [stage, name] : kStageNames) {
    if (stage == s) return name;
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (const auto& [stage, n] : kStageNames) {
    if (n == name) return stage;
  }
  throw ConfigError("unknown stage '" + std::string(name) + "'");
}

std::string_view plot_kind_name(PlotKind k) {
  for (const auto& [kind, name] : kPlotNames) {
    if (kind == k) return name;
  }
  return "?";
}

PlotKind parse_plot_kind(std::string_view name) {
  for (const auto& [kind, n] : kPlotNames) {
    if (n == name) return kind;
  }
  throw ConfigError("unknown plot kind '" + std::string(name) + "'");
}

Stage plot_kind_stage(PlotKind k) {
  switch (k) {
    case PlotKind::GrowthCurve:
    case PlotKind::CategoryBars:
      return Stage::Stats;
    case PlotKind::TrendLines:
      return Stage::Entities;
    case PlotKind::ComentionHeatmap:
    case PlotKind::OrganIntensity:
      return Stage::Symptoms;
    case PlotKind::TopicTimeline:
    case PlotKind::CategoryHeatmap:
      return Stage::Topics;
  }
  return Stage::Stats;
}

RunConfig config_from_json(std::string_view json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_ojson(j, {});
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ojson j;
  try {
    j = ojson::parse(buf.str());
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_ojson(j, fs::path(path).parent_path());
}

std::string canonical_config_json(const RunConfig& cfg) {
  ojson j;
  j["corpus"] = corpus_to_json(cfg.corpus);
  j["compare_corpus"] = corpus_to_json(cfg.compare_corpus);
  j["lexicons"] = {{"symptoms", opt_json(cfg.symptom_lexicon)},
                   {"organs", opt_json(cfg.organ_lexicon)},
                   {"findings", opt_json(cfg.finding_lexicon)}};
  j["symptom_branch"] = opt_json(cfg.symptom_branch);
  j["stopwords"] = opt_json(cfg.stopwords);
  j["association_table"] = opt_json(cfg.association_table);
  j["anchor_date"] = cfg.anchor.iso();
  j["z"] = fmt_double(cfg.z);
  j["min_df"] = cfg.min_df;
  j["threshold"] = {{"mode", cfg.threshold.mode == ThresholdRule::Mode::Fixed ? "fixed" : "percentile"},
                    {"value", fmt_double(cfg.threshold.value)}};
  j["max_passes"] = cfg.max_passes;
  j["onset_top_k"] = cfg.onset_top_k;
  j["category_top_n"] = cfg.category_top_n;
  j["entity_top_k"] = cfg.entity_top_k;
  j["title_words"] = cfg.title_words;
  j["tree_depth"] = cfg.tree_depth;
  j["min_topic_terms"] = cfg.min_topic_terms;
  j["organ_top_n"] = cfg.organ_top_n;
  j["finding_top_n"] = cfg.finding_top_n;
  j["symptom_passages"] = kinds_json(cfg.symptom_passages);
  j["comention_passages"] = kinds_json(cfg.comention_passages);
  j["mode"] = cfg.mode == ParseMode::Strict ? "strict" : "lenient";
  return j.dump();
}

void validate_config(const RunConfig& cfg, const std::set<Stage>& stages) {
  if (stages.empty()) throw ConfigError("no stages selected");
  check_corpus(cfg.corpus, "corpus");
  check_path(cfg.symptom_lexicon, "symptom lexicon");
  check_path(cfg.organ_lexicon, "organ lexicon");
  check_path(cfg.finding_lexicon, "finding lexicon");
  check_path(cfg.stopwords, "stopwords file");
  check_path(cfg.association_table, "association table");
  if (!(cfg.z > 0.0)) throw ConfigError("z must be positive");
  if (cfg.min_df < 1) throw ConfigError("min_df must be at least 1");
  if (cfg.threshold.mode == ThresholdRule::Mode::Percentile &&
      !(cfg.threshold.value > 0.0 && cfg.threshold.value <= 1.0)) {
    throw ConfigError("threshold percentile must lie in (0, 1]");
  }
  if (cfg.threshold.mode == ThresholdRule::Mode::Fixed && !(cfg.threshold.value >= 0.0)) {
    throw ConfigError("fixed threshold must be non-negative");
  }
  for (auto [value, name] : {std::pair{cfg.max_passes, "max_passes"}, {cfg.onset_top_k, "onset_top_k"},
                             {cfg.category_top_n, "category_top_n"}, {cfg.entity_top_k, "entity_top_k"},
                             {cfg.title_words, "title_words"}, {cfg.tree_depth, "tree_depth"},
                             {cfg.min_topic_terms, "min_topic_terms"}, {cfg.organ_top_n, "organ_top_n"},
                             {cfg.finding_top_n, "finding_top_n"}}) {
    if (value < 1) throw ConfigError(std::string(name) + " must be at least 1");
  }
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.out_dir.empty()) throw ConfigError("out_dir must not be empty");
  bool needs_symptoms = stages.count(Stage::Symptoms) || stages.count(Stage::Compare);
  if (needs_symptoms && !cfg.symptom_lexicon) throw ConfigError("symptom stages need a symptom lexicon");
  if (stages.count(Stage::Symptoms) && cfg.symptom_passages.empty()) {
    throw ConfigError("symptom_passages must not be empty");
  }
  if (stages.count(Stage::Compare)) check_corpus(cfg.compare_corpus, "compare stage needs a second corpus; compare_corpus");
}

bool RunReport::ran(Stage s) const { return std::find(completed.begin(), completed.end(), s) != completed.end(); }

std::string fingerprint_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void write_manifest(const RunReport& report) {
  ojson j;
  j["fingerprint"] = report.fingerprint;
  ojson done = ojson::array();
  for (auto s : report.completed) done.push_back(std::string(stage_name(s)));
  j["completed"] = std::move(done);
  if (report.failure) {
    j["failure"] = {{"stage", std::string(stage_name(report.failure->stage))}, {"cause", report.failure->cause}};
  } else {
    j["failure"] = nullptr;
  }
  j["parse"] = {{"documents", report.parse_stats.documents},
                {"annotations", report.parse_stats.annotations},
                {"skipped_lines", report.parse_stats.skipped_lines},
                {"dropped_annotations", report.parse_stats.dropped_annotations},
                {"newline_offset_fallbacks", report.parse_stats.newline_offset_fallbacks}};
  ojson outputs = ojson::array();
  for (const auto& o : report.outputs) outputs.push_back({{"path", o.path}, {"stage", o.stage}, {"rows", o.rows}});
  j["outputs"] = std::move(outputs);
  fs::path path = fs::path(report.out_dir) / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

RunReport run_pipeline(const RunConfig& cfg, const std::set<Stage>& stages) {
  validate_config(cfg, stages);
  RunReport report;
  report.out_dir = cfg.out_dir;
  report.organ_top_n = cfg.organ_top_n;
  report.fingerprint = fingerprint_hex(canonical_config_json(cfg));
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "'");

  Runner runner(cfg, report);
  auto attempt = [&](Stage s, auto&& body) {
    if (report.failure) return;
    try {
      body();
      report.completed.push_back(s);
    } catch (const std::exception& e) {
      report.failure = StageFailure{s, e.what()};
    }
  };

  // Loading the corpus is needed by every stage; it only writes output when selected.
  attempt(Stage::Ingest, [&] { runner.ingest(stages.count(Stage::Ingest) > 0); });
  if (!stages.count(Stage::Ingest) && !report.failure) report.completed.clear();
  for (Stage s : {Stage::Stats, Stage::Entities, Stage::Symptoms, Stage::Compare, Stage::Topics}) {
    if (!stages.count(s)) continue;
    attempt(s, [&] {
      switch (s) {
        case Stage::Stats: runner.stats(); break;
        case Stage::Entities: runner.entities(); break;
        case Stage::Symptoms: runner.symptoms(true); break;
        case Stage::Compare: runner.compare(); break;
        case Stage::Topics: runner.topics(); break;
        case Stage::Ingest: break;
      }
    });
  }
  write_manifest(report);
  return report;
}

std::string emit_plot_data(RunReport& report, PlotKind kind) {
  Stage needed = plot_kind_stage(kind);
  std::string name(plot_kind_name(kind));
  bool available = report.ran(needed);
  if (kind == PlotKind::ComentionHeatmap) available = available && report.findings.has_value();
  if (kind == PlotKind::OrganIntensity) available = available && report.organs.has_value();
  if (kind == PlotKind::TopicTimeline || kind == PlotKind::CategoryHeatmap) {
    available = available && report.topics.has_value();
  }
  if (!available) throw MissingStage(name);

  fs::path dir = fs::path(report.out_dir) / "plots";
  fs::create_directories(dir);
  std::string rel = "plots/" + name + ".tsv";
  fs::path path = dir / (name + ".tsv");
  std::size_t rows = 0;

  switch (kind) {
    case PlotKind::GrowthCurve: {
      TsvWriter w(path, {"week", "count"});
      for (const auto& wc : report.histogram->weeks) w.row({fmt_int(wc.week), std::to_string(wc.count)});
      rows = w.finish();
      break;
    }
    case PlotKind::CategoryBars: {
      TsvWriter w(path, {"category", "count"});
      for (Category c : kAllCategories) {
        w.row({std::string(category_name(c)), std::to_string(report.categories->label_count(c))});
      }
      rows = w.finish();
      break;
    }
    case PlotKind::TrendLines: {
      TsvWriter w(path, {"series", "type", "week", "article_count"});
      for (const auto& [key, series] : report.trends) {
        for (const auto& wc : series) {
          w.row({key.display_name, key.id.concept_type, fmt_int(wc.week), std::to_string(wc.count)});
        }
      }
      rows = w.finish();
      break;
    }
    case PlotKind::ComentionHeatmap: {
      TsvWriter w(path, {"finding_a", "finding_b", "documents"});
      Runner::write_matrix(w, *report.findings, *report.finding_lexicon);
      rows = w.finish();
      break;
    }
    case PlotKind::TopicTimeline: {
      TsvWriter w(path, {"topic_id", "title", "onset_week", "doc_count", "category"});
      for (const auto& t : report.topics->topics) {
        if (!t.onset_week) continue;
        w.row({std::to_string(t.topic_id), t.title, fmt_int(*t.onset_week), std::to_string(t.assigned_docs.size()),
               t.category ? std::string(category_name(*t.category)) : ""});
      }
      rows = w.finish();
      break;
    }
    case PlotKind::CategoryHeatmap: {
      TsvWriter w(path, Runner::heatmap_header());
      Runner::write_heatmap(w, *report.heatmap);
      rows = w.finish();
      break;
    }
    case PlotKind::OrganIntensity: {
      TsvWriter w(path, {"heading", "article_count"});
      const auto& organ_rows = report.organs->rows;
      for (std::size_t i = 0; i < organ_rows.size() && i < report.organ_top_n; ++i) {
        w.row({organ_rows[i].name, std::to_string(organ_rows[i].article_count)});
      }
      rows = w.finish();
      break;
    }
  }
  auto it = std::find_if(report.outputs.begin(), report.outputs.end(), [&](const OutputRecord& o) { return o.path == rel; });
  if (it == report.outputs.end()) report.outputs.push_back({rel, "report", rows});
  else it->rows = rows;
  write_manifest(report);
  return path.generic_string();
}

}  // namespace litscape
