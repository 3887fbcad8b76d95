#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "litscape/compare.hpp"
#include "litscape/corpus.hpp"
#include "litscape/corpus_stats.hpp"
#include "litscape/entity_stats.hpp"
#include "litscape/formats.hpp"
#include "litscape/lexicon.hpp"
#include "litscape/terms.hpp"
#include "litscape/topics.hpp"

namespace litscape {

enum class Stage { Ingest, Stats, Entities, Symptoms, Compare, Topics };

std::string_view stage_name(Stage s);
Stage parse_stage(std::string_view name);  // throws ConfigError

enum class PlotKind {
  GrowthCurve,
  CategoryBars,
  TrendLines,
  ComentionHeatmap,
  TopicTimeline,
  CategoryHeatmap,
  OrganIntensity,
};

inline constexpr std::array<PlotKind, 7> kAllPlotKinds = {
    PlotKind::GrowthCurve,      PlotKind::CategoryBars,    PlotKind::TrendLines,
    PlotKind::ComentionHeatmap, PlotKind::TopicTimeline,   PlotKind::CategoryHeatmap,
    PlotKind::OrganIntensity,
};

std::string_view plot_kind_name(PlotKind k);
PlotKind parse_plot_kind(std::string_view name);  // throws ConfigError
Stage plot_kind_stage(PlotKind k);

struct CorpusInputs {
  std::vector<std::string> pubtator;
  std::optional<std::string> sidecar;
  std::optional<std::string> passages;

  bool empty() const { return pubtator.empty(); }
};

struct RunConfig {
  CorpusInputs corpus;
  CorpusInputs compare_corpus;

  std::optional<std::string> symptom_lexicon;
  std::optional<std::string> organ_lexicon;
  std::optional<std::string> finding_lexicon;
  std::optional<std::string> stopwords;  // default: shipped list
  std::optional<std::string> association_table;
  std::optional<std::string> symptom_branch = std::string("C23");

  Date anchor = default_anchor();
  double z = kZ95;
  std::size_t min_df = 3;
  ThresholdRule threshold = ThresholdRule::percentile(0.9);
  std::size_t max_passes = 50;
  std::size_t onset_top_k = 10;
  std::size_t category_top_n = 5;
  std::size_t entity_top_k = 10;
  std::size_t title_words = 4;
  std::size_t tree_depth = 2;
  std::size_t min_topic_terms = 10;
  std::size_t organ_top_n = 10;
  std::size_t finding_top_n = 10;
  std::vector<PassageKind> symptom_passages = {PassageKind::Title, PassageKind::Abstract};
  std::vector<PassageKind> comention_passages = {PassageKind::Caption};

  ParseMode mode = ParseMode::Lenient;
  unsigned threads = 1;
  std::string out_dir = "litscape_out";
};

// Reads a JSON config file. Unknown keys are rejected. Throws ConfigError.
RunConfig load_config(const std::string& path);
RunConfig config_from_json(std::string_view json_text);
// Canonical JSON of every field that affects outputs (excludes threads and out_dir).
std::string canonical_config_json(const RunConfig& cfg);

// Pre-flight checks: paths exist, numeric ranges, compare needs a second corpus.
void validate_config(const RunConfig& cfg, const std::set<Stage>& stages);

struct OutputRecord {
  std::string path;  // relative to out_dir
  std::string stage;
  std::size_t rows = 0;
};

struct StageFailure {
  Stage stage;
  std::string cause;
};

struct RunReport {
  std::string fingerprint;
  std::vector<OutputRecord> outputs;
  std::vector<Stage> completed;
  std::optional<StageFailure> failure;
  std::string out_dir;

  Corpus corpus;
  ParseStats parse_stats;
  std::optional<Corpus> compare_corpus;

  std::optional<WeeklyHistogram> histogram;
  std::optional<CategoryStats> categories;
  std::optional<std::vector<EntityCount>> entities;
  std::vector<std::pair<EntityKey, std::vector<WeekCount>>> trends;
  std::optional<Lexicon> symptom_lexicon;
  std::optional<HeadingCounts> symptoms;
  std::optional<Lexicon> organ_lexicon;
  std::optional<HeadingCounts> organs;
  std::optional<Lexicon> finding_lexicon;
  std::optional<CoMentionMatrix> findings;
  std::optional<std::vector<ComparisonRow>> comparison;
  std::unique_ptr<TermVocabulary> vocabulary;
  std::optional<TopicPartition> topics;
  std::optional<CategoryHeatmap> heatmap;
  std::size_t organ_top_n = 10;

  bool ran(Stage s) const;
};

// Runs the selected stages in dependency order. Pre-flight problems throw
// ConfigError. A failing stage is recorded in report.failure; later stages
// are skipped and everything written so far stays, including the manifest.
RunReport run_pipeline(const RunConfig& cfg, const std::set<Stage>& stages);

// Writes plots/<kind>.tsv under the report's out_dir and returns its path.
// Throws MissingStage when the stage behind the kind did not run.
std::string emit_plot_data(RunReport& report, PlotKind kind);

// Rewrites manifest.json from the report.
void write_manifest(const RunReport& report);

// 64-bit FNV-1a, hex encoded.
std::string fingerprint_hex(std::string_view data);

}  // namespace litscape
