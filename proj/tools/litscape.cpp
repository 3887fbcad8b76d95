// litscape command-line front end.
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "litscape/errors.hpp"
#include "litscape/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  bool strict = false;
  bool lenient = false;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON run configuration")->required();
  cmd->add_option("--out", flags.out, "Output directory (overrides the config)");
  auto* strict = cmd->add_flag("--strict", flags.strict, "Reject malformed input lines");
  auto* lenient = cmd->add_flag("--lenient", flags.lenient, "Skip and count malformed input lines");
  strict->excludes(lenient);
  cmd->add_option("--threads", flags.threads, "Worker threads; 0 keeps the config value")
      ->check(CLI::Range(0u, 1024u));
}

litscape::RunConfig resolve_config(const CommonFlags& flags) {
  litscape::RunConfig cfg = litscape::load_config(flags.config);
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  if (flags.strict) cfg.mode = litscape::ParseMode::Strict;
  if (flags.lenient) cfg.mode = litscape::ParseMode::Lenient;
  if (flags.threads > 0) cfg.threads = flags.threads;
  return cfg;
}

// Every stage whose inputs the config provides.
std::set<litscape::Stage> available_stages(const litscape::RunConfig& cfg) {
  using litscape::Stage;
  std::set<Stage> stages = {Stage::Ingest, Stage::Stats, Stage::Entities, Stage::Topics};
  if (cfg.symptom_lexicon) {
    stages.insert(Stage::Symptoms);
    if (!cfg.compare_corpus.empty()) stages.insert(Stage::Compare);
  }
  return stages;
}

void print_summary(const litscape::RunReport& report) {
  std::cout << "fingerprint " << report.fingerprint << '\n';
  for (const auto& o : report.outputs) {
    std::cout << o.stage << '\t' << o.path << '\t' << o.rows << " rows\n";
  }
  if (report.failure) {
    std::cerr << "litscape: stage '" << litscape::stage_name(report.failure->stage)
              << "' failed: " << report.failure->cause << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Literature collection analysis: statistics, entity trends, symptom tagging, topics"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> kinds;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"ingest", "Parse the corpus and write its canonical export"},
      {"stats", "Weekly growth and category statistics"},
      {"entities", "Entity article counts, rankings and weekly trends"},
      {"symptoms", "Lexicon tagging, heading rollups and co-mention matrices"},
      {"compare", "Heading frequency comparison between two corpora"},
      {"topics", "Term clustering into topics with onset and category"},
      {"report", "Write plot-ready data for the given kinds"},
      {"all", "Run every stage the config supports and emit all plot data"},
  };
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, flags);
    if (std::string(s.name) == "report") {
      cmd->add_option("--kind", kinds, "growth_curve, category_bars, trend_lines, comention_heatmap, "
                                       "topic_timeline, category_heatmap, organ_intensity")
          ->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    litscape::RunConfig cfg = resolve_config(flags);
    std::set<litscape::Stage> stages;
    std::vector<litscape::PlotKind> plots;
    if (command == "all") {
      stages = available_stages(cfg);
      for (auto k : litscape::kAllPlotKinds) plots.push_back(k);
    } else if (command == "report") {
      for (const auto& k : kinds) {
        plots.push_back(litscape::parse_plot_kind(k));
        stages.insert(litscape::plot_kind_stage(plots.back()));
      }
    } else {
      stages.insert(litscape::parse_stage(command));
    }

    litscape::RunReport report = litscape::run_pipeline(cfg, stages);
    int rc = report.failure ? kExitStage : 0;
    if (!report.failure) {
      for (auto kind : plots) {
        try {
          litscape::emit_plot_data(report, kind);
        } catch (const litscape::MissingStage& e) {
          if (command == "report") {
            std::cerr << "litscape: " << e.what() << '\n';
            rc = kExitStage;
          }
        }
      }
    }
    print_summary(report);
    return rc;
  } catch (const litscape::ConfigError& e) {
    std::cerr << "litscape: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "litscape: " << e.what() << '\n';
    return kExitStage;
  }
}
