#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "litscape/compare.hpp"
#include "litscape/corpus_stats.hpp"
#include "litscape/entity_stats.hpp"
#include "litscape/errors.hpp"
#include "litscape/formats.hpp"
#include "litscape/lexicon.hpp"
#include "litscape/pdc.hpp"
#include "litscape/pipeline.hpp"
#include "litscape/terms.hpp"
#include "litscape/topics.hpp"

namespace py = pybind11;
using namespace litscape;

namespace {

ParseMode mode_of(const std::string& m) {
  if (m == "strict") return ParseMode::Strict;
  if (m == "lenient") return ParseMode::Lenient;
  throw py::value_error("mode must be 'strict' or 'lenient'");
}

py::dict stats_dict(const ParseStats& s) {
  py::dict d;
  d["documents"] = s.documents;
  d["annotations"] = s.annotations;
  d["skipped_lines"] = s.skipped_lines;
  d["dropped_annotations"] = s.dropped_annotations;
  d["newline_offset_fallbacks"] = s.newline_offset_fallbacks;
  return d;
}

py::tuple parse_text(const std::string& text, const std::string& mode) {
  std::istringstream in(text);
  ParseStats stats;
  Corpus c = parse_pubtator(in, mode_of(mode), &stats);
  return py::make_tuple(std::move(c), stats_dict(stats));
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw py::value_error("cannot open '" + path + "'");
  return in;
}

py::dict document_dict(const Document& d) {
  py::dict out;
  out["doc_id"] = d.doc_id;
  out["title"] = d.title;
  out["abstract"] = d.abstract;
  out["pub_date"] = d.pub_date ? py::object(py::str(d.pub_date->iso())) : py::object(py::none());
  py::list cats;
  for (Category c : d.categories.members()) cats.append(std::string(category_name(c)));
  out["categories"] = cats;
  py::list passages;
  for (const auto& p : d.extra_passages) {
    passages.append(py::make_tuple(std::string(passage_kind_name(p.kind)), p.text));
  }
  out["extra_passages"] = passages;
  return out;
}

py::dict entity_dict(const EntityCount& ec) {
  py::dict d;
  d["type"] = ec.key.id.concept_type;
  d["key"] = ec.key.id.key;
  d["from_mention"] = ec.key.id.from_mention;
  d["display_name"] = ec.key.display_name;
  d["article_count"] = ec.article_count;
  d["mention_count"] = ec.mention_count;
  return d;
}

std::set<Stage> stages_of(const std::vector<std::string>& names) {
  std::set<Stage> out;
  for (const auto& n : names) out.insert(parse_stage(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_litscape, m) {
  m.doc() = "Literature collection analysis core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<MalformedLine>(m, "MalformedLine", base.ptr());
  py::register_exception<DegenerateSample>(m, "DegenerateSample", base.ptr());
  py::register_exception<MissingStage>(m, "MissingStage", base.ptr());

  py::class_<Corpus>(m, "Corpus")
      .def("__len__", &Corpus::size)
      .def("doc_ids",
           [](const Corpus& c) {
             std::vector<std::string> ids;
             for (const auto& d : c.documents()) ids.push_back(d.doc_id);
             return ids;
           })
      .def("document",
           [](const Corpus& c, const std::string& id) {
             auto i = c.index_of(id);
             if (!i) throw py::key_error(id);
             return document_dict(c.document(*i));
           })
      .def("annotations",
           [](const Corpus& c, const std::string& id) {
             auto i = c.index_of(id);
             if (!i) throw py::key_error(id);
             py::list out;
             for (const auto& a : c.annotations(*i)) {
               out.append(py::make_tuple(a.start, a.end, a.mention, a.concept_type,
                                         a.concept_id ? py::object(py::str(*a.concept_id)) : py::object(py::none())));
             }
             return out;
           })
      .def("annotation_count", &Corpus::annotation_count)
      .def("to_canonical",
           [](const Corpus& c) {
             std::ostringstream out;
             write_canonical(c, out);
             return out.str();
           })
      .def("__eq__", [](const Corpus& a, const Corpus& b) { return a == b; });

  m.def("parse_pubtator", &parse_text, py::arg("text"), py::arg("mode") = "strict",
        "Parse PubTator text; returns (corpus, stats).");
  m.def(
      "read_pubtator",
      [](const std::string& path, const std::string& mode) {
        auto in = open_or_throw(path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str(), mode);
      },
      py::arg("path"), py::arg("mode") = "strict");
  m.def("from_canonical", [](const std::string& text) {
    std::istringstream in(text);
    return read_canonical(in);
  });
  m.def(
      "attach_metadata",
      [](Corpus& c, const std::string& path) {
        auto in = open_or_throw(path);
        return merge_metadata(c, parse_corpus_sidecar(in));
      },
      "Merge a sidecar table; returns ids absent from the corpus.");

  m.def(
      "weekly_histogram",
      [](const Corpus& c, const std::string& anchor) {
        auto h = weekly_histogram(c, Date::parse(anchor));
        std::vector<std::pair<std::int64_t, std::size_t>> weeks;
        for (const auto& w : h.weeks) weeks.emplace_back(w.week, w.count);
        return py::make_tuple(weeks, h.undated);
      },
      py::arg("corpus"), py::arg("anchor") = "2020-02-01");

  m.def(
      "mention_counts",
      [](const Corpus& c, std::optional<std::set<std::string>> types, unsigned threads) {
        EntityCountOptions opts;
        opts.type_filter = std::move(types);
        opts.threads = threads;
        py::list out;
        for (const auto& ec : mention_counts(c, opts)) out.append(entity_dict(ec));
        return out;
      },
      py::arg("corpus"), py::arg("types") = py::none(), py::arg("threads") = 1);

  m.def("wilson_interval",
        [](std::size_t k, std::size_t n, double z) {
          auto ci = wilson_interval(k, n, z);
          return py::make_tuple(ci.lo, ci.hi);
        },
        py::arg("k"), py::arg("n"), py::arg("z") = kZ95);

  m.def(
      "compare_counts",
      [](const std::map<std::string, std::size_t>& a, std::size_t n_a, const std::map<std::string, std::size_t>& b,
         std::size_t n_b, double z) {
        auto conv = [](const std::map<std::string, std::size_t>& m) {
          std::vector<HeadingFrequency> out;
          for (const auto& [name, k] : m) out.push_back({name, name, k});
          return out;
        };
        py::list out;
        for (const auto& r : compare_corpora(conv(a), n_a, conv(b), n_b, z)) {
          out.append(py::make_tuple(r.name, std::string(verdict_name(r.verdict)), py::make_tuple(r.ci_a.lo, r.ci_a.hi),
                                    py::make_tuple(r.ci_b.lo, r.ci_b.hi)));
        }
        return out;
      },
      py::arg("counts_a"), py::arg("n_a"), py::arg("counts_b"), py::arg("n_b"), py::arg("z") = kZ95,
      "Rows of (heading, verdict, ci_a, ci_b) keyed by heading name.");

  py::class_<Lexicon>(m, "Lexicon")
      .def("__len__", &Lexicon::size)
      .def("heading_ids", [](const Lexicon& l) {
        std::vector<std::string> ids;
        for (const auto& h : l.headings()) ids.push_back(h.heading_id);
        return ids;
      });
  m.def(
      "compile_lexicon",
      [](const std::string& tsv, std::optional<std::string> branch) {
        std::istringstream in(tsv);
        return compile_lexicon(in, std::move(branch));
      },
      py::arg("tsv"), py::arg("branch") = py::none());
  m.def("tag_text", [](const Lexicon& lex, const std::string& text) {
    py::list out;
    for (const auto& tm : tag_text(lex, text)) {
      out.append(py::make_tuple(tm.start, tm.end, std::string(tm.term), lex.heading(tm.heading).heading_id));
    }
    return out;
  });
  m.def(
      "heading_article_counts",
      [](const Corpus& c, const Lexicon& lex, unsigned threads) {
        TaggingOptions opts;
        opts.threads = threads;
        auto hc = heading_article_counts(c, lex, opts);
        std::vector<std::tuple<std::string, std::string, std::size_t>> rows;
        for (const auto& r : hc.rows) rows.emplace_back(r.heading_id, r.name, r.article_count);
        return py::make_tuple(rows, hc.docs_with_any_match);
      },
      py::arg("corpus"), py::arg("lexicon"), py::arg("threads") = 1);

  py::class_<TermVocabulary>(m, "TermVocabulary")
      .def("__len__", &TermVocabulary::size)
      .def_readonly("terms", &TermVocabulary::terms)
      .def("df", [](const TermVocabulary& v, const std::string& term) {
        auto t = v.find(term);
        if (!t) throw py::key_error(term);
        return v.df(*t);
      });
  m.def(
      "extract_terms",
      [](const Corpus& c, std::size_t min_df, unsigned threads) {
        TermOptions opts;
        opts.min_df = min_df;
        opts.threads = threads;
        return extract_terms(c, default_stopwords(), opts);
      },
      py::arg("corpus"), py::arg("min_df") = 3, py::arg("threads") = 1);
  m.def("vocabulary_from_sets", &vocabulary_from_sets, py::arg("docs"), py::arg("min_df") = 1);
  m.def(
      "pdc_cluster",
      [](const TermVocabulary& v, std::size_t max_passes) {
        PdcOptions opts;
        opts.max_passes = max_passes;
        auto r = pdc_cluster(v, opts);
        py::list clusters;
        for (const auto& cl : r.clusters) {
          py::list terms;
          for (const auto& t : cl.terms) terms.append(py::make_tuple(v.terms[t.term], t.weight));
          clusters.append(terms);
        }
        py::dict out;
        out["clusters"] = clusters;
        out["pass_totals"] = r.pass_totals;
        out["converged"] = r.converged;
        return out;
      },
      py::arg("vocabulary"), py::arg("max_passes") = 50,
      "Returns {'clusters': [[(term, weight), ...], ...], 'pass_totals': [...], 'converged': bool}.");
  m.def("make_title",
        [](const std::vector<std::pair<std::string, double>>& terms, std::size_t max_words) {
          std::vector<WeightedTerm> wt;
          for (const auto& [t, w] : terms) wt.push_back({t, w});
          return make_title(wt, max_words);
        },
        py::arg("terms"), py::arg("max_words") = 4);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("fingerprint", &RunReport::fingerprint)
      .def_readonly("out_dir", &RunReport::out_dir)
      .def_property_readonly("completed",
                             [](const RunReport& r) {
                               std::vector<std::string> out;
                               for (auto s : r.completed) out.emplace_back(stage_name(s));
                               return out;
                             })
      .def_property_readonly("failure",
                             [](const RunReport& r) -> py::object {
                               if (!r.failure) return py::none();
                               return py::make_tuple(std::string(stage_name(r.failure->stage)), r.failure->cause);
                             })
      .def_property_readonly("outputs", [](const RunReport& r) {
        std::vector<std::tuple<std::string, std::string, std::size_t>> out;
        for (const auto& o : r.outputs) out.emplace_back(o.path, o.stage, o.rows);
        return out;
      });

  m.def(
      "run_pipeline",
      [](const std::string& config_path, const std::vector<std::string>& stages, std::optional<std::string> out_dir,
         std::optional<unsigned> threads) {
        RunConfig cfg = load_config(config_path);
        if (out_dir) cfg.out_dir = *out_dir;
        if (threads) cfg.threads = *threads;
        py::gil_scoped_release release;
        return run_pipeline(cfg, stages_of(stages));
      },
      py::arg("config"), py::arg("stages"), py::arg("out_dir") = py::none(), py::arg("threads") = py::none());
  m.def("emit_plot_data",
        [](RunReport& report, const std::string& kind) { return emit_plot_data(report, parse_plot_kind(kind)); });
}
