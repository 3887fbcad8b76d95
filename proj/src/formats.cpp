#include "litscape/formats.hpp"

#include <charconv>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "litscape/errors.hpp"
#include "litscape/text.hpp"

namespace litscape {

namespace {

using ojson = nlohmann::ordered_json;

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool is_blank(std::string_view s) { return text::trim(s).empty(); }

bool parse_offset(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Recognizes "<pmid>|t|..." and "<pmid>|a|...".
bool split_text_line(std::string_view line, std::string_view& pmid, char& kind,
                     std::string_view& body) {
  std::size_t bar = line.find('|');
  if (bar == std::string_view::npos || bar == 0 || bar + 2 >= line.size()) return false;
  char k = line[bar + 1];
  if ((k != 't' && k != 'a') || line[bar + 2] != '|') return false;
  pmid = line.substr(0, bar);
  if (pmid.find('\t') != std::string_view::npos) return false;
  kind = k;
  body = line.substr(bar + 3);
  return true;
}

class PubtatorReader {
 public:
  PubtatorReader(ParseMode mode, ParseStats& stats) : mode_(mode), stats_(stats) {}

  Corpus run(std::istream& in) {
    std::string line;
    while (read_line(in, line)) {
      ++line_no_;
      if (is_blank(line)) {
        finish_block();
        continue;
      }
      std::string_view pmid, body;
      char kind = 0;
      if (split_text_line(line, pmid, kind, body)) {
        if (kind == 't') {
          on_title(pmid, body);
        } else {
          on_abstract(pmid, body);
        }
      } else if (line.find('\t') != std::string::npos) {
        on_annotation(line);
      } else {
        malformed("unrecognized line");
      }
    }
    finish_block();
    return std::move(corpus_);
  }

 private:
  void malformed(const std::string& reason) {
    if (mode_ == ParseMode::Strict) throw MalformedLine(line_no_, reason);
    ++stats_.skipped_lines;
  }

  void on_title(std::string_view pmid, std::string_view body) {
    if (open_) {
      if (mode_ == ParseMode::Strict) throw MalformedLine(line_no_, "expected blank line before a new document");
      finish_block();
    }
    open_ = true;
    have_abstract_ = false;
    doc_ = Document{};
    doc_.doc_id = std::string(pmid);
    doc_.title = std::string(body);
    anns_.clear();
    if (corpus_.index_of(doc_.doc_id)) throw DuplicateDocId(doc_.doc_id);
  }

  void on_abstract(std::string_view pmid, std::string_view body) {
    if (!open_) return malformed("abstract line without a title line");
    if (pmid != doc_.doc_id) return malformed("abstract id does not match title id");
    if (have_abstract_) return malformed("second abstract line");
    doc_.abstract = std::string(body);
    have_abstract_ = true;
    joined_space_ = doc_.title + " " + doc_.abstract;
    joined_newline_ = doc_.title + "\n" + doc_.abstract;
  }

  void on_annotation(const std::string& line) {
    auto fields = text::split(line, '\t');
    auto reject = [&](const std::string& reason) {
      if (mode_ == ParseMode::Strict) throw MalformedLine(line_no_, reason);
      ++stats_.skipped_lines;
      ++stats_.dropped_annotations;
    };
    if (fields.size() < 5 || fields.size() > 6) return reject("annotation needs 5 or 6 tab-separated fields");
    if (!open_) return reject("annotation outside a document block");
    if (fields[0] != doc_.doc_id) return reject("annotation id does not match the document");
    if (!have_abstract_) return reject("annotation before the abstract line");
    EntityAnnotation ann;
    ann.doc_id = doc_.doc_id;
    if (!parse_offset(fields[1], ann.start) || !parse_offset(fields[2], ann.end)) {
      return reject("offsets must be non-negative integers");
    }
    if (ann.end <= ann.start) return reject("end offset must exceed start offset");
    ann.mention = std::string(fields[3]);
    ann.concept_type = std::string(fields[4]);
    if (fields.size() == 6 && !fields[5].empty()) ann.concept_id = std::string(fields[5]);
    if (ann.concept_type.empty()) return reject("empty concept type");

    std::string span;
    if (!text::utf8_substr(joined_space_, ann.start, ann.end, span)) {
      return reject("offsets exceed the document text");
    }
    if (span != ann.mention) {
      std::string alt;
      if (text::utf8_substr(joined_newline_, ann.start, ann.end, alt) && alt == ann.mention) {
        ++stats_.newline_offset_fallbacks;
      } else {
        return reject("mention does not match the text at its offsets");
      }
    }
    anns_.push_back(std::move(ann));
  }

  void finish_block() {
    if (!open_) return;
    open_ = false;
    if (!have_abstract_) {
      if (mode_ == ParseMode::Strict) throw MalformedLine(line_no_, "document " + doc_.doc_id + " has no abstract line");
      ++stats_.skipped_lines;
    }
    corpus_.add_document(std::move(doc_));
    ++stats_.documents;
    for (auto& a : anns_) {
      corpus_.add_annotation(std::move(a));
      ++stats_.annotations;
    }
    anns_.clear();
  }

  ParseMode mode_;
  ParseStats& stats_;
  Corpus corpus_;
  std::size_t line_no_ = 0;
  bool open_ = false;
  bool have_abstract_ = false;
  Document doc_;
  std::vector<EntityAnnotation> anns_;
  std::string joined_space_, joined_newline_;
};

std::string tsv_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char n = s[i + 1];
      if (n == 't') { out.push_back('\t'); ++i; continue; }
      if (n == 'n') { out.push_back('\n'); ++i; continue; }
      if (n == 'r') { out.push_back('\r'); ++i; continue; }
      if (n == '\\') { out.push_back('\\'); ++i; continue; }
    }
    out.push_back(s[i]);
  }
  return out;
}

void expect_header(std::istream& in, std::string_view header, std::size_t& line_no) {
  std::string line;
  while (read_line(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (line != header) throw MalformedLine(line_no, "expected header '" + text::tsv_escape(header) + "'");
    return;
  }
  throw MalformedLine(line_no, "missing header");
}

}  // namespace

Corpus parse_pubtator(std::istream& in, ParseMode mode, ParseStats* stats) {
  ParseStats local;
  PubtatorReader reader(mode, stats ? *stats : local);
  return reader.run(in);
}

void write_pubtator(const Corpus& corpus, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Document& d = corpus.document(i);
    auto bad = [](const std::string& s) { return s.find_first_of("\r\n") != std::string::npos; };
    if (bad(d.title) || bad(d.abstract)) {
      throw std::invalid_argument("document " + d.doc_id + " has a line break in its title or abstract");
    }
    out << d.doc_id << "|t|" << d.title << '\n' << d.doc_id << "|a|" << d.abstract << '\n';
    for (const auto& a : corpus.annotations(i)) {
      out << a.doc_id << '\t' << a.start << '\t' << a.end << '\t' << a.mention << '\t'
          << a.concept_type;
      if (a.concept_id) out << '\t' << *a.concept_id;
      out << '\n';
    }
    out << '\n';
  }
}

std::map<std::string, DocMetadata> parse_corpus_sidecar(std::istream& in) {
  std::size_t line_no = 0;
  expect_header(in, "doc_id\tpub_date\tcategories", line_no);
  std::map<std::string, DocMetadata> meta;
  std::string line;
  while (read_line(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto fields = text::split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3) {
      throw MalformedLine(line_no, "sidecar rows have 2 or 3 tab-separated fields");
    }
    std::string id(text::trim(fields[0]));
    if (id.empty()) throw MalformedLine(line_no, "empty doc_id");
    DocMetadata m;
    auto date = text::trim(fields[1]);
    if (!date.empty()) m.pub_date = Date::parse(date);
    if (fields.size() == 3) {
      for (auto label : text::split(fields[2], '|')) {
        if (text::trim(label).empty()) continue;
        m.categories.insert(parse_category(label));
      }
    }
    if (!meta.emplace(id, m).second) throw MalformedLine(line_no, "duplicate doc_id " + id);
  }
  return meta;
}

std::vector<std::string> merge_metadata(Corpus& corpus,
                                        const std::map<std::string, DocMetadata>& meta) {
  std::vector<std::string> absent;
  for (const auto& [id, m] : meta) {
    auto i = corpus.index_of(id);
    if (!i) {
      absent.push_back(id);
      continue;
    }
    Document& d = corpus.mutable_document(*i);
    d.pub_date = m.pub_date;
    d.categories = m.categories;
  }
  return absent;
}

std::vector<std::string> merge_passages(Corpus& corpus, std::istream& in) {
  std::size_t line_no = 0;
  expect_header(in, "doc_id\tkind\ttext", line_no);
  std::vector<std::string> absent;
  std::set<std::string> seen_absent;
  std::string line;
  while (read_line(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 3) throw MalformedLine(line_no, "passage rows have 3 tab-separated fields");
    PassageKind kind;
    try {
      kind = parse_passage_kind(fields[1]);
    } catch (const std::invalid_argument& e) {
      throw MalformedLine(line_no, e.what());
    }
    if (kind == PassageKind::Title || kind == PassageKind::Abstract) {
      throw MalformedLine(line_no, "title and abstract come from the annotation file");
    }
    std::string id(fields[0]);
    auto i = corpus.index_of(id);
    if (!i) {
      if (seen_absent.insert(id).second) absent.push_back(id);
      continue;
    }
    corpus.mutable_document(*i).extra_passages.push_back({kind, tsv_unescape(fields[2])});
  }
  return absent;
}

void write_canonical(const Corpus& corpus, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Document& d = corpus.document(i);
    ojson rec;
    rec["doc_id"] = d.doc_id;
    rec["title"] = d.title;
    rec["abstract"] = d.abstract;
    rec["pub_date"] = d.pub_date ? ojson(d.pub_date->iso()) : ojson(nullptr);
    ojson cats = ojson::array();
    for (Category c : d.categories.members()) cats.push_back(std::string(category_name(c)));
    rec["categories"] = cats;
    ojson passages = ojson::array();
    for (const auto& p : d.extra_passages) {
      ojson pj;
      pj["kind"] = std::string(passage_kind_name(p.kind));
      pj["text"] = p.text;
      passages.push_back(pj);
    }
    rec["passages"] = passages;
    ojson anns = ojson::array();
    for (const auto& a : corpus.annotations(i)) {
      ojson aj;
      aj["start"] = a.start;
      aj["end"] = a.end;
      aj["mention"] = a.mention;
      aj["type"] = a.concept_type;
      aj["concept_id"] = a.concept_id ? ojson(*a.concept_id) : ojson(nullptr);
      anns.push_back(aj);
    }
    rec["annotations"] = anns;
    out << rec.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

Corpus read_canonical(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      Document d;
      d.doc_id = rec.at("doc_id").get<std::string>();
      d.title = rec.at("title").get<std::string>();
      d.abstract = rec.at("abstract").get<std::string>();
      if (!rec.at("pub_date").is_null()) d.pub_date = Date::parse(rec["pub_date"].get<std::string>());
      for (const auto& c : rec.at("categories")) d.categories.insert(parse_category(c.get<std::string>()));
      for (const auto& p : rec.at("passages")) {
        d.extra_passages.push_back(
            {parse_passage_kind(p.at("kind").get<std::string>()), p.at("text").get<std::string>()});
      }
      std::string id = d.doc_id;
      corpus.add_document(std::move(d));
      for (const auto& a : rec.at("annotations")) {
        EntityAnnotation ann;
        ann.doc_id = id;
        ann.start = a.at("start").get<std::size_t>();
        ann.end = a.at("end").get<std::size_t>();
        ann.mention = a.at("mention").get<std::string>();
        ann.concept_type = a.at("type").get<std::string>();
        if (!a.at("concept_id").is_null()) ann.concept_id = a["concept_id"].get<std::string>();
        corpus.add_annotation(std::move(ann));
      }
    } catch (const nlohmann::json::exception& e) {
      throw MalformedLine(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw MalformedLine(line_no, e.what());
    }
  }
  return corpus;
}

}  // namespace litscape
