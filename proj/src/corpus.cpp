#include "litscape/corpus.hpp"

#include <bit>
#include <stdexcept>

#include "litscape/errors.hpp"
#include "litscape/text.hpp"

namespace litscape {

std::string_view category_name(Category c) {
  switch (c) {
    case Category::Prevention: return "Prevention";
    case Category::Treatment: return "Treatment";
    case Category::Diagnosis: return "Diagnosis";
    case Category::Mechanism: return "Mechanism";
    case Category::GeneralInformation: return "GeneralInformation";
    case Category::CaseReport: return "CaseReport";
    case Category::Transmission: return "Transmission";
    case Category::EpidemicForecasting: return "EpidemicForecasting";
  }
  return "?";
}

Category parse_category(std::string_view label) {
  std::string squashed;
  for (char c : text::trim(label)) {
    if (c == ' ' || c == '_') continue;
    squashed.push_back(c);
  }
  squashed = text::ascii_lower(squashed);
  if (squashed == "generalinfo") return Category::GeneralInformation;
  if (squashed == "casereports") return Category::CaseReport;
  for (Category c : kAllCategories) {
    if (text::ascii_lower(category_name(c)) == squashed) return c;
  }
  throw UnknownCategory(std::string(label));
}

std::size_t CategorySet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Category> CategorySet::members() const {
  std::vector<Category> out;
  for (Category c : kAllCategories) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

std::string_view passage_kind_name(PassageKind k) {
  switch (k) {
    case PassageKind::Title: return "title";
    case PassageKind::Abstract: return "abstract";
    case PassageKind::Caption: return "caption";
    case PassageKind::Other: return "other";
  }
  return "other";
}

PassageKind parse_passage_kind(std::string_view name) {
  std::string n = text::ascii_lower(text::trim(name));
  if (n == "title") return PassageKind::Title;
  if (n == "abstract") return PassageKind::Abstract;
  if (n == "caption") return PassageKind::Caption;
  if (n == "other") return PassageKind::Other;
  throw std::invalid_argument("unknown passage kind '" + std::string(name) + "'");
}

std::vector<PassageRef> Document::passages() const {
  std::vector<PassageRef> out;
  out.reserve(2 + extra_passages.size());
  if (!title.empty()) out.push_back({PassageKind::Title, title});
  if (!abstract.empty()) out.push_back({PassageKind::Abstract, abstract});
  for (const auto& p : extra_passages) out.push_back({p.kind, p.text});
  return out;
}

std::string Document::annotated_text() const { return title + " " + abstract; }

std::size_t Corpus::add_document(Document doc) {
  if (doc.doc_id.empty()) throw std::invalid_argument("document id must not be empty");
  auto [it, inserted] = index_.emplace(doc.doc_id, docs_.size());
  if (!inserted) throw DuplicateDocId(doc.doc_id);
  docs_.push_back(std::move(doc));
  anns_.emplace_back();
  return it->second;
}

void Corpus::add_annotation(EntityAnnotation ann) {
  auto it = index_.find(ann.doc_id);
  if (it == index_.end()) throw std::out_of_range("annotation for unknown document " + ann.doc_id);
  anns_[it->second].push_back(std::move(ann));
}

void Corpus::merge(Corpus&& other) {
  for (const auto& d : other.docs_) {
    if (index_.count(d.doc_id)) throw DuplicateDocId(d.doc_id);
  }
  for (std::size_t i = 0; i < other.docs_.size(); ++i) {
    index_.emplace(other.docs_[i].doc_id, docs_.size());
    docs_.push_back(std::move(other.docs_[i]));
    anns_.push_back(std::move(other.anns_[i]));
  }
  other = Corpus{};
}

std::size_t Corpus::annotation_count() const {
  std::size_t n = 0;
  for (const auto& a : anns_) n += a.size();
  return n;
}

std::optional<std::size_t> Corpus::index_of(std::string_view doc_id) const {
  auto it = index_.find(std::string(doc_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Document* Corpus::find(std::string_view doc_id) const {
  auto i = index_of(doc_id);
  return i ? &docs_[*i] : nullptr;
}

}  // namespace litscape
