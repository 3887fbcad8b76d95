#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "litscape/date.hpp"

namespace litscape {

enum class Category : std::uint8_t {
  Prevention,
  Treatment,
  Diagnosis,
  Mechanism,
  GeneralInformation,
  CaseReport,
  Transmission,
  EpidemicForecasting,
};

inline constexpr std::size_t kNumCategories = 8;

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::Prevention,   Category::Treatment,          Category::Diagnosis,
    Category::Mechanism,    Category::GeneralInformation, Category::CaseReport,
    Category::Transmission, Category::EpidemicForecasting,
};

std::string_view category_name(Category c);

// Accepts the canonical names plus the spaced forms used by the collection
// ("General Info", "Case Report", "Epidemic Forecasting"), case-insensitive.
// Throws UnknownCategory.
Category parse_category(std::string_view label);

// Set of category labels as an 8-bit mask.
class CategorySet {
 public:
  constexpr CategorySet() = default;

  void insert(Category c) { bits_ |= bit(c); }
  bool contains(Category c) const { return (bits_ & bit(c)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  std::vector<Category> members() const;
  std::uint8_t bits() const { return bits_; }

  friend bool operator==(const CategorySet&, const CategorySet&) = default;

 private:
  static constexpr std::uint8_t bit(Category c) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c));
  }
  std::uint8_t bits_ = 0;
};

enum class PassageKind : std::uint8_t { Title, Abstract, Caption, Other };

std::string_view passage_kind_name(PassageKind k);
// Throws std::invalid_argument on unknown names.
PassageKind parse_passage_kind(std::string_view name);

class PassageKindSet {
 public:
  PassageKindSet() = default;
  PassageKindSet(std::initializer_list<PassageKind> kinds) {
    for (auto k : kinds) insert(k);
  }
  void insert(PassageKind k) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  bool contains(PassageKind k) const { return (bits_ >> static_cast<unsigned>(k)) & 1u; }
  bool empty() const { return bits_ == 0; }

 private:
  std::uint8_t bits_ = 0;
};

struct Passage {
  PassageKind kind = PassageKind::Other;
  std::string text;

  friend bool operator==(const Passage&, const Passage&) = default;
};

struct PassageRef {
  PassageKind kind;
  std::string_view text;
};

struct Document {
  std::string doc_id;
  std::string title;
  std::string abstract;
  std::optional<Date> pub_date;
  CategorySet categories;
  // Passages beyond title and abstract, e.g. figure captions.
  std::vector<Passage> extra_passages;

  // Title and abstract first (when non-empty), then the extra passages in order.
  std::vector<PassageRef> passages() const;

  // "title abstract" joined by a single space; annotation offsets index into it.
  std::string annotated_text() const;

  friend bool operator==(const Document&, const Document&) = default;
};

struct EntityAnnotation {
  std::string doc_id;
  std::size_t start = 0;  // code points
  std::size_t end = 0;
  std::string mention;
  std::string concept_type;
  std::optional<std::string> concept_id;

  friend bool operator==(const EntityAnnotation&, const EntityAnnotation&) = default;
};

// Documents in insertion order plus their annotations. Immutable once built
// by the parsers; statistics take it by const reference.
class Corpus {
 public:
  // Throws DuplicateDocId.
  std::size_t add_document(Document doc);
  // The document must already exist; throws std::out_of_range otherwise.
  void add_annotation(EntityAnnotation ann);

  // Moves all documents from other into this corpus. Throws DuplicateDocId.
  void merge(Corpus&& other);

  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const std::vector<Document>& documents() const { return docs_; }
  const Document& document(std::size_t i) const { return docs_[i]; }
  Document& mutable_document(std::size_t i) { return docs_[i]; }
  std::span<const EntityAnnotation> annotations(std::size_t i) const { return anns_[i]; }
  std::size_t annotation_count() const;

  std::optional<std::size_t> index_of(std::string_view doc_id) const;
  const Document* find(std::string_view doc_id) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.docs_ == b.docs_ && a.anns_ == b.anns_;
  }

 private:
  std::vector<Document> docs_;
  std::vector<std::vector<EntityAnnotation>> anns_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace litscape
