#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "litscape/corpus.hpp"

namespace litscape {

struct WeekCount {
  std::int64_t week = 0;
  std::size_t count = 0;

  friend bool operator==(const WeekCount&, const WeekCount&) = default;
};

struct WeeklyHistogram {
  std::vector<WeekCount> weeks;  // ascending week, zero weeks omitted
  std::size_t undated = 0;

  std::size_t dated() const;
};

WeeklyHistogram weekly_histogram(const Corpus& corpus, const Date& anchor);

struct CategoryPairCount {
  Category a;  // a < b in enum order
  Category b;
  std::size_t count = 0;
};

struct CategoryStats {
  std::array<std::size_t, kNumCategories> per_label{};
  // Documents bucketed by number of labels: 0, 1, 2, >=3.
  std::array<std::size_t, 4> by_label_count{};
  std::array<std::array<std::size_t, kNumCategories>, kNumCategories> pairs{};

  std::size_t label_count(Category c) const { return per_label[static_cast<std::size_t>(c)]; }
  // Unordered pair lookup.
  std::size_t pair_count(Category a, Category b) const;
  // Non-zero unordered pairs sorted by count desc, then names asc.
  std::vector<CategoryPairCount> ranked_pairs() const;
};

CategoryStats category_stats(const Corpus& corpus);

}  // namespace litscape
