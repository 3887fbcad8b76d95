#include "litscape/corpus_stats.hpp"

#include <algorithm>
#include <map>

namespace litscape {

std::size_t WeeklyHistogram::dated() const {
  std::size_t n = 0;
  for (const auto& w : weeks) n += w.count;
  return n;
}

WeeklyHistogram weekly_histogram(const Corpus& corpus, const Date& anchor) {
  std::map<std::int64_t, std::size_t> bins;
  WeeklyHistogram h;
  for (const auto& d : corpus.documents()) {
    if (!d.pub_date) {
      ++h.undated;
      continue;
    }
    ++bins[week_index(anchor, *d.pub_date)];
  }
  for (const auto& [w, c] : bins) h.weeks.push_back({w, c});
  return h;
}

std::size_t CategoryStats::pair_count(Category a, Category b) const {
  auto i = static_cast<std::size_t>(a), j = static_cast<std::size_t>(b);
  if (i > j) std::swap(i, j);
  return pairs[i][j];
}

std::vector<CategoryPairCount> CategoryStats::ranked_pairs() const {
  std::vector<CategoryPairCount> out;
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    for (std::size_t j = i + 1; j < kNumCategories; ++j) {
      if (pairs[i][j]) out.push_back({kAllCategories[i], kAllCategories[j], pairs[i][j]});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.count != y.count) return x.count > y.count;
    auto kx = std::pair(category_name(x.a), category_name(x.b));
    auto ky = std::pair(category_name(y.a), category_name(y.b));
    return kx < ky;
  });
  return out;
}

CategoryStats category_stats(const Corpus& corpus) {
  CategoryStats s;
  for (const auto& d : corpus.documents()) {
    auto labels = d.categories.members();
    s.by_label_count[std::min<std::size_t>(labels.size(), 3)]++;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      s.per_label[static_cast<std::size_t>(labels[i])]++;
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        s.pairs[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(labels[j])]++;
      }
    }
  }
  return s;
}

}  // namespace litscape
