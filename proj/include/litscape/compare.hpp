#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace litscape {

inline constexpr double kZ95 = 1.959964;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for k successes out of n. Bounds are snapped to a
// 2^-53 grid and computed on the min(k, n-k) side, so that
// interval(n-k) is exactly the mirror image of interval(k).
// Throws DegenerateSample for n == 0, std::invalid_argument for k > n or z <= 0.
Interval wilson_interval(std::size_t k, std::size_t n, double z = kZ95);

enum class Verdict {
  AOnly,
  BOnly,
  ASignificantlyMore,
  BSignificantlyMore,
  NoSignificantDifference,
};

std::string_view verdict_name(Verdict v);

struct HeadingFrequency {
  std::string heading_id;
  std::string name;
  std::size_t count = 0;
};

struct ComparisonRow {
  std::string heading_id;
  std::string name;
  std::size_t k_a = 0, n_a = 0, k_b = 0, n_b = 0;
  Interval ci_a, ci_b;
  Verdict verdict = Verdict::NoSignificantDifference;
};

// Closed intervals: touching bounds overlap.
bool intervals_overlap(const Interval& a, const Interval& b);

// Headings absent from both sides are omitted. Rows sorted by verdict, then name.
std::vector<ComparisonRow> compare_corpora(const std::vector<HeadingFrequency>& counts_a,
                                           std::size_t n_a,
                                           const std::vector<HeadingFrequency>& counts_b,
                                           std::size_t n_b, double z = kZ95);

}  // namespace litscape
