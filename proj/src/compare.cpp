#include "litscape/compare.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "litscape/errors.hpp"

namespace litscape {

namespace {

constexpr double kGrid = 9007199254740992.0;  // 2^53

// Multiples of 2^-53 in [0, 1] are exact doubles and so are their complements.
double snap(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return std::nearbyint(x * kGrid) / kGrid;
}

Interval wilson_raw(std::size_t k, std::size_t n, double z) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Interval iv{snap(center - half), snap(center + half)};
  if (k == 0) iv.lo = 0.0;
  return iv;
}

}  // namespace

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) throw DegenerateSample();
  if (k > n) throw std::invalid_argument("k must not exceed n");
  if (!(z > 0.0)) throw std::invalid_argument("z must be positive");
  if (2 * k < n) return wilson_raw(k, n, z);
  if (2 * k == n) {
    Interval iv = wilson_raw(k, n, z);
    iv.hi = 1.0 - iv.lo;
    return iv;
  }
  Interval mirror = wilson_raw(n - k, n, z);
  return {1.0 - mirror.hi, 1.0 - mirror.lo};
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::AOnly: return "AOnly";
    case Verdict::BOnly: return "BOnly";
    case Verdict::ASignificantlyMore: return "ASignificantlyMore";
    case Verdict::BSignificantlyMore: return "BSignificantlyMore";
    case Verdict::NoSignificantDifference: return "NoSignificantDifference";
  }
  return "?";
}

bool intervals_overlap(const Interval& a, const Interval& b) { return !(a.hi < b.lo || b.hi < a.lo); }

std::vector<ComparisonRow> compare_corpora(const std::vector<HeadingFrequency>& counts_a,
                                           std::size_t n_a,
                                           const std::vector<HeadingFrequency>& counts_b,
                                           std::size_t n_b, double z) {
  if (n_a == 0 || n_b == 0) throw DegenerateSample();
  struct Pair {
    std::string name;
    std::size_t k_a = 0, k_b = 0;
  };
  std::map<std::string, Pair> joined;
  for (const auto& c : counts_a) {
    auto& p = joined[c.heading_id];
    p.name = c.name;
    p.k_a += c.count;
  }
  for (const auto& c : counts_b) {
    auto& p = joined[c.heading_id];
    if (p.name.empty()) p.name = c.name;
    p.k_b += c.count;
  }
  std::vector<ComparisonRow> rows;
  for (const auto& [id, p] : joined) {
    if (p.k_a == 0 && p.k_b == 0) continue;
    ComparisonRow r;
    r.heading_id = id;
    r.name = p.name;
    r.k_a = p.k_a;
    r.n_a = n_a;
    r.k_b = p.k_b;
    r.n_b = n_b;
    r.ci_a = wilson_interval(r.k_a, n_a, z);
    r.ci_b = wilson_interval(r.k_b, n_b, z);
    if (r.k_b == 0) {
      r.verdict = Verdict::AOnly;
    } else if (r.k_a == 0) {
      r.verdict = Verdict::BOnly;
    } else if (r.ci_a.hi < r.ci_b.lo) {
      r.verdict = Verdict::BSignificantlyMore;
    } else if (r.ci_b.hi < r.ci_a.lo) {
      r.verdict = Verdict::ASignificantlyMore;
    } else {
      r.verdict = Verdict::NoSignificantDifference;
    }
    rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end(), [](const ComparisonRow& x, const ComparisonRow& y) {
    if (x.verdict != y.verdict) return x.verdict < y.verdict;
    if (x.name != y.name) return x.name < y.name;
    return x.heading_id < y.heading_id;
  });
  return rows;
}

}  // namespace litscape
