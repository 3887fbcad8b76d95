#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "litscape/terms.hpp"

namespace litscape {

// Log-likelihood ratio of a term's hit rate inside a cluster context against
// its background rate, signed by whether the raw hit rate k/m exceeds n_t/N.
//   F = k ln(q/p) + (m-k) ln((1-q)/(1-p)),  p = n_t/N,  q = (k+0.5)/(m+1)
// Returns F when k*N > m*n_t, -|F| otherwise, and 0 for an empty context.
double term_affinity(std::size_t k, std::size_t m, std::size_t n_t, std::size_t num_docs);

struct PdcOptions {
  std::size_t max_passes = 50;
};

struct PassSnapshot {
  std::size_t pass = 0;  // 0 = initial singletons
  std::size_t moves = 0;
  double total_affinity = 0.0;
  // Cluster of every term (dense ids, arbitrary labels).
  const std::vector<std::size_t>* assignment = nullptr;
};

using PassObserver = std::function<void(const PassSnapshot&)>;

struct ClusteredTerm {
  TermIndex term = 0;
  double weight = 0.0;  // max(0, final affinity)
  double affinity = 0.0;
};

struct TermCluster {
  std::vector<ClusteredTerm> terms;  // weight desc, term asc
};

struct PdcResult {
  // Clusters ordered by size desc, then smallest term string asc; index = topic id.
  std::vector<TermCluster> clusters;
  std::vector<double> pass_totals;  // total affinity after each pass, [0] initial
  std::size_t passes_run = 0;
  bool converged = false;
};

// Greedy ascent over single-term moves starting from singletons. Throws EmptyVocabulary.
PdcResult pdc_cluster(const TermVocabulary& vocab, const PdcOptions& opts = {},
                      const PassObserver& observer = {});

// Sum over terms of affinity(term, its cluster), recomputed from scratch.
double total_affinity(const TermVocabulary& vocab, const std::vector<std::size_t>& assignment);

}  // namespace litscape
