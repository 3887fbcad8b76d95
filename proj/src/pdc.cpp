#include "litscape/pdc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "litscape/errors.hpp"

namespace litscape {

double term_affinity(std::size_t k, std::size_t m, std::size_t n_t, std::size_t num_docs) {
  if (m == 0 || n_t == 0 || num_docs == 0) return 0.0;
  const double p = static_cast<double>(n_t) / static_cast<double>(num_docs);
  const double q = (static_cast<double>(k) + 0.5) / (static_cast<double>(m) + 1.0);
  double f = 0.0;
  if (k > 0) f += static_cast<double>(k) * std::log(q / p);
  if (m > k && p < 1.0) f += static_cast<double>(m - k) * std::log((1.0 - q) / (1.0 - p));
  const bool excess = static_cast<double>(k) * static_cast<double>(num_docs) >
                      static_cast<double>(m) * static_cast<double>(n_t);
  return excess ? f : -std::fabs(f);
}

namespace {

constexpr double kEps = 1e-9;

// Per-term affinities for an arbitrary assignment, computed directly from
// document counts of each cluster.
std::vector<double> direct_affinities(const TermVocabulary& vocab,
                                      const std::vector<std::size_t>& assignment) {
  std::unordered_map<std::size_t, std::vector<TermIndex>> clusters;
  for (TermIndex t = 0; t < assignment.size(); ++t) clusters[assignment[t]].push_back(t);
  std::vector<double> aff(vocab.size(), 0.0);
  std::vector<std::uint32_t> cnt(vocab.num_docs, 0);
  for (const auto& [id, members] : clusters) {
    std::size_t support = 0;
    for (auto u : members) {
      for (auto d : vocab.postings[u]) {
        if (cnt[d]++ == 0) ++support;
      }
    }
    for (auto u : members) {
      std::size_t sole = 0, hits = 0;
      for (auto d : vocab.postings[u]) {
        if (cnt[d] == 1) ++sole;
        else ++hits;
      }
      aff[u] = term_affinity(hits, support - sole, vocab.df(u), vocab.num_docs);
    }
    for (auto u : members) {
      for (auto d : vocab.postings[u]) cnt[d] = 0;
    }
  }
  return aff;
}

struct Cluster {
  std::vector<TermIndex> members;
  std::unordered_map<DocIndex, std::uint32_t> count;  // docs with >= 1 member
  std::unordered_map<DocIndex, std::uint64_t> id_sum; // sum of member indices per doc
  bool alive = true;
};

struct TermState {
  std::size_t cluster = 0;
  std::size_t slot = 0;  // position in cluster.members
  std::size_t m = 0, k = 0;
  double aff = 0.0;
};

class Clusterer {
 public:
  explicit Clusterer(const TermVocabulary& vocab) : v_(vocab), state_(vocab.size()) {
    order_.resize(vocab.size());
    std::iota(order_.begin(), order_.end(), TermIndex{0});
    std::sort(order_.begin(), order_.end(), [&](TermIndex a, TermIndex b) {
      if (v_.df(a) != v_.df(b)) return v_.df(a) > v_.df(b);
      return v_.terms[a] < v_.terms[b];
    });
    for (TermIndex t : order_) {
      std::size_t id = clusters_.size();
      clusters_.emplace_back();
      add_to(id, t);
      state_[t].m = state_[t].k = 0;
      state_[t].aff = 0.0;
    }
    stamp_.assign(clusters_.size(), std::numeric_limits<std::uint64_t>::max());
    hits_.assign(clusters_.size(), 0);
  }

  std::size_t pass() {
    std::size_t moves = 0;
    for (TermIndex t : order_) moves += visit(t) ? 1 : 0;
    return moves;
  }

  std::vector<std::size_t> assignment() const {
    std::vector<std::size_t> a(v_.size());
    for (TermIndex t = 0; t < v_.size(); ++t) a[t] = state_[t].cluster;
    return a;
  }

  const std::vector<Cluster>& clusters() const { return clusters_; }

 private:
  struct Candidate {
    std::size_t cluster;  // clusters_.size() means a fresh singleton
    double own;
  };

  double aff(TermIndex u, std::size_t k, std::size_t m) const {
    return term_affinity(k, m, v_.df(u), v_.num_docs);
  }

  void add_to(std::size_t c, TermIndex t) {
    Cluster& cl = clusters_[c];
    state_[t].cluster = c;
    state_[t].slot = cl.members.size();
    cl.members.push_back(t);
    for (auto d : v_.postings[t]) {
      ++cl.count[d];
      cl.id_sum[d] += t;
    }
    cl.alive = true;
  }

  void remove_from(std::size_t c, TermIndex t) {
    Cluster& cl = clusters_[c];
    std::size_t slot = state_[t].slot;
    TermIndex last = cl.members.back();
    cl.members[slot] = last;
    state_[last].slot = slot;
    cl.members.pop_back();
    for (auto d : v_.postings[t]) {
      auto it = cl.count.find(d);
      if (--it->second == 0) {
        cl.count.erase(it);
        cl.id_sum.erase(d);
      } else {
        cl.id_sum[d] -= t;
      }
    }
    if (cl.members.empty()) cl.alive = false;
  }

  // New (m, k) of the members that remain in c after t leaves.
  struct Update {
    std::vector<std::pair<TermIndex, std::pair<std::size_t, std::size_t>>> mk;
    double delta = 0.0;
  };

  Update removal(std::size_t c, TermIndex t) const {
    const Cluster& cl = clusters_[c];
    std::size_t only_t = 0;
    std::unordered_map<TermIndex, std::size_t> pair_docs;
    for (auto d : v_.postings[t]) {
      auto n = cl.count.at(d);
      if (n == 1) ++only_t;
      else if (n == 2) ++pair_docs[static_cast<TermIndex>(cl.id_sum.at(d) - t)];
    }
    Update up;
    for (auto u : cl.members) {
      if (u == t) continue;
      auto it = pair_docs.find(u);
      std::size_t s = it == pair_docs.end() ? 0 : it->second;
      std::size_t m = state_[u].m - only_t - s, k = state_[u].k - s;
      up.delta += aff(u, k, m) - state_[u].aff;
      up.mk.push_back({u, {m, k}});
    }
    return up;
  }

  // New (m, k) of c's members once t joins, plus t's own (m, k).
  Update addition(std::size_t c, TermIndex t, std::size_t& own_m, std::size_t& own_k) const {
    Update up;
    if (c >= clusters_.size()) {
      own_m = own_k = 0;
      return up;
    }
    const Cluster& cl = clusters_[c];
    std::size_t empty = 0;
    std::unordered_map<TermIndex, std::size_t> sole_docs;
    for (auto d : v_.postings[t]) {
      auto it = cl.count.find(d);
      if (it == cl.count.end()) ++empty;
      else if (it->second == 1) ++sole_docs[static_cast<TermIndex>(cl.id_sum.at(d))];
    }
    own_m = cl.count.size();
    own_k = v_.postings[t].size() - empty;
    for (auto u : cl.members) {
      auto it = sole_docs.find(u);
      std::size_t s = it == sole_docs.end() ? 0 : it->second;
      std::size_t m = state_[u].m + empty + s, k = state_[u].k + s;
      up.delta += aff(u, k, m) - state_[u].aff;
      up.mk.push_back({u, {m, k}});
    }
    return up;
  }

  bool visit(TermIndex t) {
    const std::size_t home = state_[t].cluster;
    const double current = state_[t].aff;

    // Clusters sharing at least one document with t, with their hit counts.
    std::vector<std::size_t> touched;
    for (auto d : v_.postings[t]) {
      ++tick_;
      for (auto u : v_.doc_terms[d]) {
        if (u == t) continue;
        std::size_t c = state_[u].cluster;
        if (c == home || stamp_[c] == tick_) continue;
        if (hits_[c] == 0) touched.push_back(c);
        stamp_[c] = tick_;
        ++hits_[c];
      }
    }
    std::vector<Candidate> cands;
    for (auto c : touched) {
      cands.push_back({c, aff(t, hits_[c], clusters_[c].count.size())});
      hits_[c] = 0;
    }
    if (clusters_[home].members.size() > 1) cands.push_back({clusters_.size(), 0.0});
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.own != b.own) return a.own > b.own;
      return a.cluster < b.cluster;
    });

    std::optional<Update> leave;
    for (const auto& cand : cands) {
      if (!(cand.own > current + kEps)) break;
      if (!leave) leave = removal(home, t);
      std::size_t own_m = 0, own_k = 0;
      Update join = addition(cand.cluster, t, own_m, own_k);
      double own = aff(t, own_k, own_m);
      double delta = (own - current) + leave->delta + join.delta;
      if (!(delta > kEps)) continue;

      std::size_t target = cand.cluster;
      if (target >= clusters_.size()) {
        clusters_.emplace_back();
        stamp_.push_back(std::numeric_limits<std::uint64_t>::max());
        hits_.push_back(0);
      }
      remove_from(home, t);
      add_to(target, t);
      for (const auto& [u, mk] : leave->mk) set_state(u, mk.first, mk.second);
      for (const auto& [u, mk] : join.mk) set_state(u, mk.first, mk.second);
      set_state(t, own_m, own_k);
      return true;
    }
    return false;
  }

  void set_state(TermIndex u, std::size_t m, std::size_t k) {
    state_[u].m = m;
    state_[u].k = k;
    state_[u].aff = aff(u, k, m);
  }

  const TermVocabulary& v_;
  std::vector<TermIndex> order_;
  std::vector<TermState> state_;
  std::vector<Cluster> clusters_;
  std::vector<std::uint64_t> stamp_;
  std::vector<std::size_t> hits_;
  std::uint64_t tick_ = 0;
};

}  // namespace

double total_affinity(const TermVocabulary& vocab, const std::vector<std::size_t>& assignment) {
  auto aff = direct_affinities(vocab, assignment);
  double total = 0.0;
  for (double a : aff) total += a;
  return total;
}

PdcResult pdc_cluster(const TermVocabulary& vocab, const PdcOptions& opts, const PassObserver& observer) {
  if (vocab.empty()) throw EmptyVocabulary();
  Clusterer cl(vocab);
  PdcResult result;

  auto snapshot = [&](std::size_t pass, std::size_t moves) {
    auto a = cl.assignment();
    double total = total_affinity(vocab, a);
    result.pass_totals.push_back(total);
    if (observer) observer(PassSnapshot{pass, moves, total, &a});
  };

  snapshot(0, 0);
  for (std::size_t p = 1; p <= opts.max_passes; ++p) {
    std::size_t moves = cl.pass();
    result.passes_run = p;
    snapshot(p, moves);
    if (moves == 0) {
      result.converged = true;
      break;
    }
  }

  auto assignment = cl.assignment();
  auto aff = direct_affinities(vocab, assignment);
  for (const auto& c : cl.clusters()) {
    if (!c.alive || c.members.empty()) continue;
    TermCluster tc;
    for (auto t : c.members) {
      double a = c.members.size() > 1 ? aff[t] : 0.0;
      tc.terms.push_back({t, std::max(0.0, a), a});
    }
    std::sort(tc.terms.begin(), tc.terms.end(), [&](const ClusteredTerm& x, const ClusteredTerm& y) {
      if (x.weight != y.weight) return x.weight > y.weight;
      return vocab.terms[x.term] < vocab.terms[y.term];
    });
    result.clusters.push_back(std::move(tc));
  }
  auto min_term = [&](const TermCluster& c) {
    const std::string* best = nullptr;
    for (const auto& t : c.terms) {
      if (!best || vocab.terms[t.term] < *best) best = &vocab.terms[t.term];
    }
    return *best;
  };
  std::sort(result.clusters.begin(), result.clusters.end(), [&](const TermCluster& a, const TermCluster& b) {
    if (a.terms.size() != b.terms.size()) return a.terms.size() > b.terms.size();
    return min_term(a) < min_term(b);
  });
  return result;
}

}  // namespace litscape
