#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "depsrl/conll.hpp"
#include "depsrl/errors.hpp"

namespace depsrl {

// One labeled semantic dependency. NULL cells are absences, never edges.
struct SemDep {
  std::size_t sentence = 0;
  std::size_t predicate = 0;  // 0-based token index
  std::size_t argument = 0;   // 0-based token index
  std::string role;

  auto key() const { return std::tie(sentence, predicate, argument, role); }
  auto unlabeled_key() const { return std::tie(sentence, predicate, argument); }
  bool operator<(const SemDep& o) const { return key() < o.key(); }
  bool operator==(const SemDep& o) const { return key() == o.key(); }
};

struct Prf {
  double precision = 0, recall = 0, f1 = 0;
};

struct EvalCounts {
  std::uint64_t gold = 0, predicted = 0, correct = 0;

  Prf prf() const {
    Prf r;
    r.precision = predicted ? static_cast<double>(correct) / predicted : 0.0;
    r.recall = gold ? static_cast<double>(correct) / gold : 0.0;
    r.f1 = (r.precision + r.recall) > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall)
                                        : 0.0;
    return r;
  }
};

struct EvalReport {
  EvalCounts labeled;
  EvalCounts unlabeled;
  std::map<std::string, EvalCounts> per_role;
  bool senses_included = false;
};

struct BucketScore {
  std::string label;
  EvalCounts counts;
  double gold_share = 0;  // this bucket's share of all gold edges, in percent
};

struct SplitReport {
  EvalReport verbal, nominal, other;
};

// (sentence, predicate position) -> sense string.
using SenseMap = std::map<std::pair<std::size_t, std::size_t>, std::string>;

inline std::vector<SemDep> extract_edges(const std::vector<Sentence>& sentences) {
  std::vector<SemDep> edges;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& sent = sentences[s];
    for (std::size_t j = 0; j < sent.predicate_positions.size(); ++j)
      for (std::size_t i = 0; i < sent.size(); ++i)
        if (sent.tokens[i].apreds[j])
          edges.push_back({s, sent.predicate_positions[j], i, *sent.tokens[i].apreds[j]});
  }
  return edges;
}

inline SenseMap extract_senses(const std::vector<Sentence>& sentences) {
  SenseMap m;
  for (std::size_t s = 0; s < sentences.size(); ++s)
    for (std::size_t p : sentences[s].predicate_positions)
      m[{s, p}] = sentences[s].tokens[p].pred_sense.value_or("_");
  return m;
}

// Labeled scoring over edge sets. An edge is correct when sentence, predicate,
// argument and role all match. With include_senses each predicate contributes
// one extra labeled item whose label is its sense, following the shared-task
// convention. The unlabeled counts ignore the role.
inline EvalReport score_labeled(const std::vector<SemDep>& gold, const std::vector<SemDep>& pred,
                                bool include_senses = false, const SenseMap& gold_senses = {},
                                const SenseMap& pred_senses = {}) {
  EvalReport rep;
  rep.senses_included = include_senses;

  std::set<SemDep> gold_set(gold.begin(), gold.end());
  std::set<SemDep> pred_set(pred.begin(), pred.end());
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> gold_unl, pred_unl;

  for (const auto& e : gold_set) {
    ++rep.labeled.gold;
    ++rep.per_role[e.role].gold;
    gold_unl.insert(e.unlabeled_key());
  }
  for (const auto& e : pred_set) {
    ++rep.labeled.predicted;
    ++rep.per_role[e.role].predicted;
    pred_unl.insert(e.unlabeled_key());
    if (gold_set.count(e)) {
      ++rep.labeled.correct;
      ++rep.per_role[e.role].correct;
    }
  }
  rep.unlabeled.gold = gold_unl.size();
  rep.unlabeled.predicted = pred_unl.size();
  for (const auto& k : pred_unl) rep.unlabeled.correct += gold_unl.count(k);

  if (include_senses) {
    rep.labeled.gold += gold_senses.size();
    rep.labeled.predicted += pred_senses.size();
    rep.unlabeled.gold += gold_senses.size();
    rep.unlabeled.predicted += pred_senses.size();
    for (const auto& [key, sense] : pred_senses) {
      auto it = gold_senses.find(key);
      if (it != gold_senses.end()) {
        ++rep.unlabeled.correct;  // predicate position matches
        if (it->second == sense) ++rep.labeled.correct;
      }
    }
  }
  return rep;
}

// Unlabeled argument recognition: only (sentence, predicate, argument) must
// match. Reported through the labeled slot of the result.
inline EvalReport argument_recognition(const std::vector<SemDep>& gold,
                                       const std::vector<SemDep>& pred) {
  EvalReport rep;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> gold_set, pred_set;
  for (const auto& e : gold) gold_set.insert(e.unlabeled_key());
  for (const auto& e : pred) pred_set.insert(e.unlabeled_key());
  rep.labeled.gold = gold_set.size();
  rep.labeled.predicted = pred_set.size();
  for (const auto& k : pred_set) rep.labeled.correct += gold_set.count(k);
  rep.unlabeled = rep.labeled;
  return rep;
}

// Buckets over non-negative distances, defined by strictly increasing cut
// points: [0..c1], (c1..c2], ..., (cm..inf). The default cuts 1..7 label the
// buckets "<=1", "2", ..., "7+".
struct DistanceBuckets {
  std::vector<std::size_t> cuts;

  static DistanceBuckets standard() { return {{1, 2, 3, 4, 5, 6, 7}}; }

  void validate() const {
    if (cuts.empty()) throw DataError("distance buckets: need at least one cut");
    for (std::size_t i = 1; i < cuts.size(); ++i)
      if (cuts[i] <= cuts[i - 1])
        throw DataError("distance buckets: cut points must be strictly increasing");
  }

  std::size_t count() const { return cuts.size(); }

  std::size_t bucket_of(std::size_t d) const {
    for (std::size_t i = 0; i < cuts.size(); ++i)
      if (d <= cuts[i]) return i;
    return cuts.size() - 1;  // last bucket is open-ended
  }

  std::string label(std::size_t i) const {
    if (i == 0) return "<=" + std::to_string(cuts[0]);
    if (i + 1 == cuts.size()) return std::to_string(cuts[i]) + "+";
    return std::to_string(cuts[i]);
  }
};

namespace detail {
inline std::vector<BucketScore> bucketize(const std::vector<SemDep>& gold,
                                          const std::vector<SemDep>& pred,
                                          const DistanceBuckets& buckets,
                                          const std::map<SemDep, std::size_t>& distance) {
  buckets.validate();
  std::vector<BucketScore> out(buckets.count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i].label = buckets.label(i);

  std::set<SemDep> gold_set(gold.begin(), gold.end());
  for (const auto& e : gold_set) ++out[buckets.bucket_of(distance.at(e))].counts.gold;
  std::set<SemDep> pred_set(pred.begin(), pred.end());
  for (const auto& e : pred_set) {
    auto& b = out[buckets.bucket_of(distance.at(e))].counts;
    ++b.predicted;
    if (gold_set.count(e)) ++b.correct;
  }
  std::uint64_t total_gold = 0;
  for (const auto& b : out) total_gold += b.counts.gold;
  for (auto& b : out)
    b.gold_share = total_gold ? 100.0 * static_cast<double>(b.counts.gold) / total_gold : 0.0;
  return out;
}
}  // namespace detail

// Surface distance |argument - predicate| per edge, bucketed.
inline std::vector<BucketScore> distance_f1(const std::vector<SemDep>& gold,
                                            const std::vector<SemDep>& pred,
                                            const DistanceBuckets& buckets) {
  std::map<SemDep, std::size_t> dist;
  for (const auto* set : {&gold, &pred})
    for (const auto& e : *set)
      dist[e] = e.argument > e.predicate ? e.argument - e.predicate : e.predicate - e.argument;
  return detail::bucketize(gold, pred, buckets, dist);
}

// Split by the predicate token's predicted POS: prefix V = verbal, prefix N =
// nominal, anything else lands in "other". An optional mapping (tag -> 'V' or
// 'N') overrides the prefix heuristic for non-English tag sets.
inline SplitReport verbal_nominal_split(const std::vector<SemDep>& gold,
                                        const std::vector<SemDep>& pred,
                                        const std::vector<Sentence>& sentences,
                                        const std::map<std::string, char>& pos_map = {}) {
  auto kind_of = [&](const SemDep& e) -> char {
    const std::string& ppos = sentences[e.sentence].tokens[e.predicate].ppos;
    if (auto it = pos_map.find(ppos); it != pos_map.end()) return it->second;
    if (!pos_map.empty()) return 'O';
    if (!ppos.empty() && ppos[0] == 'V') return 'V';
    if (!ppos.empty() && ppos[0] == 'N') return 'N';
    return 'O';
  };
  std::vector<SemDep> gv, gn, go, pv, pn, po;
  for (const auto& e : gold) (kind_of(e) == 'V' ? gv : kind_of(e) == 'N' ? gn : go).push_back(e);
  for (const auto& e : pred) (kind_of(e) == 'V' ? pv : kind_of(e) == 'N' ? pn : po).push_back(e);
  SplitReport rep;
  rep.verbal = score_labeled(gv, pv);
  rep.nominal = score_labeled(gn, pn);
  rep.other = score_labeled(go, po);
  return rep;
}

namespace detail {
// Undirected tree distances from `from` via HEAD links; throws on cycles or
// broken trees, naming the sentence.
inline std::vector<int> tree_distances(const Sentence& sent, std::size_t from,
                                       std::size_t sentence_id) {
  const std::size_t n = sent.size();
  std::vector<std::vector<std::size_t>> adj(n);
  std::size_t roots = 0, arcs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int h = sent.tokens[i].head;
    if (h == -1)
      throw DataError("sentence " + std::to_string(sentence_id) + ": HEAD column missing");
    if (h == 0) {
      ++roots;
      continue;
    }
    adj[i].push_back(static_cast<std::size_t>(h - 1));
    adj[static_cast<std::size_t>(h - 1)].push_back(i);
    ++arcs;
  }
  if (roots == 0 || arcs != n - roots)
    throw DataError("sentence " + std::to_string(sentence_id) + ": HEAD column is not a tree");

  std::vector<int> dist(n, -1);
  std::deque<std::size_t> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adj[u])
      if (dist[v] == -1) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  // a forest with several roots can leave nodes unreached; flag it as above
  for (std::size_t i = 0; i < n; ++i)
    if (dist[i] == -1)
      throw DataError("sentence " + std::to_string(sentence_id) + ": HEAD column is not a tree");
  return dist;
}
}  // namespace detail

// F1 by the length of the undirected tree path between predicate and argument,
// restricted to nominal predicates (POS prefix N). Analysis only: the gold
// HEAD column never feeds the model.
inline std::vector<BucketScore> syntactic_distance_f1(
    const std::vector<SemDep>& gold, const std::vector<SemDep>& pred,
    const std::vector<Sentence>& sentences, const DistanceBuckets& buckets,
    const std::map<std::string, char>& pos_map = {}) {
  auto nominal = [&](const SemDep& e) {
    const std::string& ppos = sentences[e.sentence].tokens[e.predicate].ppos;
    if (auto it = pos_map.find(ppos); it != pos_map.end()) return it->second == 'N';
    if (!pos_map.empty()) return false;
    return !ppos.empty() && ppos[0] == 'N';
  };
  std::vector<SemDep> g, p;
  for (const auto& e : gold)
    if (nominal(e)) g.push_back(e);
  for (const auto& e : pred)
    if (nominal(e)) p.push_back(e);

  // path lengths per (sentence, predicate), computed once
  std::map<std::pair<std::size_t, std::size_t>, std::vector<int>> cache;
  std::map<SemDep, std::size_t> dist;
  for (const auto* set : {&g, &p})
    for (const auto& e : *set) {
      auto key = std::make_pair(e.sentence, e.predicate);
      auto it = cache.find(key);
      if (it == cache.end())
        it = cache.emplace(key, detail::tree_distances(sentences[e.sentence], e.predicate,
                                                       e.sentence))
                 .first;
      dist[e] = static_cast<std::size_t>(it->second[e.argument]);
    }
  return detail::bucketize(g, p, buckets, dist);
}

}  // namespace depsrl
