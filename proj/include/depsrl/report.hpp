#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "depsrl/conll.hpp"
#include "depsrl/errors.hpp"
#include "depsrl/scorer.hpp"

namespace depsrl {

// Everything the eval subcommand prints: the aggregate scores plus the
// breakdowns.
struct FullReport {
  EvalReport overall;
  std::vector<BucketScore> by_distance;
  SplitReport by_predicate_kind;
  EvalReport recognition;  // unlabeled argument recognition
  SplitReport recognition_by_kind;
  std::vector<BucketScore> by_syntactic_distance;  // nominal predicates only
  bool has_syntactic = false;
};

inline void check_alignment(const std::vector<Sentence>& gold,
                            const std::vector<Sentence>& pred) {
  if (gold.size() != pred.size())
    throw DataError("sentence-count mismatch: gold has " + std::to_string(gold.size()) +
                    ", predictions have " + std::to_string(pred.size()));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != pred[i].size())
      throw DataError("sentence " + std::to_string(i) + ": token count mismatch (" +
                      std::to_string(gold[i].size()) + " vs " + std::to_string(pred[i].size()) +
                      ")");
    if (gold[i].predicate_positions != pred[i].predicate_positions)
      throw DataError("sentence " + std::to_string(i) + ": predicate positions differ");
  }
}

inline FullReport full_report(const std::vector<Sentence>& gold,
                              const std::vector<Sentence>& pred, bool include_senses,
                              const DistanceBuckets& buckets,
                              const std::map<std::string, char>& pos_map = {}) {
  check_alignment(gold, pred);
  const auto gold_edges = extract_edges(gold);
  const auto pred_edges = extract_edges(pred);

  FullReport rep;
  rep.overall = score_labeled(gold_edges, pred_edges, include_senses, extract_senses(gold),
                              extract_senses(pred));
  rep.by_distance = distance_f1(gold_edges, pred_edges, buckets);
  rep.by_predicate_kind = verbal_nominal_split(gold_edges, pred_edges, gold, pos_map);
  rep.recognition = argument_recognition(gold_edges, pred_edges);
  {
    auto nominal = [&](const SemDep& e) {
      const std::string& ppos = gold[e.sentence].tokens[e.predicate].ppos;
      if (auto it = pos_map.find(ppos); it != pos_map.end()) return it->second;
      if (!pos_map.empty()) return 'O';
      return ppos.empty() ? 'O' : (ppos[0] == 'V' ? 'V' : ppos[0] == 'N' ? 'N' : 'O');
    };
    std::vector<SemDep> gv, gn, pv, pn;
    for (const auto& e : gold_edges) (nominal(e) == 'V' ? gv : gn).push_back(e);
    for (const auto& e : pred_edges) (nominal(e) == 'V' ? pv : pn).push_back(e);
    rep.recognition_by_kind.verbal = argument_recognition(gv, pv);
    rep.recognition_by_kind.nominal = argument_recognition(gn, pn);
  }
  bool heads_present = true;
  for (const auto& s : gold)
    for (const auto& t : s.tokens) heads_present &= t.head != -1;
  if (heads_present && !gold.empty()) {
    rep.by_syntactic_distance =
        syntactic_distance_f1(gold_edges, pred_edges, gold, buckets, pos_map);
    rep.has_syntactic = true;
  }
  return rep;
}

namespace detail {

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

inline std::string prf_line(const EvalCounts& c) {
  const Prf r = c.prf();
  return "P " + fmt("%.4f", r.precision) + "  R " + fmt("%.4f", r.recall) + "  F1 " +
         fmt("%.4f", r.f1) + "  (gold " + std::to_string(c.gold) + ", predicted " +
         std::to_string(c.predicted) + ", correct " + std::to_string(c.correct) + ")";
}

inline void kv_counts(std::string& out, const std::string& prefix, const EvalCounts& c) {
  const Prf r = c.prf();
  out += prefix + ".precision " + fmt("%.6f", r.precision) + "\n";
  out += prefix + ".recall " + fmt("%.6f", r.recall) + "\n";
  out += prefix + ".f1 " + fmt("%.6f", r.f1) + "\n";
  out += prefix + ".gold " + std::to_string(c.gold) + "\n";
  out += prefix + ".predicted " + std::to_string(c.predicted) + "\n";
  out += prefix + ".correct " + std::to_string(c.correct) + "\n";
}

}  // namespace detail

inline std::string format_text(const FullReport& rep) {
  std::string out;
  out += std::string("semantic scores (senses ") +
         (rep.overall.senses_included ? "included" : "excluded") + ")\n";
  out += "  labeled    " + detail::prf_line(rep.overall.labeled) + "\n";
  out += "  unlabeled  " + detail::prf_line(rep.overall.unlabeled) + "\n";
  out += "per-role\n";
  for (const auto& [role, counts] : rep.overall.per_role)
    out += "  " + role + std::string(role.size() < 9 ? 9 - role.size() : 1, ' ') +
           detail::prf_line(counts) + "\n";
  out += "by surface distance\n";
  for (const auto& b : rep.by_distance)
    out += "  " + b.label + std::string(b.label.size() < 9 ? 9 - b.label.size() : 1, ' ') + "F1 " +
           detail::fmt("%.4f", b.counts.prf().f1) + "  share " + detail::fmt("%.2f", b.gold_share) +
           "%\n";
  out += "verbal predicates\n  labeled    " + detail::prf_line(rep.by_predicate_kind.verbal.labeled) +
         "\n";
  out += "nominal predicates\n  labeled    " +
         detail::prf_line(rep.by_predicate_kind.nominal.labeled) + "\n";
  if (rep.by_predicate_kind.other.labeled.gold || rep.by_predicate_kind.other.labeled.predicted)
    out += "other predicates\n  labeled    " +
           detail::prf_line(rep.by_predicate_kind.other.labeled) + "\n";
  out += "argument recognition (unlabeled)\n";
  out += "  all        " + detail::prf_line(rep.recognition.labeled) + "\n";
  out += "  verbal     " + detail::prf_line(rep.recognition_by_kind.verbal.labeled) + "\n";
  out += "  nominal    " + detail::prf_line(rep.recognition_by_kind.nominal.labeled) + "\n";
  if (rep.has_syntactic) {
    out += "by syntactic distance (nominal predicates)\n";
    for (const auto& b : rep.by_syntactic_distance)
      out += "  " + b.label + std::string(b.label.size() < 9 ? 9 - b.label.size() : 1, ' ') +
             "F1 " + detail::fmt("%.4f", b.counts.prf().f1) + "  share " +
             detail::fmt("%.2f", b.gold_share) + "%\n";
  }
  return out;
}

inline std::string format_kv(const FullReport& rep) {
  std::string out;
  out += std::string("senses.included ") + (rep.overall.senses_included ? "1" : "0") + "\n";
  detail::kv_counts(out, "labeled", rep.overall.labeled);
  detail::kv_counts(out, "unlabeled", rep.overall.unlabeled);
  for (const auto& [role, counts] : rep.overall.per_role)
    detail::kv_counts(out, "role." + role, counts);
  for (const auto& b : rep.by_distance) {
    detail::kv_counts(out, "distance." + b.label, b.counts);
    out += "distance." + b.label + ".share " + detail::fmt("%.6f", b.gold_share) + "\n";
  }
  detail::kv_counts(out, "verbal", rep.by_predicate_kind.verbal.labeled);
  detail::kv_counts(out, "nominal", rep.by_predicate_kind.nominal.labeled);
  detail::kv_counts(out, "other", rep.by_predicate_kind.other.labeled);
  detail::kv_counts(out, "recognition", rep.recognition.labeled);
  detail::kv_counts(out, "recognition.verbal", rep.recognition_by_kind.verbal.labeled);
  detail::kv_counts(out, "recognition.nominal", rep.recognition_by_kind.nominal.labeled);
  if (rep.has_syntactic)
    for (const auto& b : rep.by_syntactic_distance) {
      detail::kv_counts(out, "syntactic_distance." + b.label, b.counts);
      out += "syntactic_distance." + b.label + ".share " + detail::fmt("%.6f", b.gold_share) +
             "\n";
    }
  return out;
}

}  // namespace depsrl
