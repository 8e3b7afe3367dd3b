#pragma once

#include <cstddef>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "depsrl/conll.hpp"

namespace testutil {

// Hand-assembled CoNLL-2009 rows for fixtures: 14 fixed columns + APREDs.
struct RowSpec {
  std::string form;
  std::string plemma = "_";
  std::string ppos = "_";
  int head = 0;
  std::string pred = "";             // empty = not a predicate
  std::vector<std::string> apreds;   // "" means "_"
};

inline std::string conll_text(const std::vector<std::vector<RowSpec>>& sentences) {
  std::ostringstream out;
  for (const auto& rows : sentences) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out << (i + 1) << '\t' << r.form << "\t_\t" << r.plemma << "\t_\t" << r.ppos
          << "\t_\t_\t" << r.head << "\t_\t_\t_\t" << (r.pred.empty() ? "_" : "Y") << '\t'
          << (r.pred.empty() ? "_" : r.pred);
      for (const auto& a : r.apreds) out << '\t' << (a.empty() ? "_" : a);
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

// Random small corpus: every sentence gets a chain tree (head = i), random
// predicates and random role cells. Role labels come from a fixed pool.
inline std::vector<std::vector<RowSpec>> random_corpus(std::mt19937_64& rng,
                                                       std::size_t max_sentences = 5,
                                                       std::size_t max_predicates = 3,
                                                       std::size_t n_roles = 4) {
  std::uniform_int_distribution<std::size_t> n_sent(1, max_sentences);
  std::uniform_int_distribution<std::size_t> n_tok(1, 8);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::size_t> role_pick(0, n_roles - 1);
  static const char* kRolePool[] = {"A0", "A1", "A2", "AM-TMP", "AM-LOC", "A3"};
  static const char* kPos[] = {"NN", "VB", "VBZ", "NNS", "DT", "JJ"};

  std::vector<std::vector<RowSpec>> corpus;
  const std::size_t sentences = n_sent(rng);
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t n = n_tok(rng);
    std::vector<std::size_t> preds;
    for (std::size_t i = 0; i < n && preds.size() < max_predicates; ++i)
      if (coin(rng)) preds.push_back(i);

    std::vector<RowSpec> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      rows[i].form = "w" + std::to_string(rng() % 12);
      rows[i].plemma = "l" + std::to_string(rng() % 6);
      rows[i].ppos = kPos[rng() % 6];
      rows[i].head = static_cast<int>(i);  // chain: token i+1 hangs off token i
      rows[i].apreds.assign(preds.size(), "");
    }
    for (std::size_t j = 0; j < preds.size(); ++j) {
      rows[preds[j]].pred = rows[preds[j]].plemma + ".01";
      for (std::size_t i = 0; i < n; ++i)
        if (coin(rng) && coin(rng)) rows[i].apreds[j] = kRolePool[role_pick(rng)];
    }
    corpus.push_back(std::move(rows));
  }
  return corpus;
}

inline std::vector<depsrl::Sentence> parse(const std::string& text) {
  std::istringstream in(text);
  return depsrl::read_conll2009(in);
}

}  // namespace testutil
