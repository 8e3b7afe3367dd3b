#pragma once

#include <random>
#include <string>
#include <vector>

#include "depsrl/conll.hpp"
#include "support/corpus_gen.hpp"

namespace testutil {

// Role follows the position relative to the predicate: left neighbor A0,
// right neighbor A1, two right A2. Learnable exactly from the predicate flag.
inline std::vector<depsrl::Sentence> positional_corpus(std::mt19937_64& rng,
                                                       std::size_t n_sentences,
                                                       std::size_t vocab_words = 30) {
  std::vector<std::vector<RowSpec>> corpus;
  std::uniform_int_distribution<std::size_t> len_dist(4, 9);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    const std::size_t n = len_dist(rng);
    const std::size_t p = rng() % n;
    std::vector<RowSpec> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string w = "w" + std::to_string(rng() % vocab_words);
      rows[i].form = w;
      rows[i].plemma = w;
      rows[i].ppos = (i % 2 == 0) ? "NN" : "DT";
      rows[i].head = static_cast<int>(i);
      rows[i].apreds = {""};
    }
    rows[p].pred = rows[p].plemma + ".01";
    rows[p].ppos = "VB";
    if (p >= 1) rows[p - 1].apreds[0] = "A0";
    if (p + 1 < n) rows[p + 1].apreds[0] = "A1";
    if (p + 2 < n) rows[p + 2].apreds[0] = "A2";
    corpus.push_back(std::move(rows));
  }
  return parse(conll_text(corpus));
}

// Two predicates of the same surface form per sentence; each predicate's left
// neighbor is its A0 and right neighbor its A1, so the token between two
// adjacent predicates is A1 of the first and A0 of the second. Without
// per-predicate re-encoding the two instances of a sentence are
// indistinguishable to the encoder.
inline std::vector<depsrl::Sentence> double_predicate_corpus(std::mt19937_64& rng,
                                                             std::size_t n_sentences) {
  std::vector<std::vector<RowSpec>> corpus;
  std::uniform_int_distribution<std::size_t> len_dist(5, 9);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    const std::size_t n = len_dist(rng);
    const std::size_t p1 = 1 + rng() % (n - 4);
    const std::size_t p2 = p1 + 2;  // shared middle token
    std::vector<RowSpec> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string w = "f" + std::to_string(rng() % 6);
      rows[i].form = w;
      rows[i].plemma = w;
      rows[i].ppos = "NN";
      rows[i].head = static_cast<int>(i);
      rows[i].apreds = {"", ""};
    }
    for (std::size_t p : {p1, p2}) {
      rows[p].form = "pred";
      rows[p].plemma = "pred";
      rows[p].ppos = "VB";
    }
    rows[p1].pred = "pred.01";
    rows[p2].pred = "pred.01";
    rows[p1 - 1].apreds[0] = "A0";
    rows[p1 + 1].apreds[0] = "A1";
    rows[p2 - 1].apreds[1] = "A0";
    rows[p2 + 1].apreds[1] = "A1";
    corpus.push_back(std::move(rows));
  }
  return parse(conll_text(corpus));
}

// The role of the final token is a function of the predicate's lemma alone;
// the predicate sits at the start, far away behind a long stretch of varied
// filler. The compositional classifier reads the lemma directly, a plain
// score matrix has to squeeze it through the encoder.
inline std::vector<depsrl::Sentence> lemma_keyed_corpus(std::mt19937_64& rng,
                                                        std::size_t n_sentences,
                                                        std::size_t n_lemmas = 24) {
  static const char* kRoles[3] = {"A0", "A1", "A2"};
  std::vector<std::vector<RowSpec>> corpus;
  std::uniform_int_distribution<std::size_t> len_dist(12, 18);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    const std::size_t n = len_dist(rng);
    const std::size_t lemma = s % n_lemmas;  // every lemma recurs
    std::vector<RowSpec> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string w = "f" + std::to_string(rng() % 12);
      rows[i].form = w;
      rows[i].plemma = w;
      rows[i].ppos = "NN";
      rows[i].head = static_cast<int>(i);
      rows[i].apreds = {""};
    }
    rows[0].form = "v" + std::to_string(lemma);
    rows[0].plemma = "v" + std::to_string(lemma);
    rows[0].ppos = "VB";
    rows[0].pred = rows[0].plemma + ".01";
    rows[n - 1].apreds[0] = kRoles[lemma % 3];
    corpus.push_back(std::move(rows));
  }
  return parse(conll_text(corpus));
}

}  // namespace testutil
