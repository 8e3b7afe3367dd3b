#pragma once

#include <string>
#include <vector>

#include "depsrl/classifier.hpp"
#include "depsrl/encoder.hpp"
#include "depsrl/model.hpp"
#include "support/corpus_gen.hpp"

namespace testutil {

// Two-sentence fixture: enough symbols for every inventory, two predicates in
// the first sentence.
inline std::vector<depsrl::Sentence> tiny_corpus() {
  return parse(conll_text({
      {
          {"John", "john", "NNP", 0, "", {"A0", ""}},
          {"buys", "buy", "VBZ", 1, "buy.01", {"", "A1"}},
          {"and", "and", "CC", 2, "", {"", ""}},
          {"sells", "sell", "VBZ", 2, "sell.01", {"", ""}},
          {"shares", "share", "NNS", 4, "", {"A1", "A0"}},
      },
      {
          {"prices", "price", "NNS", 0, "", {"A1"}},
          {"fell", "fall", "VBD", 1, "fall.01", {""}},
      },
  }));
}

inline depsrl::ModelConfig tiny_config(std::size_t d_hidden = 6, std::size_t layers = 2) {
  depsrl::ModelConfig cfg;
  cfg.d_word_trainable = 5;
  cfg.d_word_pretrained = 0;
  cfg.d_pos = 3;
  cfg.d_lemma_in = 4;
  cfg.d_hidden = d_hidden;
  cfg.d_role = 3;
  cfg.d_lemma_out = 4;
  cfg.layers = layers;
  cfg.alpha = 0.0;
  cfg.min_lemma_freq = 1;
  cfg.seed = 7;
  return cfg;
}

inline depsrl::SrlModel<double> tiny_model(depsrl::ModelConfig cfg,
                                           const std::vector<depsrl::Sentence>& corpus) {
  auto vocab = depsrl::build_vocab(corpus, cfg.min_lemma_freq);
  return depsrl::SrlModel<double>::init(cfg, vocab,
                                        depsrl::PretrainedTable<double>::none());
}

}  // namespace testutil
