#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "depsrl/config.hpp"
#include "depsrl/embeddings.hpp"
#include "depsrl/tensor.hpp"
#include "depsrl/vocab.hpp"

namespace depsrl {

enum Gate { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };
inline constexpr const char* kGateNames[4] = {"in", "forget", "cell", "out"};

template <class T>
struct GateParams {
  TensorPtr<T> w_in;   // [d_h x input_width]
  TensorPtr<T> w_rec;  // [d_h x d_h]
  TensorPtr<T> bias;   // [d_h]
};

template <class T>
struct LstmDirectionParams {
  GateParams<T> gates[4];
};

template <class T>
struct LstmLayerParams {
  LstmDirectionParams<T> fwd, bwd;
};

template <class T>
struct ClassifierParams {
  ClassifierVariant variant = ClassifierVariant::compositional;
  TensorPtr<T> weight;         // basic: [R x 2*d_h]; predicate_state: [R x 4*d_h]
  TensorPtr<T> compose;        // compositional: [4*d_h x (d_lemma_out + d_role)]
  TensorPtr<T> role_emb;       // [R x d_role]
  TensorPtr<T> lemma_out_emb;  // [L x d_lemma_out]
};

namespace detail {

template <class T>
TensorPtr<T> glorot(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::string name) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> v(rows * cols);
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return make_tensor<T>({rows, cols}, std::move(v), /*requires_grad=*/true, std::move(name));
}

template <class T>
TensorPtr<T> embedding(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                       std::string name) {
  std::uniform_real_distribution<double> dist(-0.01, 0.01);
  std::vector<T> v(rows * cols);
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return make_tensor<T>({rows, cols}, std::move(v), true, std::move(name));
}

}  // namespace detail

// All learned parameters plus the inventories and fixed vectors needed to run
// them. Construction order is fixed so a seed fully determines every value.
template <class T>
struct SrlModel {
  ModelConfig config;
  Vocabulary vocab;
  PretrainedTable<T> pretrained;

  TensorPtr<T> word_emb;      // [V_w x d_word_trainable]
  TensorPtr<T> pos_emb;       // [V_pos x d_pos]
  TensorPtr<T> lemma_in_emb;  // [V_lemma x d_lemma_in]
  std::vector<LstmLayerParams<T>> lstm;
  ClassifierParams<T> classifier;

  static SrlModel init(ModelConfig cfg, Vocabulary vocab, PretrainedTable<T> pretrained) {
    cfg.validate();
    if (!pretrained.empty() && pretrained.dim() != cfg.d_word_pretrained)
      throw DataError("pretrained width " + std::to_string(pretrained.dim()) +
                      " does not match configured d_word_pretrained " +
                      std::to_string(cfg.d_word_pretrained));
    if (pretrained.empty()) cfg.d_word_pretrained = 0;

    SrlModel m;
    m.config = cfg;
    m.vocab = std::move(vocab);
    m.pretrained = std::move(pretrained);

    std::mt19937_64 rng(cfg.seed);
    m.word_emb = detail::embedding<T>(rng, m.vocab.words.size(), cfg.d_word_trainable, "word_emb");
    m.pos_emb = detail::embedding<T>(rng, m.vocab.pos.size(), cfg.d_pos, "pos_emb");
    m.lemma_in_emb =
        detail::embedding<T>(rng, m.vocab.lemmas.size(), cfg.d_lemma_in, "lemma_in_emb");

    std::size_t in_width = cfg.input_width();
    for (std::size_t layer = 0; layer < cfg.layers; ++layer) {
      LstmLayerParams<T> lp;
      for (auto* dir : {&lp.fwd, &lp.bwd}) {
        const bool forward = dir == &lp.fwd;
        const std::string prefix =
            "lstm.l" + std::to_string(layer) + (forward ? ".fwd." : ".bwd.");
        for (int g = 0; g < 4; ++g) {
          dir->gates[g].w_in =
              detail::glorot<T>(rng, cfg.d_hidden, in_width, prefix + kGateNames[g] + ".w_in");
          dir->gates[g].w_rec =
              detail::glorot<T>(rng, cfg.d_hidden, cfg.d_hidden, prefix + kGateNames[g] + ".w_rec");
          std::vector<T> b(cfg.d_hidden, g == kForgetGate ? T(1) : T(0));
          dir->gates[g].bias = make_tensor<T>({cfg.d_hidden}, std::move(b), true,
                                              prefix + kGateNames[g] + ".bias");
        }
      }
      m.lstm.push_back(std::move(lp));
      in_width = 2 * cfg.d_hidden;
    }

    const std::size_t roles = m.vocab.roles.size();
    m.classifier.variant = cfg.variant;
    switch (cfg.variant) {
      case ClassifierVariant::basic:
        m.classifier.weight = detail::glorot<T>(rng, roles, 2 * cfg.d_hidden, "cls.weight");
        break;
      case ClassifierVariant::predicate_state:
        m.classifier.weight = detail::glorot<T>(rng, roles, 4 * cfg.d_hidden, "cls.weight");
        break;
      case ClassifierVariant::compositional:
        m.classifier.compose = detail::glorot<T>(rng, 4 * cfg.d_hidden,
                                                 cfg.d_lemma_out + cfg.d_role, "cls.compose");
        m.classifier.role_emb = detail::embedding<T>(rng, roles, cfg.d_role, "cls.role_emb");
        m.classifier.lemma_out_emb =
            detail::embedding<T>(rng, m.vocab.lemmas.size(), cfg.d_lemma_out, "cls.lemma_out_emb");
        break;
    }
    return m;
  }

  // Trainable parameters in a fixed order; the pretrained table is not here.
  std::vector<std::pair<std::string, TensorPtr<T>>> named_parameters() const {
    std::vector<std::pair<std::string, TensorPtr<T>>> out;
    out.emplace_back(word_emb->name, word_emb);
    out.emplace_back(pos_emb->name, pos_emb);
    out.emplace_back(lemma_in_emb->name, lemma_in_emb);
    for (const auto& layer : lstm)
      for (const auto* dir : {&layer.fwd, &layer.bwd})
        for (int g = 0; g < 4; ++g) {
          out.emplace_back(dir->gates[g].w_in->name, dir->gates[g].w_in);
          out.emplace_back(dir->gates[g].w_rec->name, dir->gates[g].w_rec);
          out.emplace_back(dir->gates[g].bias->name, dir->gates[g].bias);
        }
    if (classifier.weight) out.emplace_back(classifier.weight->name, classifier.weight);
    if (classifier.compose) out.emplace_back(classifier.compose->name, classifier.compose);
    if (classifier.role_emb) out.emplace_back(classifier.role_emb->name, classifier.role_emb);
    if (classifier.lemma_out_emb)
      out.emplace_back(classifier.lemma_out_emb->name, classifier.lemma_out_emb);
    return out;
  }

  std::vector<TensorPtr<T>> parameters() const {
    std::vector<TensorPtr<T>> out;
    for (auto& [name, p] : named_parameters()) out.push_back(p);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : parameters()) n += p->size();
    return n;
  }

  void zero_grads() const {
    for (const auto& p : parameters()) p->zero_grad();
  }
};

}  // namespace depsrl
