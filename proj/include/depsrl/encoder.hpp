#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "depsrl/conll.hpp"
#include "depsrl/model.hpp"
#include "depsrl/tensor.hpp"
#include "depsrl/vocab.hpp"

namespace depsrl {

enum class RunMode { train, eval };

// A predicate instance resolved against the inventories once, so the hot path
// works on ids only. gold_role_ids carries -1 for labels outside the training
// inventory (possible on dev/test; never used for training losses).
struct MappedInstance {
  std::size_t predicate_index = 0;
  std::vector<std::uint32_t> word_ids;
  std::vector<std::uint32_t> pretrained_rows;
  std::vector<std::uint32_t> pos_ids;
  std::vector<std::uint32_t> lemma_ids;  // meaningful at predicate tokens
  std::vector<char> is_predicate;        // sentence-level FILLPRED flags
  std::vector<std::int64_t> gold_role_ids;

  std::size_t size() const { return word_ids.size(); }
};

template <class T>
MappedInstance map_instance(const PredicateInstance& inst, const Vocabulary& vocab,
                            const PretrainedTable<T>& pretrained) {
  MappedInstance m;
  m.predicate_index = inst.predicate_index;
  const Sentence& sent = *inst.sentence;
  m.word_ids.reserve(sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) {
    const Token& tok = sent.tokens[i];
    m.word_ids.push_back(vocab.word_id(tok.form));
    m.pretrained_rows.push_back(pretrained.empty() ? 0 : pretrained.row_for(tok.form));
    m.pos_ids.push_back(vocab.pos_id(tok.ppos));
    m.lemma_ids.push_back(vocab.lemma_id(tok.plemma));
    m.is_predicate.push_back(tok.fill_pred ? 1 : 0);
    m.gold_role_ids.push_back(i < inst.gold_roles.size() ? vocab.role_id(inst.gold_roles[i])
                                                         : vocab.kNullRoleId);
  }
  return m;
}

// Per-token input vectors: trainable word embedding, fixed pretrained
// embedding, POS embedding, lemma embedding, and a trailing predicate flag.
// The lemma block is active only where the predicate marker is; with the flag
// disabled the encoding is predicate-independent (single-pass), so the lemma
// block then activates at every predicate token of the sentence instead of
// just the current one.
template <class T>
std::vector<TensorPtr<T>> represent_words(Tape<T>& tape, const MappedInstance& inst,
                                          const SrlModel<T>& model, RunMode mode,
                                          std::mt19937_64& rng) {
  const ModelConfig& cfg = model.config;
  const std::size_t n = inst.size();

  std::vector<std::uint32_t> word_ids = inst.word_ids;
  std::vector<std::uint32_t> pretrained_rows = inst.pretrained_rows;
  if (mode == RunMode::train && cfg.alpha > 0) {
    const auto mask = word_dropout_mask(inst.word_ids, model.vocab, cfg.alpha, rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      word_ids[i] = Vocabulary::kUnkId;
      if (cfg.dropout_affects_pretrained && !model.pretrained.empty())
        pretrained_rows[i] = model.pretrained.unk_row();
    }
  }

  auto zero_pos = zeros<T>({cfg.d_pos});
  auto zero_lemma = zeros<T>({cfg.d_lemma_in});
  auto flag_on = scalar_tensor<T>(T(1));
  auto flag_off = scalar_tensor<T>(T(0));

  std::vector<TensorPtr<T>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<TensorPtr<T>> parts;
    parts.push_back(lookup(tape, model.word_emb, word_ids[i]));
    if (!model.pretrained.empty())
      parts.push_back(lookup(tape, model.pretrained.table, pretrained_rows[i]));
    parts.push_back(cfg.use_pos ? lookup(tape, model.pos_emb, inst.pos_ids[i]) : zero_pos);
    const bool lemma_active = cfg.use_predicate_flag ? (i == inst.predicate_index)
                                                     : (inst.is_predicate[i] != 0);
    parts.push_back(lemma_active ? lookup(tape, model.lemma_in_emb, inst.lemma_ids[i])
                                 : zero_lemma);
    parts.push_back(cfg.use_predicate_flag && i == inst.predicate_index ? flag_on : flag_off);
    out.push_back(concat(tape, parts, 0));
  }
  return out;
}

// One LSTM step: forget-gate cell, no peepholes.
template <class T>
std::pair<TensorPtr<T>, TensorPtr<T>> lstm_step(Tape<T>& tape, const TensorPtr<T>& x,
                                                const TensorPtr<T>& h_prev,
                                                const TensorPtr<T>& c_prev,
                                                const LstmDirectionParams<T>& p) {
  auto gate = [&](Gate g, Pointwise f) {
    auto pre = add_n(tape, {matmul(tape, p.gates[g].w_in, x), matmul(tape, p.gates[g].w_rec, h_prev),
                            p.gates[g].bias});
    return pointwise(tape, f, pre);
  };
  auto i = gate(kInputGate, Pointwise::sigmoid);
  auto f = gate(kForgetGate, Pointwise::sigmoid);
  auto g = gate(kCellGate, Pointwise::tanh);
  auto o = gate(kOutputGate, Pointwise::sigmoid);
  auto c = add(tape, mul(tape, f, c_prev), mul(tape, i, g));
  auto h = mul(tape, o, tanh(tape, c));
  return {h, c};
}

template <class T>
struct EncoderStates {
  std::vector<TensorPtr<T>> states;  // one [2*d_h] vector per token
  TensorPtr<T> predicate_state;      // states[predicate_index]
};

// Stacked bidirectional encoding: layer 0 reads the word representations,
// every higher layer reads the concatenated states of the layer below, and
// the output at each position concatenates the top layer's forward and
// backward states. Initial h and c are zero.
template <class T>
EncoderStates<T> encode(Tape<T>& tape, const MappedInstance& inst, const SrlModel<T>& model,
                        RunMode mode, std::mt19937_64& rng) {
  if (inst.size() == 0) throw ShapeError("encode: empty sentence");
  const std::size_t n = inst.size();
  const std::size_t d_h = model.config.d_hidden;

  std::vector<TensorPtr<T>> layer_in = represent_words(tape, inst, model, mode, rng);
  for (const auto& layer : model.lstm) {
    auto h0 = zeros<T>({d_h});
    auto c0 = zeros<T>({d_h});
    std::vector<TensorPtr<T>> fwd(n), bwd(n);
    TensorPtr<T> h = h0, c = c0;
    for (std::size_t t = 0; t < n; ++t) {
      auto [hn, cn] = lstm_step(tape, layer_in[t], h, c, layer.fwd);
      fwd[t] = h = hn;
      c = cn;
    }
    h = h0;
    c = c0;
    for (std::size_t t = n; t-- > 0;) {
      auto [hn, cn] = lstm_step(tape, layer_in[t], h, c, layer.bwd);
      bwd[t] = h = hn;
      c = cn;
    }
    std::vector<TensorPtr<T>> merged(n);
    for (std::size_t t = 0; t < n; ++t) merged[t] = concat(tape, {fwd[t], bwd[t]}, 0);
    layer_in = std::move(merged);
  }

  EncoderStates<T> out;
  out.states = std::move(layer_in);
  out.predicate_state = out.states[inst.predicate_index];
  return out;
}

}  // namespace depsrl
