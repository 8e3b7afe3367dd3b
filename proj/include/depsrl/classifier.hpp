#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "depsrl/encoder.hpp"
#include "depsrl/model.hpp"
#include "depsrl/tensor.hpp"

namespace depsrl {

// Role scores from the argument state alone: logits = W v_i. No bias.
template <class T>
TensorPtr<T> score_basic(Tape<T>& tape, const TensorPtr<T>& weight, const TensorPtr<T>& v_i) {
  return matmul(tape, weight, v_i);
}

// Scores from both edge endpoints: logits = W (v_i . v_p).
template <class T>
TensorPtr<T> score_with_predicate(Tape<T>& tape, const TensorPtr<T>& weight,
                                  const TensorPtr<T>& v_i, const TensorPtr<T>& v_p) {
  return matmul(tape, weight, concat(tape, {v_i, v_p}, 0));
}

// Compositional scores: the weight vector of each role is built from the
// predicate-lemma and role embeddings, w_r = ReLU(U (u_l . e_r)), and scored
// against (v_i . v_p). All roles are computed as one batched map.
template <class T>
TensorPtr<T> score_compositional(Tape<T>& tape, const ClassifierParams<T>& cls,
                                 const TensorPtr<T>& v_i, const TensorPtr<T>& v_p,
                                 std::uint32_t lemma_id) {
  const std::size_t roles = cls.role_emb->rows();
  auto u_l = lookup(tape, cls.lemma_out_emb, lemma_id);
  std::vector<TensorPtr<T>> cols;
  cols.reserve(roles);
  for (std::size_t r = 0; r < roles; ++r)
    cols.push_back(concat(tape, {u_l, lookup(tape, cls.role_emb, r)}, 0));
  auto weights = relu(tape, matmul(tape, cls.compose, stack_cols(tape, cols)));  // [4*d_h x R]
  return matmul(tape, transpose(tape, weights), concat(tape, {v_i, v_p}, 0));
}

// Dispatch on the configured variant for one token.
template <class T>
TensorPtr<T> role_logits(Tape<T>& tape, const SrlModel<T>& model, const EncoderStates<T>& enc,
                         std::size_t token, std::uint32_t predicate_lemma_id) {
  switch (model.classifier.variant) {
    case ClassifierVariant::basic:
      return score_basic(tape, model.classifier.weight, enc.states[token]);
    case ClassifierVariant::predicate_state:
      return score_with_predicate(tape, model.classifier.weight, enc.states[token],
                                  enc.predicate_state);
    default:
      return score_compositional(tape, model.classifier, enc.states[token], enc.predicate_state,
                                 predicate_lemma_id);
  }
}

template <class T>
std::vector<T> role_distribution(const TensorPtr<T>& logits) {
  return softmax_values(logits->values);
}

template <class T>
std::size_t argmax_lowest(const std::vector<T>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// Local decoding: every token picks its best role independently, ties broken
// by the lowest role id. No structural constraints.
template <class T>
std::vector<std::uint32_t> predict_roles(const MappedInstance& inst, const SrlModel<T>& model) {
  Tape<T> tape(/*grad_enabled=*/false);
  std::mt19937_64 rng(0);  // eval mode draws nothing
  auto enc = encode(tape, inst, model, RunMode::eval, rng);
  const std::uint32_t lemma = inst.lemma_ids[inst.predicate_index];
  std::vector<std::uint32_t> out;
  out.reserve(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    auto logits = role_logits(tape, model, enc, i, lemma);
    out.push_back(static_cast<std::uint32_t>(argmax_lowest(logits->values)));
  }
  return out;
}

}  // namespace depsrl
