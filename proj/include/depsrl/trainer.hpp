#pragma once

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "depsrl/adam.hpp"
#include "depsrl/classifier.hpp"
#include "depsrl/conll.hpp"
#include "depsrl/encoder.hpp"
#include "depsrl/model.hpp"
#include "depsrl/scorer.hpp"
#include "depsrl/vocab.hpp"

namespace depsrl {

// Sum of per-token cross-entropies against the gold roles, NULL included as
// an ordinary class.
template <class T>
TensorPtr<T> instance_loss(Tape<T>& tape, const MappedInstance& inst, const SrlModel<T>& model,
                           RunMode mode, std::mt19937_64& rng) {
  auto enc = encode(tape, inst, model, mode, rng);
  const std::uint32_t lemma = inst.lemma_ids[inst.predicate_index];
  std::vector<TensorPtr<T>> terms;
  terms.reserve(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const std::int64_t gold = inst.gold_role_ids[i];
    if (gold < 0)
      throw DataError("instance_loss: token " + std::to_string(i) +
                      " carries a role outside the training inventory");
    auto logits = role_logits(tape, model, enc, i, lemma);
    terms.push_back(softmax_cross_entropy(tape, logits, static_cast<std::size_t>(gold)));
  }
  return add_n(tape, terms);
}

struct TrainSchedule {
  std::size_t max_epochs = 30;
  std::size_t patience = 5;    // dev evaluations without improvement before stopping
  std::size_t batch_size = 1;  // instances per Adam step
  std::size_t eval_every = 1;  // epochs between dev evaluations
  double clip_norm = 0.0;      // 0 = off
  std::size_t threads = 1;     // 1 = deterministic reference mode

  void validate() const {
    if (patience < 1) throw DataError("schedule: patience must be >= 1");
    if (batch_size < 1) throw DataError("schedule: batch size must be >= 1");
    if (eval_every < 1) throw DataError("schedule: eval cadence must be >= 1");
    if (threads < 1) throw DataError("schedule: threads must be >= 1");
  }
};

template <class T>
struct Checkpoint {
  SrlModel<T> model;
  bool has_adam = false;
  AdamState<T> adam;
  double best_dev_f1 = 0.0;
  std::size_t best_epoch = 0;
};

// Copy of the input sentences with every APRED cell replaced by the model's
// predictions. PRED/FILLPRED and all other columns pass through.
template <class T>
std::vector<Sentence> predict_corpus(const std::vector<Sentence>& input, const SrlModel<T>& model) {
  std::vector<Sentence> out = input;
  for (auto& sent : out) {
    for (std::size_t j = 0; j < sent.predicate_positions.size(); ++j) {
      PredicateInstance inst;
      inst.sentence = &sent;
      inst.predicate_index = sent.predicate_positions[j];
      auto mapped = map_instance(inst, model.vocab, model.pretrained);
      auto roles = predict_roles(mapped, model);
      for (std::size_t i = 0; i < sent.size(); ++i)
        sent.tokens[i].apreds[j] =
            roles[i] == Vocabulary::kNullRoleId
                ? std::optional<std::string>{}
                : std::optional<std::string>{model.vocab.roles.id_to_symbol[roles[i]]};
    }
  }
  return out;
}

template <class T>
Prf evaluate_dev(const std::vector<Sentence>& dev, const SrlModel<T>& model) {
  auto predicted = predict_corpus(dev, model);
  return score_labeled(extract_edges(dev), extract_edges(predicted)).labeled.prf();
}

namespace detail {

// Every instance gets its own stream derived from (seed, epoch, index), so
// forward passes are identical no matter how instances are scheduled across
// threads.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t epoch, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (epoch + 1) + 0xbf58476d1ce4e5b9ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

template <class T>
std::vector<std::vector<T>> snapshot_values(const std::vector<TensorPtr<T>>& params) {
  std::vector<std::vector<T>> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p->values);
  return out;
}

template <class T>
void restore_values(const std::vector<TensorPtr<T>>& params,
                    const std::vector<std::vector<T>>& values) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->values = values[i];
}

}  // namespace detail

// One line per dev evaluation: epoch, mean training loss, dev P/R/F1.
template <class T>
Checkpoint<T> train(const std::vector<Sentence>& train_sents,
                    const std::vector<Sentence>& dev_sents, ModelConfig cfg,
                    const TrainSchedule& sched, PretrainedTable<T> pretrained,
                    std::ostream& log) {
  cfg.validate();
  sched.validate();
  if (train_sents.empty()) throw DataError("train: empty training corpus");
  if (dev_sents.empty()) throw DataError("train: empty development corpus");
  if (extract_edges(dev_sents).empty())
    throw DataError("train: development set has no gold arguments, F1 is undefined");

  auto vocab = build_vocab(train_sents, cfg.min_lemma_freq);
  SrlModel<T> model = SrlModel<T>::init(cfg, std::move(vocab), std::move(pretrained));

  std::vector<MappedInstance> instances;
  for (const auto& inst : extract_instances(train_sents))
    instances.push_back(map_instance(inst, model.vocab, model.pretrained));
  if (instances.empty()) throw DataError("train: training corpus has no predicates");

  auto params = model.parameters();
  AdamState<T> adam;
  adam.learning_rate = static_cast<T>(cfg.learning_rate);
  adam.init(params);

  std::mt19937_64 shuffle_rng(cfg.seed);
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Checkpoint<T> best;
  best.best_dev_f1 = -1.0;
  std::vector<std::vector<T>> best_values = detail::snapshot_values(params);
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= sched.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;

    for (std::size_t start = 0; start < order.size(); start += sched.batch_size) {
      const std::size_t end = std::min(order.size(), start + sched.batch_size);

      if (sched.threads <= 1 || end - start <= 1) {
        for (std::size_t k = start; k < end; ++k) {
          const std::size_t idx = order[k];
          std::mt19937_64 rng(detail::mix_seed(cfg.seed, epoch, idx));
          Tape<T> tape;
          auto loss = instance_loss(tape, instances[idx], model, RunMode::train, rng);
          epoch_loss += static_cast<double>(loss->values[0]);
          tape.backward(loss);
        }
      } else {
        // Data-parallel batch: forward passes run concurrently, gradient
        // accumulation is serialized. Reproducible only up to floating-point
        // summation order.
        std::mutex grad_mutex;
        std::vector<std::thread> workers;
        const std::size_t n_workers = std::min(sched.threads, end - start);
        for (std::size_t w = 0; w < n_workers; ++w) {
          workers.emplace_back([&, w] {
            for (std::size_t k = start + w; k < end; k += n_workers) {
              const std::size_t idx = order[k];
              std::mt19937_64 rng(detail::mix_seed(cfg.seed, epoch, idx));
              Tape<T> tape;
              auto loss = instance_loss(tape, instances[idx], model, RunMode::train, rng);
              std::lock_guard<std::mutex> hold(grad_mutex);
              epoch_loss += static_cast<double>(loss->values[0]);
              tape.backward(loss);
            }
          });
        }
        for (auto& t : workers) t.join();
      }

      if (sched.clip_norm > 0) clip_grad_norm(params, static_cast<T>(sched.clip_norm));
      adam_step(params, adam);
      zero_grads(params);
    }

    if (epoch % sched.eval_every != 0 && epoch != sched.max_epochs) continue;

    const Prf dev = evaluate_dev(dev_sents, model);
    const double mean_loss = epoch_loss / static_cast<double>(instances.size());
    char line[160];
    std::snprintf(line, sizeof(line), "epoch=%zu mean_loss=%.6f dev_p=%.6f dev_r=%.6f dev_f1=%.6f\n",
                  epoch, mean_loss, dev.precision, dev.recall, dev.f1);
    log << line << std::flush;

    if (dev.f1 > best.best_dev_f1) {
      best.best_dev_f1 = dev.f1;
      best.best_epoch = epoch;
      best_values = detail::snapshot_values(params);
      stale = 0;
    } else {
      ++stale;
      if (stale >= sched.patience) break;
    }
  }

  detail::restore_values(params, best_values);
  best.model = std::move(model);
  best.has_adam = false;
  best.adam = std::move(adam);
  return best;
}

}  // namespace depsrl
