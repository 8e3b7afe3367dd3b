#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "depsrl/errors.hpp"

namespace depsrl {

enum class ClassifierVariant { basic, predicate_state, compositional };

inline const char* to_string(ClassifierVariant v) {
  switch (v) {
    case ClassifierVariant::basic: return "basic";
    case ClassifierVariant::predicate_state: return "predicate-state";
    default: return "compositional";
  }
}

inline ClassifierVariant classifier_variant_from(const std::string& s) {
  if (s == "basic") return ClassifierVariant::basic;
  if (s == "predicate-state" || s == "predicate_state") return ClassifierVariant::predicate_state;
  if (s == "compositional") return ClassifierVariant::compositional;
  throw DataError("unknown classifier variant '" + s + "'");
}

struct ModelConfig {
  std::size_t d_word_trainable = 100;
  std::size_t d_word_pretrained = 100;  // 0 when no pretrained vectors are used
  std::size_t d_pos = 16;
  std::size_t d_lemma_in = 100;
  std::size_t d_hidden = 512;
  std::size_t d_role = 128;
  std::size_t d_lemma_out = 128;
  std::size_t layers = 4;
  double alpha = 0.25;
  double learning_rate = 0.01;
  ClassifierVariant variant = ClassifierVariant::compositional;
  bool use_pos = true;
  bool use_predicate_flag = true;
  // Whether a word-dropout replacement also switches the pretrained lookup to
  // its UNK row (the whole word identity is replaced) or only the trainable one.
  bool dropout_affects_pretrained = true;
  std::size_t min_lemma_freq = 2;
  std::uint64_t seed = 1;

  // The flag dimension is always present so ablations keep parameter counts;
  // with use_predicate_flag off it is held at zero.
  std::size_t input_width() const {
    return d_word_trainable + d_word_pretrained + d_pos + d_lemma_in + 1;
  }

  void validate() const {
    if (d_word_trainable == 0 || d_pos == 0 || d_lemma_in == 0 || d_hidden == 0 || d_role == 0 ||
        d_lemma_out == 0)
      throw DataError("model config: all dimensions must be positive");
    if (layers < 1) throw DataError("model config: need at least one layer");
    if (alpha < 0) throw DataError("model config: alpha must be >= 0");
  }

  static std::size_t language_word_dim(const std::string& lang) {
    if (lang == "english") return 100;
    if (lang == "chinese") return 128;
    if (lang == "czech" || lang == "spanish") return 300;
    throw DataError("unknown language '" + lang + "' (english, chinese, czech, spanish)");
  }

  // Ablation presets. All keep the representation width of the full model.
  ModelConfig without_pos() const {
    ModelConfig c = *this;
    c.use_pos = false;
    return c;
  }
  ModelConfig without_predicate_flag() const {
    ModelConfig c = *this;
    c.use_predicate_flag = false;
    return c;
  }
  ModelConfig with_basic_classifier() const {
    ModelConfig c = *this;
    c.variant = ClassifierVariant::basic;
    return c;
  }
};

}  // namespace depsrl
