#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "depsrl/binio.hpp"
#include "depsrl/model.hpp"
#include "depsrl/trainer.hpp"

namespace depsrl {

// Self-describing checkpoint container: little-endian header, named section
// table, payload, trailing FNV-1a checksum over everything before it. Bytes
// are stable, so save -> load -> save is the identity.
inline constexpr char kCheckpointMagic[8] = {'D', 'S', 'R', 'L', 'M', 'O', 'D', 'L'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void save_config(std::ostream& out, const ModelConfig& c) {
  binio::write_pod<std::uint64_t>(out, c.d_word_trainable);
  binio::write_pod<std::uint64_t>(out, c.d_word_pretrained);
  binio::write_pod<std::uint64_t>(out, c.d_pos);
  binio::write_pod<std::uint64_t>(out, c.d_lemma_in);
  binio::write_pod<std::uint64_t>(out, c.d_hidden);
  binio::write_pod<std::uint64_t>(out, c.d_role);
  binio::write_pod<std::uint64_t>(out, c.d_lemma_out);
  binio::write_pod<std::uint64_t>(out, c.layers);
  binio::write_pod<double>(out, c.alpha);
  binio::write_pod<double>(out, c.learning_rate);
  binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(c.variant));
  binio::write_pod<std::uint8_t>(out, c.use_pos);
  binio::write_pod<std::uint8_t>(out, c.use_predicate_flag);
  binio::write_pod<std::uint8_t>(out, c.dropout_affects_pretrained);
  binio::write_pod<std::uint64_t>(out, c.min_lemma_freq);
  binio::write_pod<std::uint64_t>(out, c.seed);
}

inline ModelConfig load_config(std::istream& in) {
  ModelConfig c;
  c.d_word_trainable = binio::read_pod<std::uint64_t>(in);
  c.d_word_pretrained = binio::read_pod<std::uint64_t>(in);
  c.d_pos = binio::read_pod<std::uint64_t>(in);
  c.d_lemma_in = binio::read_pod<std::uint64_t>(in);
  c.d_hidden = binio::read_pod<std::uint64_t>(in);
  c.d_role = binio::read_pod<std::uint64_t>(in);
  c.d_lemma_out = binio::read_pod<std::uint64_t>(in);
  c.layers = binio::read_pod<std::uint64_t>(in);
  c.alpha = binio::read_pod<double>(in);
  c.learning_rate = binio::read_pod<double>(in);
  c.variant = static_cast<ClassifierVariant>(binio::read_pod<std::uint8_t>(in));
  c.use_pos = binio::read_pod<std::uint8_t>(in);
  c.use_predicate_flag = binio::read_pod<std::uint8_t>(in);
  c.dropout_affects_pretrained = binio::read_pod<std::uint8_t>(in);
  c.min_lemma_freq = binio::read_pod<std::uint64_t>(in);
  c.seed = binio::read_pod<std::uint64_t>(in);
  return c;
}

template <class T>
void save_params(std::ostream& out, const SrlModel<T>& model) {
  const auto named = model.named_parameters();
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, p] : named) {
    binio::write_string(out, name);
    binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(p->shape.size()));
    for (auto d : p->shape) binio::write_pod<std::uint64_t>(out, d);
    binio::write_array(out, p->values);
  }
}

template <class T>
void load_params(std::istream& in, SrlModel<T>& model) {
  const auto count = binio::read_pod<std::uint32_t>(in);
  auto named = model.named_parameters();
  if (count != named.size())
    throw DataError("checkpoint: expected " + std::to_string(named.size()) +
                    " parameter tensors, found " + std::to_string(count));
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = binio::read_string(in);
    if (name != named[i].first)
      throw DataError("checkpoint: parameter order mismatch at '" + name + "', expected '" +
                      named[i].first + "'");
    const auto rank = binio::read_pod<std::uint8_t>(in);
    Shape shape(rank);
    for (auto& d : shape) d = binio::read_pod<std::uint64_t>(in);
    auto values = binio::read_array<T>(in);
    if (shape != named[i].second->shape || values.size() != named[i].second->size())
      throw DataError("checkpoint: shape mismatch for parameter '" + name + "'");
    named[i].second->values = std::move(values);
  }
}

}  // namespace detail

template <class T>
void save_checkpoint(const Checkpoint<T>& ckpt, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> sections;
  auto add_section = [&](const std::string& name, auto&& fill) {
    std::ostringstream buf(std::ios::binary);
    fill(buf);
    sections.emplace_back(name, buf.str());
  };
  add_section("config", [&](std::ostream& s) { detail::save_config(s, ckpt.model.config); });
  add_section("vocab", [&](std::ostream& s) { ckpt.model.vocab.save(s); });
  add_section("pretrained", [&](std::ostream& s) { ckpt.model.pretrained.save(s); });
  add_section("params", [&](std::ostream& s) { detail::save_params(s, ckpt.model); });
  add_section("meta", [&](std::ostream& s) {
    binio::write_pod<double>(s, ckpt.best_dev_f1);
    binio::write_pod<std::uint64_t>(s, ckpt.best_epoch);
  });
  if (ckpt.has_adam)
    add_section("adam", [&](std::ostream& s) {
      binio::write_pod<std::uint64_t>(s, ckpt.adam.step_count);
      binio::write_pod<double>(s, static_cast<double>(ckpt.adam.beta1));
      binio::write_pod<double>(s, static_cast<double>(ckpt.adam.beta2));
      binio::write_pod<double>(s, static_cast<double>(ckpt.adam.epsilon));
      binio::write_pod<double>(s, static_cast<double>(ckpt.adam.learning_rate));
      binio::write_pod<std::uint32_t>(s, static_cast<std::uint32_t>(ckpt.adam.first_moment.size()));
      for (const auto& m : ckpt.adam.first_moment) binio::write_array(s, m);
      for (const auto& v : ckpt.adam.second_moment) binio::write_array(s, v);
    });

  std::ostringstream whole(std::ios::binary);
  whole.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  binio::write_pod<std::uint32_t>(whole, kCheckpointVersion);
  binio::write_pod<std::uint8_t>(whole, static_cast<std::uint8_t>(sizeof(T)));
  binio::write_pod<std::uint32_t>(whole, static_cast<std::uint32_t>(sections.size()));
  std::uint64_t offset = 0;
  for (const auto& [name, bytes] : sections) {
    binio::write_string(whole, name);
    binio::write_pod<std::uint64_t>(whole, offset);
    binio::write_pod<std::uint64_t>(whole, bytes.size());
    offset += bytes.size();
  }
  for (const auto& [name, bytes] : sections) whole.write(bytes.data(), bytes.size());

  const std::string blob = whole.str();
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  binio::write_pod<std::uint64_t>(out, binio::fnv1a64(blob.data(), blob.size()));
}

// sizeof(T) of the stored parameters, without consuming the stream's meaning:
// callers use it to pick the instantiation before load_checkpoint.
inline std::uint8_t peek_checkpoint_width(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, kCheckpointMagic))
    throw DataError("checkpoint: bad magic, not a model file");
  const auto version = binio::read_pod<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw DataError("checkpoint: version " + std::to_string(version) + " not supported");
  const auto width = binio::read_pod<std::uint8_t>(in);
  in.seekg(0);
  return width;
}

template <class T>
Checkpoint<T> load_checkpoint(std::istream& in) {
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (blob.size() < sizeof(kCheckpointMagic) + sizeof(std::uint32_t) + 1 + sizeof(std::uint64_t))
    throw DataError("checkpoint: truncated file");
  const std::uint64_t stored_sum = *reinterpret_cast<const std::uint64_t*>(
      blob.data() + blob.size() - sizeof(std::uint64_t));
  const std::size_t body_len = blob.size() - sizeof(std::uint64_t);
  if (binio::fnv1a64(blob.data(), body_len) != stored_sum)
    throw DataError("checkpoint: checksum failure, file is corrupt or truncated");

  std::istringstream is(blob.substr(0, body_len), std::ios::binary);
  char magic[8];
  is.read(magic, 8);
  if (!std::equal(magic, magic + 8, kCheckpointMagic))
    throw DataError("checkpoint: bad magic, not a model file");
  const auto version = binio::read_pod<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw DataError("checkpoint: version " + std::to_string(version) + " not supported");
  const auto width = binio::read_pod<std::uint8_t>(is);
  if (width != sizeof(T))
    throw DataError("checkpoint: stores " + std::to_string(width * 8) +
                    "-bit values, expected " + std::to_string(sizeof(T) * 8) + "-bit");

  const auto n_sections = binio::read_pod<std::uint32_t>(is);
  bool has_adam = false;
  for (std::uint32_t i = 0; i < n_sections; ++i) {
    const std::string name = binio::read_string(is);
    binio::read_pod<std::uint64_t>(is);  // offset
    binio::read_pod<std::uint64_t>(is);  // length
    if (name == "adam") has_adam = true;
  }

  // Sections were written in a fixed order; read them back in sequence.
  const ModelConfig cfg = detail::load_config(is);
  Vocabulary vocab = Vocabulary::load(is);
  PretrainedTable<T> pretrained = PretrainedTable<T>::load(is);

  Checkpoint<T> ckpt;
  ckpt.model = SrlModel<T>::init(cfg, std::move(vocab), std::move(pretrained));
  detail::load_params(is, ckpt.model);
  ckpt.best_dev_f1 = binio::read_pod<double>(is);
  ckpt.best_epoch = binio::read_pod<std::uint64_t>(is);
  if (has_adam) {
    ckpt.has_adam = true;
    ckpt.adam.step_count = binio::read_pod<std::uint64_t>(is);
    ckpt.adam.beta1 = static_cast<T>(binio::read_pod<double>(is));
    ckpt.adam.beta2 = static_cast<T>(binio::read_pod<double>(is));
    ckpt.adam.epsilon = static_cast<T>(binio::read_pod<double>(is));
    ckpt.adam.learning_rate = static_cast<T>(binio::read_pod<double>(is));
    const auto n = binio::read_pod<std::uint32_t>(is);
    ckpt.adam.first_moment.resize(n);
    ckpt.adam.second_moment.resize(n);
    for (auto& m : ckpt.adam.first_moment) m = binio::read_array<T>(is);
    for (auto& v : ckpt.adam.second_moment) v = binio::read_array<T>(is);
  }
  return ckpt;
}

}  // namespace depsrl
