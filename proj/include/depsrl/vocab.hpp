#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "depsrl/binio.hpp"
#include "depsrl/conll.hpp"
#include "depsrl/errors.hpp"

namespace depsrl {

// Dense, insertion-ordered symbol inventory with frequency counts.
struct SymbolTable {
  std::vector<std::string> id_to_symbol;
  std::vector<std::uint64_t> frequency;
  std::unordered_map<std::string, std::uint32_t> symbol_to_id;

  std::uint32_t add(const std::string& s, std::uint64_t count = 1) {
    auto it = symbol_to_id.find(s);
    if (it != symbol_to_id.end()) {
      frequency[it->second] += count;
      return it->second;
    }
    const auto id = static_cast<std::uint32_t>(id_to_symbol.size());
    id_to_symbol.push_back(s);
    frequency.push_back(count);
    symbol_to_id.emplace(s, id);
    return id;
  }

  std::int64_t find(const std::string& s) const {
    auto it = symbol_to_id.find(s);
    return it == symbol_to_id.end() ? -1 : static_cast<std::int64_t>(it->second);
  }

  std::size_t size() const { return id_to_symbol.size(); }

  bool operator==(const SymbolTable& o) const {
    return id_to_symbol == o.id_to_symbol && frequency == o.frequency;
  }

  void save(std::ostream& out) const {
    binio::write_pod<std::uint64_t>(out, id_to_symbol.size());
    for (std::size_t i = 0; i < id_to_symbol.size(); ++i) {
      binio::write_string(out, id_to_symbol[i]);
      binio::write_pod<std::uint64_t>(out, frequency[i]);
    }
  }

  static SymbolTable load(std::istream& in) {
    SymbolTable t;
    const auto n = binio::read_pod<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string s = binio::read_string(in);
      std::uint64_t f = binio::read_pod<std::uint64_t>(in);
      t.id_to_symbol.push_back(s);
      t.frequency.push_back(f);
      t.symbol_to_id.emplace(std::move(s), static_cast<std::uint32_t>(i));
    }
    return t;
  }
};

inline constexpr const char* kPadSymbol = "<PAD>";
inline constexpr const char* kUnkSymbol = "<UNK>";

// Symbol inventories built from the training split. Word and POS inventories
// cover all tokens; the lemma inventory covers predicate PLEMMAs only, with
// lemmas under min_lemma_freq folded into UNK. Role id 0 is the NULL role.
struct Vocabulary {
  static constexpr std::uint32_t kPadId = 0;
  static constexpr std::uint32_t kUnkId = 1;
  static constexpr std::uint32_t kNullRoleId = 0;

  SymbolTable words;
  SymbolTable pos;
  SymbolTable lemmas;
  SymbolTable roles;

  std::uint32_t word_id(const std::string& w) const {
    auto id = words.find(w);
    return id < 0 ? kUnkId : static_cast<std::uint32_t>(id);
  }
  std::uint32_t pos_id(const std::string& p) const {
    auto id = pos.find(p);
    return id < 0 ? kUnkId : static_cast<std::uint32_t>(id);
  }
  std::uint32_t lemma_id(const std::string& l) const {
    auto id = lemmas.find(l);
    return id < 0 ? kUnkId : static_cast<std::uint32_t>(id);
  }
  std::int64_t role_id(const std::string& r) const { return roles.find(r); }

  std::uint64_t word_frequency(std::uint32_t id) const { return words.frequency[id]; }

  bool operator==(const Vocabulary& o) const {
    return words == o.words && pos == o.pos && lemmas == o.lemmas && roles == o.roles;
  }

  void save(std::ostream& out) const {
    words.save(out);
    pos.save(out);
    lemmas.save(out);
    roles.save(out);
  }

  static Vocabulary load(std::istream& in) {
    Vocabulary v;
    v.words = SymbolTable::load(in);
    v.pos = SymbolTable::load(in);
    v.lemmas = SymbolTable::load(in);
    v.roles = SymbolTable::load(in);
    return v;
  }
};

inline Vocabulary build_vocab(const std::vector<Sentence>& training, std::size_t min_lemma_freq) {
  if (training.empty()) throw DataError("build_vocab: empty corpus");
  Vocabulary v;
  for (SymbolTable* t : {&v.words, &v.pos, &v.lemmas}) {
    t->add(kPadSymbol, 0);
    t->add(kUnkSymbol, 0);
  }
  v.roles.add(kNullRole, 0);

  SymbolTable raw_lemmas;  // pre-filter counts
  for (const auto& sent : training) {
    for (const auto& tok : sent.tokens) {
      v.words.add(tok.form);
      v.pos.add(tok.ppos);
      if (tok.fill_pred) raw_lemmas.add(tok.plemma);
      for (const auto& cell : tok.apreds)
        if (cell) v.roles.add(*cell);
    }
  }
  for (std::size_t i = 0; i < raw_lemmas.size(); ++i)
    if (raw_lemmas.frequency[i] >= min_lemma_freq)
      v.lemmas.add(raw_lemmas.id_to_symbol[i], raw_lemmas.frequency[i]);
  return v;
}

// Per-token replacement decisions, each drawn independently with probability
// alpha / (fr(w) + alpha). Exposed separately so one draw can replace the
// word identity for the trainable and the pretrained lookup together.
inline std::vector<char> word_dropout_mask(const std::vector<std::uint32_t>& ids,
                                           const Vocabulary& vocab, double alpha,
                                           std::mt19937_64& rng) {
  std::vector<char> mask(ids.size(), 0);
  if (alpha <= 0.0) return mask;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double fr = static_cast<double>(vocab.word_frequency(ids[i]));
    if (unit(rng) < alpha / (fr + alpha)) mask[i] = 1;
  }
  return mask;
}

// Replace each word id with UNK with probability alpha / (fr(w) + alpha).
// Training-time only; callers keep evaluation paths dropout-free.
inline std::vector<std::uint32_t> word_dropout(const std::vector<std::uint32_t>& ids,
                                               const Vocabulary& vocab, double alpha,
                                               std::mt19937_64& rng) {
  std::vector<std::uint32_t> out = ids;
  const auto mask = word_dropout_mask(ids, vocab, alpha, rng);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask[i]) out[i] = Vocabulary::kUnkId;
  return out;
}

}  // namespace depsrl
