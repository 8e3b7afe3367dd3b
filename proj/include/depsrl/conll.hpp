#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "depsrl/errors.hpp"

namespace depsrl {

// A "_" cell in the argument columns means this token fills no role for that
// predicate; the same string is the canonical label of the NULL role.
inline constexpr const char* kNullRole = "_";

// One CoNLL-2009 token row. The columns the model consumes are parsed into
// typed fields; the remaining ones are kept verbatim so files round-trip.
struct Token {
  int id = 0;                             // 1-based position
  std::string form;
  std::string plemma;
  std::string ppos;
  int head = -1;                          // 0 = root, 1-based otherwise, -1 = absent
  bool fill_pred = false;
  std::optional<std::string> pred_sense;  // present iff fill_pred

  // LEMMA, POS, FEAT, PFEAT, PHEAD, DEPREL, PDEPREL — preserved, never parsed.
  std::string lemma_raw, pos_raw, feat_raw, pfeat_raw, phead_raw, deprel_raw, pdeprel_raw;

  // One cell per predicate in the sentence; "_" in the file becomes nullopt.
  std::vector<std::optional<std::string>> apreds;

  // Lemma part of the PRED column ("make.01" -> "make"); reporting only.
  std::string pred_lemma() const {
    if (!pred_sense) return {};
    auto dotpos = pred_sense->rfind('.');
    return dotpos == std::string::npos ? *pred_sense : pred_sense->substr(0, dotpos);
  }
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<std::size_t> predicate_positions;  // 0-based token indices, increasing

  std::size_t size() const { return tokens.size(); }
};

// One training/inference unit: a sentence viewed from one predicate.
struct PredicateInstance {
  const Sentence* sentence = nullptr;
  std::size_t predicate_index = 0;       // 0-based token index
  std::vector<std::string> gold_roles;   // per token; kNullRole for non-arguments
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cells;
}

inline int parse_int(const std::string& s, std::size_t line_no, const char* what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("line ") + std::to_string(line_no) + ": bad " + what + " value '" +
                    s + "'");
  }
}

inline void finish_sentence(std::vector<std::vector<std::string>>& rows,
                            std::vector<std::size_t>& row_lines, std::vector<Sentence>& out) {
  if (rows.empty()) return;
  const std::size_t width = rows[0].size();
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != width)
      throw DataError("line " + std::to_string(row_lines[r]) + ": ragged row, expected " +
                      std::to_string(width) + " columns, got " + std::to_string(rows[r].size()));
  const std::size_t n_apred = width - 14;

  Sentence sent;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& c = rows[r];
    const std::size_t ln = row_lines[r];
    Token tok;
    tok.id = parse_int(c[0], ln, "ID");
    if (tok.id != static_cast<int>(r) + 1)
      throw DataError("line " + std::to_string(ln) + ": ID " + c[0] + " out of sequence");
    tok.form = c[1];
    tok.lemma_raw = c[2];
    tok.plemma = c[3];
    tok.pos_raw = c[4];
    tok.ppos = c[5];
    tok.feat_raw = c[6];
    tok.pfeat_raw = c[7];
    tok.head = c[8] == "_" ? -1 : parse_int(c[8], ln, "HEAD");
    tok.phead_raw = c[9];
    tok.deprel_raw = c[10];
    tok.pdeprel_raw = c[11];
    tok.fill_pred = c[12] == "Y";
    if (!tok.fill_pred && c[12] != "_")
      throw DataError("line " + std::to_string(ln) + ": FILLPRED must be 'Y' or '_', got '" +
                      c[12] + "'");
    if (c[13] != "_") tok.pred_sense = c[13];
    if (tok.fill_pred != tok.pred_sense.has_value())
      throw DataError("line " + std::to_string(ln) + ": FILLPRED/PRED inconsistency ('" + c[12] +
                      "' vs '" + c[13] + "')");
    tok.apreds.reserve(n_apred);
    for (std::size_t a = 0; a < n_apred; ++a)
      tok.apreds.emplace_back(c[14 + a] == "_" ? std::optional<std::string>{}
                                               : std::optional<std::string>{c[14 + a]});
    if (tok.fill_pred) sent.predicate_positions.push_back(r);
    sent.tokens.push_back(std::move(tok));
  }

  if (sent.predicate_positions.size() != n_apred)
    throw DataError("line " + std::to_string(row_lines[0]) + ": sentence has " +
                    std::to_string(sent.predicate_positions.size()) + " predicates but " +
                    std::to_string(n_apred) + " APRED columns");
  const int n = static_cast<int>(sent.size());
  for (std::size_t r = 0; r < sent.tokens.size(); ++r) {
    const int h = sent.tokens[r].head;
    if (h != -1 && (h < 0 || h > n))
      throw DataError("line " + std::to_string(row_lines[r]) + ": HEAD " + std::to_string(h) +
                      " out of range for sentence of length " + std::to_string(n));
  }

  out.push_back(std::move(sent));
  rows.clear();
  row_lines.clear();
}

inline std::string rstrip(const std::string& s) {
  std::size_t end = s.size();
  while (end > 0 && (s[end - 1] == '\r' || s[end - 1] == ' ')) --end;
  return s.substr(0, end);
}

}  // namespace detail

inline std::vector<Sentence> read_conll2009(std::istream& in) {
  std::vector<Sentence> out;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string normalized = detail::rstrip(line);
    if (normalized.empty()) {
      detail::finish_sentence(rows, row_lines, out);
      continue;
    }
    auto cells = detail::split_tabs(normalized);
    if (cells.size() < 14)
      throw DataError("line " + std::to_string(line_no) + ": expected at least 14 columns, got " +
                      std::to_string(cells.size()));
    rows.push_back(std::move(cells));
    row_lines.push_back(line_no);
  }
  detail::finish_sentence(rows, row_lines, out);
  return out;
}

inline void write_conll2009(const std::vector<Sentence>& sentences, std::ostream& out) {
  for (const auto& sent : sentences) {
    const std::size_t n_pred = sent.predicate_positions.size();
    for (const auto& tok : sent.tokens) {
      if (tok.apreds.size() != n_pred)
        throw DataError("write: token '" + tok.form + "' has " +
                        std::to_string(tok.apreds.size()) + " APRED cells, sentence has " +
                        std::to_string(n_pred) + " predicates");
      out << tok.id << '\t' << tok.form << '\t' << tok.lemma_raw << '\t' << tok.plemma << '\t'
          << tok.pos_raw << '\t' << tok.ppos << '\t' << tok.feat_raw << '\t' << tok.pfeat_raw
          << '\t' << (tok.head == -1 ? std::string("_") : std::to_string(tok.head)) << '\t'
          << tok.phead_raw << '\t' << tok.deprel_raw << '\t' << tok.pdeprel_raw << '\t'
          << (tok.fill_pred ? "Y" : "_") << '\t' << (tok.pred_sense ? *tok.pred_sense : "_");
      for (const auto& cell : tok.apreds) out << '\t' << (cell ? *cell : "_");
      out << '\n';
    }
    out << '\n';
  }
}

// One instance per predicate, in order; gold roles come from that predicate's
// APRED column with kNullRole filling the gaps.
inline std::vector<PredicateInstance> extract_instances(const Sentence& sentence) {
  std::vector<PredicateInstance> out;
  for (std::size_t j = 0; j < sentence.predicate_positions.size(); ++j) {
    PredicateInstance inst;
    inst.sentence = &sentence;
    inst.predicate_index = sentence.predicate_positions[j];
    inst.gold_roles.reserve(sentence.size());
    for (const auto& tok : sentence.tokens)
      inst.gold_roles.push_back(tok.apreds[j] ? *tok.apreds[j] : kNullRole);
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<PredicateInstance> extract_instances(const std::vector<Sentence>& sentences) {
  std::vector<PredicateInstance> out;
  for (const auto& s : sentences) {
    auto insts = extract_instances(s);
    out.insert(out.end(), insts.begin(), insts.end());
  }
  return out;
}

}  // namespace depsrl
