#pragma once

#include <cctype>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "depsrl/binio.hpp"
#include "depsrl/errors.hpp"
#include "depsrl/tensor.hpp"

namespace depsrl {

// Fixed word vectors. The matrix carries one extra row at the end holding the
// mean of all loaded vectors; unlisted words fall back to it. Never trained.
template <class T>
struct PretrainedTable {
  TensorPtr<T> table;  // [V+1 x d], requires_grad = false
  std::unordered_map<std::string, std::uint32_t> row_of;

  std::size_t dim() const { return table ? table->cols() : 0; }
  std::uint32_t unk_row() const { return static_cast<std::uint32_t>(table->rows() - 1); }

  bool empty() const { return !table || table->cols() == 0; }

  // Exact match, then ASCII-lowercased match, then the mean row.
  std::uint32_t row_for(const std::string& word) const {
    auto it = row_of.find(word);
    if (it != row_of.end()) return it->second;
    std::string lower = word;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    it = row_of.find(lower);
    if (it != row_of.end()) return it->second;
    return unk_row();
  }

  static PretrainedTable make(const std::vector<std::string>& words,
                              const std::vector<std::vector<T>>& vectors) {
    PretrainedTable t;
    const std::size_t d = vectors.empty() ? 0 : vectors[0].size();
    std::vector<T> flat;
    flat.reserve((vectors.size() + 1) * d);
    std::vector<T> mean(d, T(0));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (vectors[i].size() != d) throw DataError("pretrained vectors have inconsistent widths");
      flat.insert(flat.end(), vectors[i].begin(), vectors[i].end());
      for (std::size_t j = 0; j < d; ++j) mean[j] += vectors[i][j];
      t.row_of.emplace(words[i], static_cast<std::uint32_t>(i));
    }
    if (!vectors.empty())
      for (T& m : mean) m /= static_cast<T>(vectors.size());
    flat.insert(flat.end(), mean.begin(), mean.end());
    t.table = make_tensor<T>({vectors.size() + 1, d}, std::move(flat), /*requires_grad=*/false,
                             "pretrained");
    return t;
  }

  // An empty table of width 0: the pretrained block disappears from the word
  // representation.
  static PretrainedTable none() {
    PretrainedTable t;
    t.table = make_tensor<T>({1, 0}, {}, false, "pretrained");
    return t;
  }

  void save(std::ostream& out) const {
    binio::write_pod<std::uint64_t>(out, row_of.size());
    // id order for byte-stable output
    std::vector<const std::string*> by_row(row_of.size(), nullptr);
    for (const auto& [w, r] : row_of) by_row[r] = &w;
    for (const auto* w : by_row) binio::write_string(out, *w);
    binio::write_pod<std::uint64_t>(out, table->rows());
    binio::write_pod<std::uint64_t>(out, table->cols());
    binio::write_array(out, table->values);
  }

  static PretrainedTable load(std::istream& in) {
    PretrainedTable t;
    const auto nwords = binio::read_pod<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < nwords; ++i)
      t.row_of.emplace(binio::read_string(in), static_cast<std::uint32_t>(i));
    const auto rows = binio::read_pod<std::uint64_t>(in);
    const auto cols = binio::read_pod<std::uint64_t>(in);
    auto values = binio::read_array<T>(in);
    t.table = make_tensor<T>({rows, cols}, std::move(values), false, "pretrained");
    return t;
  }
};

namespace detail {
inline bool is_count_header(const std::string& line) {
  std::istringstream ss(line);
  std::string a, b, extra;
  if (!(ss >> a >> b) || (ss >> extra)) return false;
  auto numeric = [](const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  return numeric(a) && numeric(b);
}
}  // namespace detail

// Text format: one word per line followed by its vector, space-separated.
// A leading "count dim" header line is detected and skipped. expected_dim 0
// means "infer from the first data line".
template <class T>
PretrainedTable<T> load_pretrained(std::istream& in, std::size_t expected_dim) {
  std::vector<std::string> words;
  std::vector<std::vector<T>> vectors;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (first && detail::is_count_header(line)) {
      first = false;
      continue;
    }
    first = false;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<T> vec;
    double x;
    while (ss >> x) vec.push_back(static_cast<T>(x));
    if (expected_dim == 0) expected_dim = vec.size();
    if (vec.size() != expected_dim)
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected_dim) + " vector entries, got " +
                      std::to_string(vec.size()));
    words.push_back(std::move(word));
    vectors.push_back(std::move(vec));
  }
  if (words.empty()) throw DataError("pretrained vector file contains no vectors");
  return PretrainedTable<T>::make(words, vectors);
}

}  // namespace depsrl
