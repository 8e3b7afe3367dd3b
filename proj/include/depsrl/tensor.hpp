#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "depsrl/errors.hpp"

namespace depsrl {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t e : s) n *= e;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << ']';
  return os.str();
}

// Dense tensor with an optional gradient buffer. Leaves are created directly
// (parameters, constants); op outputs are created by the ops below and marked
// non-leaf by the tape that recorded them.
template <class T>
struct Tensor {
  Shape shape;
  std::vector<T> values;
  std::vector<T> grad;  // same length as values iff requires_grad
  bool requires_grad = false;
  bool leaf = true;
  std::string name;

  // Set by Tape::record for op outputs.
  const void* tape = nullptr;
  std::size_t node = 0;

  std::size_t size() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }

  std::size_t rows() const {
    if (rank() != 2) throw ShapeError("rows(): tensor is not 2-d: " + shape_str(shape));
    return shape[0];
  }
  std::size_t cols() const {
    if (rank() != 2) throw ShapeError("cols(): tensor is not 2-d: " + shape_str(shape));
    return shape[1];
  }

  T& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  T at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), T(0));
  }
  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
};

template <class T>
using TensorPtr = std::shared_ptr<Tensor<T>>;

template <class T>
TensorPtr<T> make_tensor(Shape shape, std::vector<T> values, bool requires_grad = false,
                         std::string name = {}) {
  if (shape_numel(shape) != values.size())
    throw ShapeError("tensor: " + std::to_string(values.size()) + " values for shape " +
                     shape_str(shape));
  auto t = std::make_shared<Tensor<T>>();
  t->shape = std::move(shape);
  t->values = std::move(values);
  t->requires_grad = requires_grad;
  t->name = std::move(name);
  if (requires_grad) t->ensure_grad();
  return t;
}

template <class T>
TensorPtr<T> zeros(Shape shape, bool requires_grad = false, std::string name = {}) {
  return make_tensor<T>(std::move(shape), std::vector<T>(shape_numel(shape), T(0)),
                        requires_grad, std::move(name));
}

template <class T>
TensorPtr<T> scalar_tensor(T v) {
  return make_tensor<T>({1}, {v});
}

template <class T>
bool all_finite(const Tensor<T>& t) {
  for (T v : t.values)
    if (!std::isfinite(static_cast<double>(v))) return false;
  return true;
}

// Records one node per op output. Backward replays the recorded rules in
// reverse order exactly once; gradients accumulate additively into leaves,
// so callers reset leaf grads between optimizer steps.
template <class T>
class Tape {
 public:
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  bool grad_enabled() const { return grad_enabled_; }

  TensorPtr<T> record(TensorPtr<T> out, std::function<void()> backward_rule) {
    out->leaf = false;
    out->tape = this;
    out->node = nodes_.size();
    if (!grad_enabled_) out->requires_grad = false;
    if (out->requires_grad) out->ensure_grad();
    nodes_.push_back(Node{out, grad_enabled_ ? std::move(backward_rule) : nullptr});
    return out;
  }

  void backward(const TensorPtr<T>& loss) {
    if (!grad_enabled_) throw ShapeError("backward: tape recorded without gradients");
    if (loss->size() != 1) throw ShapeError("backward: loss is not scalar: " + shape_str(loss->shape));
    if (loss->tape != this) throw ShapeError("backward: loss was not produced on this tape");
    // Intermediate grads are scratch; reset them so repeated backward calls
    // accumulate only into leaves.
    for (std::size_t i = 0; i <= loss->node; ++i) nodes_[i].out->zero_grad();
    loss->ensure_grad();
    loss->grad[0] = T(1);
    for (std::size_t i = loss->node + 1; i-- > 0;) {
      const Node& n = nodes_[i];
      if (n.fn && n.out->requires_grad) n.fn();
    }
  }

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    TensorPtr<T> out;
    std::function<void()> fn;
  };
  std::vector<Node> nodes_;
  bool grad_enabled_;
};

namespace detail {

template <class T>
bool any_requires_grad(const std::vector<TensorPtr<T>>& ts) {
  for (const auto& t : ts)
    if (t->requires_grad) return true;
  return false;
}

template <class T>
TensorPtr<T> op_output(Shape shape, bool requires_grad) {
  auto t = std::make_shared<Tensor<T>>();
  t->shape = std::move(shape);
  t->values.resize(shape_numel(t->shape));
  t->requires_grad = requires_grad;
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ops. Each op computes the forward result and records a backward rule that
// accumulates into the inputs' grads (skipping inputs without requires_grad).
// ---------------------------------------------------------------------------

// a [m x k] times b ([k x n] or [k]). A 1-d right operand is treated as a
// column vector and yields a 1-d result of length m.
template <class T>
TensorPtr<T> matmul(Tape<T>& tape, const TensorPtr<T>& a, const TensorPtr<T>& b) {
  if (a->rank() != 2) throw ShapeError("matmul: left operand must be 2-d, got " + shape_str(a->shape));
  const std::size_t m = a->shape[0], k = a->shape[1];
  const bool vec = b->rank() == 1;
  if (!vec && b->rank() != 2)
    throw ShapeError("matmul: right operand must be 1-d or 2-d, got " + shape_str(b->shape));
  const std::size_t bk = b->shape[0];
  const std::size_t n = vec ? 1 : b->shape[1];
  if (k != bk)
    throw ShapeError("matmul: inner dimensions disagree: " + shape_str(a->shape) + " vs " +
                     shape_str(b->shape));

  auto out = detail::op_output<T>(vec ? Shape{m} : Shape{m, n},
                                  a->requires_grad || b->requires_grad);
  const T* av = a->values.data();
  const T* bv = b->values.data();
  T* ov = out->values.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T acc = 0;
      for (std::size_t t = 0; t < k; ++t) acc += av[i * k + t] * bv[t * n + j];
      ov[i * n + j] = acc;
    }

  return tape.record(out, [a, b, out, m, n, k] {
    const T* og = out->grad.data();
    if (a->requires_grad) {
      a->ensure_grad();
      T* ag = a->grad.data();
      const T* bv = b->values.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < k; ++t) {
          T acc = 0;
          for (std::size_t j = 0; j < n; ++j) acc += og[i * n + j] * bv[t * n + j];
          ag[i * k + t] += acc;
        }
    }
    if (b->requires_grad) {
      b->ensure_grad();
      T* bg = b->grad.data();
      const T* av = a->values.data();
      for (std::size_t t = 0; t < k; ++t)
        for (std::size_t j = 0; j < n; ++j) {
          T acc = 0;
          for (std::size_t i = 0; i < m; ++i) acc += av[i * k + t] * og[i * n + j];
          bg[t * n + j] += acc;
        }
    }
  });
}

// Concatenation along `axis`. All inputs must agree on every other axis.
template <class T>
TensorPtr<T> concat(Tape<T>& tape, const std::vector<TensorPtr<T>>& xs, std::size_t axis) {
  if (xs.empty()) throw ShapeError("concat: empty input list");
  const std::size_t rank = xs[0]->rank();
  if (axis >= rank) throw ShapeError("concat: axis out of range");
  Shape out_shape = xs[0]->shape;
  std::size_t total = xs[0]->shape[axis];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i]->rank() != rank)
      throw ShapeError("concat: rank mismatch: " + shape_str(xs[0]->shape) + " vs " +
                       shape_str(xs[i]->shape));
    for (std::size_t d = 0; d < rank; ++d)
      if (d != axis && xs[i]->shape[d] != out_shape[d])
        throw ShapeError("concat: incompatible shapes: " + shape_str(xs[0]->shape) + " vs " +
                         shape_str(xs[i]->shape));
    total += xs[i]->shape[axis];
  }
  out_shape[axis] = total;

  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= out_shape[d];
  for (std::size_t d = axis + 1; d < rank; ++d) inner *= out_shape[d];

  auto out = detail::op_output<T>(out_shape, detail::any_requires_grad(xs));
  const std::size_t out_block = total * inner;
  std::size_t off = 0;
  for (const auto& x : xs) {
    const std::size_t blk = x->shape[axis] * inner;
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(x->values.data() + o * blk, blk, out->values.data() + o * out_block + off);
    off += blk;
  }

  return tape.record(out, [xs, out, outer, out_block] {
    std::size_t off = 0;
    for (const auto& x : xs) {
      const std::size_t blk = x->size() / outer;
      if (x->requires_grad) {
        x->ensure_grad();
        for (std::size_t o = 0; o < outer; ++o) {
          const T* src = out->grad.data() + o * out_block + off;
          T* dst = x->grad.data() + o * blk;
          for (std::size_t i = 0; i < blk; ++i) dst[i] += src[i];
        }
      }
      off += blk;
    }
  });
}

enum class Pointwise { sigmoid, tanh, relu };

// Elementwise nonlinearity. relu'(0) is defined as 0.
template <class T>
TensorPtr<T> pointwise(Tape<T>& tape, Pointwise f, const TensorPtr<T>& x) {
  auto out = detail::op_output<T>(x->shape, x->requires_grad);
  const std::size_t n = x->size();
  switch (f) {
    case Pointwise::sigmoid:
      for (std::size_t i = 0; i < n; ++i) out->values[i] = T(1) / (T(1) + std::exp(-x->values[i]));
      break;
    case Pointwise::tanh:
      for (std::size_t i = 0; i < n; ++i) out->values[i] = std::tanh(x->values[i]);
      break;
    case Pointwise::relu:
      for (std::size_t i = 0; i < n; ++i) out->values[i] = x->values[i] > T(0) ? x->values[i] : T(0);
      break;
  }
  return tape.record(out, [f, x, out, n] {
    if (!x->requires_grad) return;
    x->ensure_grad();
    for (std::size_t i = 0; i < n; ++i) {
      const T y = out->values[i];
      T d;
      switch (f) {
        case Pointwise::sigmoid: d = y * (T(1) - y); break;
        case Pointwise::tanh: d = T(1) - y * y; break;
        default: d = x->values[i] > T(0) ? T(1) : T(0); break;
      }
      x->grad[i] += out->grad[i] * d;
    }
  });
}

template <class T>
TensorPtr<T> sigmoid(Tape<T>& tape, const TensorPtr<T>& x) {
  return pointwise(tape, Pointwise::sigmoid, x);
}
template <class T>
TensorPtr<T> tanh(Tape<T>& tape, const TensorPtr<T>& x) {
  return pointwise(tape, Pointwise::tanh, x);
}
template <class T>
TensorPtr<T> relu(Tape<T>& tape, const TensorPtr<T>& x) {
  return pointwise(tape, Pointwise::relu, x);
}

// Elementwise sum of any number of same-shaped tensors.
template <class T>
TensorPtr<T> add_n(Tape<T>& tape, const std::vector<TensorPtr<T>>& xs) {
  if (xs.empty()) throw ShapeError("add_n: empty input list");
  for (const auto& x : xs)
    if (x->shape != xs[0]->shape)
      throw ShapeError("add_n: shape mismatch: " + shape_str(xs[0]->shape) + " vs " +
                       shape_str(x->shape));
  auto out = detail::op_output<T>(xs[0]->shape, detail::any_requires_grad(xs));
  const std::size_t n = out->size();
  std::fill(out->values.begin(), out->values.end(), T(0));
  for (const auto& x : xs)
    for (std::size_t i = 0; i < n; ++i) out->values[i] += x->values[i];
  return tape.record(out, [xs, out, n] {
    for (const auto& x : xs) {
      if (!x->requires_grad) continue;
      x->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) x->grad[i] += out->grad[i];
    }
  });
}

template <class T>
TensorPtr<T> add(Tape<T>& tape, const TensorPtr<T>& a, const TensorPtr<T>& b) {
  return add_n(tape, std::vector<TensorPtr<T>>{a, b});
}

// Hadamard product.
template <class T>
TensorPtr<T> mul(Tape<T>& tape, const TensorPtr<T>& a, const TensorPtr<T>& b) {
  if (a->shape != b->shape)
    throw ShapeError("mul: shape mismatch: " + shape_str(a->shape) + " vs " + shape_str(b->shape));
  auto out = detail::op_output<T>(a->shape, a->requires_grad || b->requires_grad);
  const std::size_t n = out->size();
  for (std::size_t i = 0; i < n; ++i) out->values[i] = a->values[i] * b->values[i];
  return tape.record(out, [a, b, out, n] {
    if (a->requires_grad) {
      a->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) a->grad[i] += out->grad[i] * b->values[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) b->grad[i] += out->grad[i] * a->values[i];
    }
  });
}

template <class T>
TensorPtr<T> dot(Tape<T>& tape, const TensorPtr<T>& a, const TensorPtr<T>& b) {
  if (a->rank() != 1 || b->rank() != 1 || a->size() != b->size())
    throw ShapeError("dot: need equal-length vectors, got " + shape_str(a->shape) + " and " +
                     shape_str(b->shape));
  T acc = 0;
  for (std::size_t i = 0; i < a->size(); ++i) acc += a->values[i] * b->values[i];
  auto out = detail::op_output<T>({1}, a->requires_grad || b->requires_grad);
  out->values[0] = acc;
  return tape.record(out, [a, b, out] {
    const T g = out->grad[0];
    if (a->requires_grad) {
      a->ensure_grad();
      for (std::size_t i = 0; i < a->size(); ++i) a->grad[i] += g * b->values[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (std::size_t i = 0; i < b->size(); ++i) b->grad[i] += g * a->values[i];
    }
  });
}

template <class T>
TensorPtr<T> sum(Tape<T>& tape, const TensorPtr<T>& x) {
  T acc = 0;
  for (T v : x->values) acc += v;
  auto out = detail::op_output<T>({1}, x->requires_grad);
  out->values[0] = acc;
  return tape.record(out, [x, out] {
    if (!x->requires_grad) return;
    x->ensure_grad();
    const T g = out->grad[0];
    for (std::size_t i = 0; i < x->size(); ++i) x->grad[i] += g;
  });
}

template <class T>
TensorPtr<T> transpose(Tape<T>& tape, const TensorPtr<T>& x) {
  const std::size_t m = x->rows(), n = x->cols();
  auto out = detail::op_output<T>({n, m}, x->requires_grad);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out->values[j * m + i] = x->values[i * n + j];
  return tape.record(out, [x, out, m, n] {
    if (!x->requires_grad) return;
    x->ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) x->grad[i * n + j] += out->grad[j * m + i];
  });
}

// Stack equal-length vectors as the columns of a [len x count] matrix.
template <class T>
TensorPtr<T> stack_cols(Tape<T>& tape, const std::vector<TensorPtr<T>>& cols) {
  if (cols.empty()) throw ShapeError("stack_cols: empty input list");
  const std::size_t len = cols[0]->size();
  for (const auto& c : cols)
    if (c->rank() != 1 || c->size() != len)
      throw ShapeError("stack_cols: need equal-length vectors, got " + shape_str(c->shape));
  const std::size_t n = cols.size();
  auto out = detail::op_output<T>({len, n}, detail::any_requires_grad(cols));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < len; ++r) out->values[r * n + j] = cols[j]->values[r];
  return tape.record(out, [cols, out, len, n] {
    for (std::size_t j = 0; j < n; ++j) {
      if (!cols[j]->requires_grad) continue;
      cols[j]->ensure_grad();
      for (std::size_t r = 0; r < len; ++r) cols[j]->grad[r] += out->grad[r * n + j];
    }
  });
}

// Row copy out of an embedding table. Gradients accumulate sparsely into the
// chosen row; frozen tables (requires_grad == false) receive none.
template <class T>
TensorPtr<T> lookup(Tape<T>& tape, const TensorPtr<T>& table, std::size_t index) {
  const std::size_t v = table->rows(), d = table->cols();
  if (index >= v)
    throw ShapeError("lookup: index " + std::to_string(index) + " out of range for " +
                     shape_str(table->shape));
  auto out = detail::op_output<T>({d}, table->requires_grad);
  std::copy_n(table->values.data() + index * d, d, out->values.data());
  return tape.record(out, [table, out, index, d] {
    if (!table->requires_grad) return;
    table->ensure_grad();
    T* row = table->grad.data() + index * d;
    for (std::size_t i = 0; i < d; ++i) row[i] += out->grad[i];
  });
}

template <class T>
std::vector<T> softmax_values(const std::vector<T>& logits) {
  const T m = *std::max_element(logits.begin(), logits.end());
  std::vector<T> p(logits.size());
  T z = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += (p[i] = std::exp(logits[i] - m));
  for (T& v : p) v /= z;
  return p;
}

// Negative log softmax probability of the gold class, max-subtracted for
// stability. Backward is softmax(logits) - onehot(gold).
template <class T>
TensorPtr<T> softmax_cross_entropy(Tape<T>& tape, const TensorPtr<T>& logits,
                                   std::size_t gold_index) {
  if (logits->rank() != 1) throw ShapeError("softmax_cross_entropy: logits must be 1-d");
  const std::size_t c = logits->size();
  if (gold_index >= c)
    throw ShapeError("softmax_cross_entropy: gold index " + std::to_string(gold_index) +
                     " out of range for " + std::to_string(c) + " classes");
  const T m = *std::max_element(logits->values.begin(), logits->values.end());
  T z = 0;
  for (T v : logits->values) z += std::exp(v - m);
  auto out = detail::op_output<T>({1}, logits->requires_grad);
  out->values[0] = std::log(z) + m - logits->values[gold_index];
  return tape.record(out, [logits, out, gold_index] {
    if (!logits->requires_grad) return;
    logits->ensure_grad();
    const T g = out->grad[0];
    const std::vector<T> p = softmax_values(logits->values);
    for (std::size_t i = 0; i < p.size(); ++i)
      logits->grad[i] += g * (p[i] - (i == gold_index ? T(1) : T(0)));
  });
}

}  // namespace depsrl
