#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "depsrl/errors.hpp"
#include "depsrl/tensor.hpp"

namespace depsrl {

// Adam with bias correction. Moment buffers are kept in the order of the
// parameter list handed to init(); callers clear grads after each step.
template <class T>
struct AdamState {
  std::size_t step_count = 0;
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T epsilon = T(1e-8);
  T learning_rate = T(0.01);
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;

  void init(const std::vector<TensorPtr<T>>& params) {
    step_count = 0;
    first_moment.clear();
    second_moment.clear();
    for (const auto& p : params) {
      first_moment.emplace_back(p->size(), T(0));
      second_moment.emplace_back(p->size(), T(0));
    }
  }

  bool matches(const std::vector<TensorPtr<T>>& params) const {
    if (first_moment.size() != params.size() || second_moment.size() != params.size())
      return false;
    for (std::size_t i = 0; i < params.size(); ++i)
      if (first_moment[i].size() != params[i]->size() ||
          second_moment[i].size() != params[i]->size())
        return false;
    return true;
  }
};

template <class T>
void adam_step(const std::vector<TensorPtr<T>>& params, AdamState<T>& state) {
  if (!state.matches(params))
    throw ShapeError("adam_step: state moments do not match parameter shapes");
  ++state.step_count;
  const T bc1 = T(1) - std::pow(state.beta1, static_cast<T>(state.step_count));
  const T bc2 = T(1) - std::pow(state.beta2, static_cast<T>(state.step_count));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor<T>& t = *params[p];
    t.ensure_grad();
    std::vector<T>& m = state.first_moment[p];
    std::vector<T>& v = state.second_moment[p];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const T g = t.grad[i];
      m[i] = state.beta1 * m[i] + (T(1) - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (T(1) - state.beta2) * g * g;
      const T mhat = m[i] / bc1;
      const T vhat = v[i] / bc2;
      t.values[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

// Global-norm gradient clipping; a no-op when max_norm <= 0. Off by default
// in training, available as a rescue knob.
template <class T>
T clip_grad_norm(const std::vector<TensorPtr<T>>& params, T max_norm) {
  T sq = 0;
  for (const auto& p : params)
    for (T g : p->grad) sq += g * g;
  const T norm = std::sqrt(sq);
  if (max_norm > T(0) && norm > max_norm) {
    const T scale = max_norm / norm;
    for (const auto& p : params)
      for (T& g : p->grad) g *= scale;
  }
  return norm;
}

template <class T>
void zero_grads(const std::vector<TensorPtr<T>>& params) {
  for (const auto& p : params) p->zero_grad();
}

}  // namespace depsrl
