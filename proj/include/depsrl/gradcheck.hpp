#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "depsrl/adam.hpp"
#include "depsrl/tensor.hpp"

namespace depsrl {

template <class T>
struct GradCheckGroup {
  std::string name;
  std::size_t checked = 0;
  T max_rel_err = 0;
  std::size_t worst_index = 0;
};

template <class T>
struct GradCheckOptions {
  T step = T(1e-5);
  // Entries where both the analytic and the numeric gradient are below this
  // floor count as matches: central differences carry ~1e-10 absolute noise
  // at 64-bit, so relative comparisons below ~1e-5 measure noise, not the
  // backward rules. Real gradient magnitudes sit orders above the floor.
  T denominator_floor = T(1e-5);
  // 0 = check every element of every group.
  std::size_t max_elements_per_group = 0;
};

namespace detail {
template <class T>
T rel_err(T a, T b, T floor) {
  const T den = std::max(std::abs(a), std::abs(b));
  if (den < floor) return T(0);
  return std::abs(a - b) / den;
}
}  // namespace detail

// Central-difference check of the analytic gradients of a scalar loss.
// `loss_value` must rebuild the same deterministic forward pass on every call
// (it is invoked with perturbed parameter values); only forward evaluations
// feed the numeric side, so the comparison is independent of the backward
// rules under test.
template <class T>
std::vector<GradCheckGroup<T>> gradient_check(
    const std::vector<std::pair<std::string, TensorPtr<T>>>& groups,
    const std::function<TensorPtr<T>(Tape<T>&)>& build_loss,
    const GradCheckOptions<T>& opt = {}) {
  std::vector<TensorPtr<T>> params;
  for (const auto& [name, p] : groups) params.push_back(p);
  zero_grads(params);

  Tape<T> tape;
  auto loss = build_loss(tape);
  tape.backward(loss);

  std::vector<std::vector<T>> analytic;
  for (const auto& p : params) analytic.push_back(p->grad);

  auto loss_value = [&]() -> T {
    Tape<T> t(/*grad_enabled=*/false);
    return build_loss(t)->values[0];
  };

  std::vector<GradCheckGroup<T>> report;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    GradCheckGroup<T> row;
    row.name = groups[g].first;
    Tensor<T>& p = *params[g];
    std::size_t count = p.size();
    std::size_t stride = 1;
    if (opt.max_elements_per_group && count > opt.max_elements_per_group) {
      stride = count / opt.max_elements_per_group;
      if (stride == 0) stride = 1;
    }
    for (std::size_t i = 0; i < count; i += stride) {
      const T saved = p.values[i];
      p.values[i] = saved + opt.step;
      const T up = loss_value();
      p.values[i] = saved - opt.step;
      const T down = loss_value();
      p.values[i] = saved;
      const T numeric = (up - down) / (T(2) * opt.step);
      const T err = detail::rel_err(analytic[g][i], numeric, opt.denominator_floor);
      ++row.checked;
      if (err > row.max_rel_err) {
        row.max_rel_err = err;
        row.worst_index = i;
      }
    }
    report.push_back(std::move(row));
  }
  return report;
}

}  // namespace depsrl
