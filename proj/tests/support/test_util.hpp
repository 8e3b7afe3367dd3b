#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "depsrl/tensor.hpp"

namespace testutil {

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline depsrl::TensorPtr<double> random_tensor(std::mt19937_64& rng, depsrl::Shape shape,
                                               bool requires_grad = false, double lo = -1.0,
                                               double hi = 1.0) {
  auto n = depsrl::shape_numel(shape);
  return depsrl::make_tensor<double>(std::move(shape), random_values(rng, n, lo, hi),
                                     requires_grad);
}

// Central difference d(loss)/d(x[i]) where `loss` re-runs the full forward
// pass. Independent of any backward rule.
inline double fd_central(const std::function<double()>& loss, depsrl::Tensor<double>& x,
                         std::size_t i, double h = 1e-6) {
  const double saved = x.values[i];
  x.values[i] = saved + h;
  const double up = loss();
  x.values[i] = saved - h;
  const double down = loss();
  x.values[i] = saved;
  return (up - down) / (2.0 * h);
}

inline double rel_err(double a, double b, double floor = 1e-9) {
  const double den = std::max(std::abs(a), std::abs(b));
  if (den < floor) return 0.0;
  return std::abs(a - b) / den;
}

}  // namespace testutil
