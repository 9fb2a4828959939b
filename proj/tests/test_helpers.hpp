#pragma once

#include <cmath>
#include <random>

#include "xxzdm/tensor.hpp"

namespace xxzdm::testutil {

inline Tensor random_tensor(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Tensor t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = cplx(g(rng), g(rng));
  return t;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (Index i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double frobenius_diff(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += std::norm(a.data()[i] - b.data()[i]);
  return std::sqrt(s);
}

inline Tensor reconstruct(const SvdTriple& t) {
  const Index m = t.u.dim(0), r = t.u.dim(1), n = t.vdag.dim(1);
  Tensor sv({r, n});
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < n; ++j)
      sv.at({i, j}) = t.s[static_cast<std::size_t>(i)] * t.vdag.at({i, j});
  (void)m;
  return contract(t.u, sv, {{1, 0}});
}

}  // namespace xxzdm::testutil
