#pragma once

#include "xxzdm/tensor.hpp"

namespace xxzdm::reference {

/// Serial nested-loop contraction over the paired indices, computed with
/// plain stride arithmetic on the original tensors. Kept as the independent
/// oracle for the optimized permute+GEMM path and as the benchmark baseline.
Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<std::pair<int, int>>& index_pairs);

/// Serial element-by-element permutation, same semantics as Tensor::permuted.
Tensor permute(const Tensor& t, const std::vector<int>& perm);

}  // namespace xxzdm::reference
