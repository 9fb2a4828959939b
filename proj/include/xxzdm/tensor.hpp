#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include "xxzdm/errors.hpp"

namespace xxzdm {

using cplx = std::complex<double>;
using Index = std::int64_t;
using Shape = std::vector<Index>;

/// Dense complex tensor in row-major layout: the last index is the fastest.
/// Values are immutable by convention once a tensor has been handed off;
/// all operations below return new tensors.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<cplx> data);

  int rank() const { return static_cast<int>(shape_.size()); }
  Index dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  const Shape& shape() const { return shape_; }
  Index size() const { return static_cast<Index>(data_.size()); }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::vector<cplx>& storage() { return data_; }
  const std::vector<cplx>& storage() const { return data_; }

  cplx& at(std::initializer_list<Index> idx);
  const cplx& at(std::initializer_list<Index> idx) const;

  /// Same data, new shape; sizes must agree. Data is preserved exactly.
  Tensor reshaped(Shape new_shape) const&;
  Tensor reshaped(Shape new_shape) &&;

  /// result(i_{perm[0]}, i_{perm[1]}, ...) = (*this)(i_0, i_1, ...), i.e.
  /// perm[k] names which old index becomes the k-th new index.
  Tensor permuted(const std::vector<int>& perm) const;

  Tensor conjugated() const;
  Tensor scaled(cplx factor) const;

  double frobenius_norm() const;
  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<cplx> data_;
};

/// Thin SVD m = u * diag(s) * vdag with s sorted descending.
/// discarded_weight is the sum of squares of any truncated singular values.
struct SvdTriple {
  Tensor u;
  std::vector<double> s;
  Tensor vdag;
  double discarded_weight = 0.0;
};

/// Full thin SVD of a rank-2 tensor. Throws ShapeError on non-matrix input
/// and NumericError on non-finite entries.
SvdTriple svd_full(const Tensor& m);

/// SVD truncated to rank min(chi_max, #{s_i > cutoff}, full rank). The
/// rank-r reconstruction is the Frobenius-optimal rank-r approximation;
/// its squared error equals discarded_weight.
SvdTriple svd_truncate(const Tensor& m, Index chi_max, double cutoff);

/// Pairwise tensor contraction. index_pairs lists (index of a, index of b)
/// to sum over; paired dimensions must match. Free indices of the result
/// are ordered a-first then b, each in original order.
Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<std::pair<int, int>>& index_pairs);

/// Row-major strides of a shape.
std::vector<Index> row_major_strides(const Shape& shape);

}  // namespace xxzdm
