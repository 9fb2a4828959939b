#include "xxzdm/tensor.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace xxzdm {

namespace {

using EigenMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using RowMajorMap =
    Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap = Eigen::Map<
    const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Index shape_size(const Shape& shape) {
  Index n = 1;
  for (Index d : shape) {
    if (d < 0) throw ShapeError("negative dimension in tensor shape");
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ")";
  return os.str();
}

// Linear size above which permutation loops go parallel.
constexpr Index kParallelThreshold = 1 << 14;

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  data_.assign(static_cast<std::size_t>(shape_size(shape_)), cplx(0.0, 0.0));
}

Tensor::Tensor(Shape shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != static_cast<Index>(data_.size()))
    throw ShapeError("tensor data size does not match shape " + shape_str(shape_));
}

std::vector<Index> row_major_strides(const Shape& shape) {
  std::vector<Index> strides(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i)
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i) + 1] * shape[static_cast<std::size_t>(i) + 1];
  return strides;
}

cplx& Tensor::at(std::initializer_list<Index> idx) {
  return const_cast<cplx&>(std::as_const(*this).at(idx));
}

const cplx& Tensor::at(std::initializer_list<Index> idx) const {
  if (static_cast<int>(idx.size()) != rank())
    throw ShapeError("index rank mismatch in Tensor::at");
  Index lin = 0;
  auto strides = row_major_strides(shape_);
  std::size_t k = 0;
  for (Index i : idx) {
    if (i < 0 || i >= shape_[k]) throw ShapeError("index out of range in Tensor::at");
    lin += i * strides[k];
    ++k;
  }
  return data_[static_cast<std::size_t>(lin)];
}

Tensor Tensor::reshaped(Shape new_shape) const& {
  if (shape_size(new_shape) != size())
    throw ShapeError("reshape size mismatch: " + shape_str(shape_) + " -> " +
                     shape_str(new_shape));
  return Tensor(std::move(new_shape), data_);
}

Tensor Tensor::reshaped(Shape new_shape) && {
  if (shape_size(new_shape) != size())
    throw ShapeError("reshape size mismatch: " + shape_str(shape_) + " -> " +
                     shape_str(new_shape));
  return Tensor(std::move(new_shape), std::move(data_));
}

Tensor Tensor::permuted(const std::vector<int>& perm) const {
  const int r = rank();
  if (static_cast<int>(perm.size()) != r)
    throw ShapeError("permutation rank mismatch");
  std::vector<bool> seen(static_cast<std::size_t>(r), false);
  for (int p : perm) {
    if (p < 0 || p >= r || seen[static_cast<std::size_t>(p)])
      throw ShapeError("invalid permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }

  Shape new_shape(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k)
    new_shape[static_cast<std::size_t>(k)] = shape_[static_cast<std::size_t>(perm[k])];

  Tensor out(new_shape);
  if (size() == 0) return out;
  if (r == 0) {
    out.data_[0] = data_[0];
    return out;
  }

  const auto old_strides = row_major_strides(shape_);
  // stride of the k-th *new* index inside the old linear layout
  std::vector<Index> src_stride(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k)
    src_stride[static_cast<std::size_t>(k)] = old_strides[static_cast<std::size_t>(perm[k])];

  const Index n = size();
  const cplx* in = data_.data();
  cplx* dst = out.data();
  const Index* ns = new_shape.data();
  const Index* ss = src_stride.data();

#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index j = 0; j < n; ++j) {
    Index rem = j;
    Index src = 0;
    for (int k = r - 1; k >= 0; --k) {
      const Index d = ns[k];
      src += (rem % d) * ss[k];
      rem /= d;
    }
    dst[j] = in[src];
  }
  return out;
}

Tensor Tensor::conjugated() const {
  Tensor out(shape_, data_);
  for (auto& v : out.data_) v = std::conj(v);
  return out;
}

Tensor Tensor::scaled(cplx factor) const {
  Tensor out(shape_, data_);
  for (auto& v : out.data_) v *= factor;
  return out;
}

double Tensor::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool Tensor::all_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

namespace {

EigenMat to_eigen(const Tensor& m) {
  ConstRowMajorMap map(m.data(), m.dim(0), m.dim(1));
  return EigenMat(map);
}

Tensor from_eigen(const EigenMat& m) {
  Tensor out({m.rows(), m.cols()});
  RowMajorMap map(out.data(), m.rows(), m.cols());
  map = m;
  return out;
}

SvdTriple svd_impl(const Tensor& m, Index chi_max, double cutoff) {
  if (m.rank() != 2) throw ShapeError("svd requires a rank-2 tensor");
  if (!m.all_finite()) throw NumericError("svd input has non-finite entries");

  const EigenMat mat = to_eigen(m);
  const Index full = std::min(m.dim(0), m.dim(1));

  EigenMat u, v;
  Eigen::VectorXd sv;
  if (full <= 32) {
    Eigen::JacobiSVD<EigenMat> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU();
    v = svd.matrixV();
    sv = svd.singularValues();
  } else {
    Eigen::BDCSVD<EigenMat> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU();
    v = svd.matrixV();
    sv = svd.singularValues();
  }
  if (!sv.allFinite()) throw NumericError("svd failed to converge");

  Index keep = 0;
  while (keep < full && sv[keep] > cutoff) ++keep;
  keep = std::min(keep, chi_max);

  SvdTriple out;
  out.s.assign(sv.data(), sv.data() + keep);
  double dropped = 0.0;
  for (Index i = keep; i < full; ++i) dropped += sv[i] * sv[i];
  out.discarded_weight = dropped;
  out.u = from_eigen(u.leftCols(keep));
  out.vdag = from_eigen(EigenMat(v.leftCols(keep).adjoint()));
  return out;
}

}  // namespace

SvdTriple svd_full(const Tensor& m) {
  if (m.rank() != 2) throw ShapeError("svd_full requires a rank-2 tensor");
  return svd_impl(m, std::min(m.dim(0), m.dim(1)),
                  -1.0);  // keep everything, including exact zeros
}

SvdTriple svd_truncate(const Tensor& m, Index chi_max, double cutoff) {
  if (chi_max < 1) throw ShapeError("svd_truncate requires chi_max >= 1");
  if (cutoff < 0.0) throw ShapeError("svd_truncate requires cutoff >= 0");
  return svd_impl(m, chi_max, cutoff);
}

Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<std::pair<int, int>>& index_pairs) {
  const int ra = a.rank();
  const int rb = b.rank();
  std::vector<bool> a_used(static_cast<std::size_t>(ra), false);
  std::vector<bool> b_used(static_cast<std::size_t>(rb), false);
  for (const auto& [ia, ib] : index_pairs) {
    if (ia < 0 || ia >= ra || ib < 0 || ib >= rb)
      throw ShapeError("contract: paired index out of range");
    if (a_used[static_cast<std::size_t>(ia)] || b_used[static_cast<std::size_t>(ib)])
      throw ShapeError("contract: index paired twice");
    if (a.dim(ia) != b.dim(ib))
      throw ShapeError("contract: paired dimensions differ");
    a_used[static_cast<std::size_t>(ia)] = true;
    b_used[static_cast<std::size_t>(ib)] = true;
  }

  std::vector<int> a_free, b_free;
  for (int i = 0; i < ra; ++i)
    if (!a_used[static_cast<std::size_t>(i)]) a_free.push_back(i);
  for (int i = 0; i < rb; ++i)
    if (!b_used[static_cast<std::size_t>(i)]) b_free.push_back(i);

  Index m_dim = 1, k_dim = 1, n_dim = 1;
  Shape out_shape;
  for (int i : a_free) {
    m_dim *= a.dim(i);
    out_shape.push_back(a.dim(i));
  }
  for (const auto& [ia, ib] : index_pairs) {
    (void)ib;
    k_dim *= a.dim(ia);
  }
  for (int i : b_free) {
    n_dim *= b.dim(i);
    out_shape.push_back(b.dim(i));
  }

  // a -> (free..., contracted...), b -> (contracted..., free...)
  std::vector<int> perm_a = a_free;
  for (const auto& [ia, ib] : index_pairs) {
    (void)ib;
    perm_a.push_back(ia);
  }
  std::vector<int> perm_b;
  for (const auto& [ia, ib] : index_pairs) {
    (void)ia;
    perm_b.push_back(ib);
  }
  perm_b.insert(perm_b.end(), b_free.begin(), b_free.end());

  auto is_identity = [](const std::vector<int>& p) {
    for (int i = 0; i < static_cast<int>(p.size()); ++i)
      if (p[static_cast<std::size_t>(i)] != i) return false;
    return true;
  };

  const Tensor a2 = is_identity(perm_a) ? a : a.permuted(perm_a);
  const Tensor b2 = is_identity(perm_b) ? b : b.permuted(perm_b);

  Tensor out(out_shape);
  ConstRowMajorMap am(a2.data(), m_dim, k_dim);
  ConstRowMajorMap bm(b2.data(), k_dim, n_dim);
  RowMajorMap cm(out.data(), m_dim, n_dim);
  cm.noalias() = am * bm;
  return out;
}

}  // namespace xxzdm
