#include "xxzdm/reference.hpp"

namespace xxzdm::reference {

Tensor permute(const Tensor& t, const std::vector<int>& perm) {
  const int r = t.rank();
  if (static_cast<int>(perm.size()) != r) throw ShapeError("permutation rank mismatch");
  Shape new_shape(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k)
    new_shape[static_cast<std::size_t>(k)] = t.dim(perm[static_cast<std::size_t>(k)]);
  Tensor out(new_shape);
  if (t.size() == 0) return out;

  const auto old_strides = row_major_strides(t.shape());
  for (Index j = 0; j < out.size(); ++j) {
    Index rem = j, src = 0;
    for (int k = r - 1; k >= 0; --k) {
      const Index d = new_shape[static_cast<std::size_t>(k)];
      src += (rem % d) * old_strides[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
      rem /= d;
    }
    out.data()[j] = t.data()[src];
  }
  return out;
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
    if (a.dim(ia) != b.dim(ib)) throw ShapeError("contract: paired dimensions differ");
    a_used[static_cast<std::size_t>(ia)] = true;
    b_used[static_cast<std::size_t>(ib)] = true;
  }

  std::vector<int> a_free, b_free;
  for (int i = 0; i < ra; ++i)
    if (!a_used[static_cast<std::size_t>(i)]) a_free.push_back(i);
  for (int i = 0; i < rb; ++i)
    if (!b_used[static_cast<std::size_t>(i)]) b_free.push_back(i);

  Shape out_shape, sum_shape;
  for (int i : a_free) out_shape.push_back(a.dim(i));
  for (int i : b_free) out_shape.push_back(b.dim(i));
  Index n_sum = 1;
  for (const auto& [ia, ib] : index_pairs) {
    (void)ib;
    sum_shape.push_back(a.dim(ia));
    n_sum *= a.dim(ia);
  }

  Tensor out(out_shape);
  const auto sa = row_major_strides(a.shape());
  const auto sb = row_major_strides(b.shape());
  const int nf = static_cast<int>(out_shape.size());
  const int ns = static_cast<int>(sum_shape.size());

  for (Index j = 0; j < out.size(); ++j) {
    Index rem = j, base_a = 0, base_b = 0;
    for (int k = nf - 1; k >= 0; --k) {
      const Index v = rem % out_shape[static_cast<std::size_t>(k)];
      rem /= out_shape[static_cast<std::size_t>(k)];
      if (k < static_cast<int>(a_free.size()))
        base_a += v * sa[static_cast<std::size_t>(a_free[static_cast<std::size_t>(k)])];
      else
        base_b += v * sb[static_cast<std::size_t>(
                      b_free[static_cast<std::size_t>(k) - a_free.size()])];
    }

    cplx acc(0.0, 0.0);
    for (Index s = 0; s < n_sum; ++s) {
      Index srem = s, off_a = base_a, off_b = base_b;
      for (int k = ns - 1; k >= 0; --k) {
        const Index v = srem % sum_shape[static_cast<std::size_t>(k)];
        srem /= sum_shape[static_cast<std::size_t>(k)];
        off_a += v * sa[static_cast<std::size_t>(index_pairs[static_cast<std::size_t>(k)].first)];
        off_b += v * sb[static_cast<std::size_t>(index_pairs[static_cast<std::size_t>(k)].second)];
      }
      acc += a.data()[off_a] * b.data()[off_b];
    }
    out.data()[j] = acc;
  }
  return out;
}

}  // namespace xxzdm::reference
