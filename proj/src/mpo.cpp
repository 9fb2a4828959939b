#include "xxzdm/mpo.hpp"

#include <cmath>

namespace xxzdm {

void ModelParams::validate() const {
  if (!(lambda > 0.0)) throw ShapeError("lambda must be positive");
  if (phi < 0.0 || phi > M_PI)
    throw ShapeError("phi must lie in [0, pi]; H(-phi) is unitarily equivalent");
  if (omega_prime < 0.0) throw ShapeError("omega_prime must be non-negative");
  if (length < 2) throw ShapeError("length must be >= 2");
}

ScaledParams derive_scaled_params(double t, double u, double lambda, double omega) {
  if (!(t > 0.0) || !(u > 0.0)) throw ShapeError("t and u must be positive");
  if (!(lambda > 0.0)) throw ShapeError("lambda must be positive");
  if (omega < 0.0) throw ShapeError("omega must be non-negative");
  ScaledParams out;
  out.j = -4.0 * t * t / (lambda * u);
  out.j_z = 2.0 * lambda - 1.0;
  out.omega_prime = omega * u / (4.0 * t * t);
  out.strong_coupling = u >= 10.0 * std::max(t, omega);
  return out;
}

Index MpoOperator::bond_dim(int l) const {
  if (l == 0) return tensors.front().dim(0);
  return tensors[static_cast<std::size_t>(l - 1)].dim(3);
}

namespace spin_half {

Tensor sx() {
  Tensor t({2, 2});
  t.at({0, 1}) = cplx(0.5, 0.0);
  t.at({1, 0}) = cplx(0.5, 0.0);
  return t;
}

Tensor sy() {
  Tensor t({2, 2});
  t.at({0, 1}) = cplx(0.0, -0.5);
  t.at({1, 0}) = cplx(0.0, 0.5);
  return t;
}

Tensor sz() {
  Tensor t({2, 2});
  t.at({0, 0}) = cplx(0.5, 0.0);
  t.at({1, 1}) = cplx(-0.5, 0.0);
  return t;
}

Tensor id() {
  Tensor t({2, 2});
  t.at({0, 0}) = cplx(1.0, 0.0);
  t.at({1, 1}) = cplx(1.0, 0.0);
  return t;
}

}  // namespace spin_half

namespace {

void place(Tensor& w, Index row, Index col, const Tensor& op, cplx coeff = cplx(1.0, 0.0)) {
  const Index d = op.dim(0);
  for (Index s = 0; s < d; ++s)
    for (Index sp = 0; sp < d; ++sp) w.at({row, s, sp, col}) = coeff * op.at({s, sp});
}

}  // namespace

MpoOperator build_xxz_dm_mpo(const ModelParams& p) {
  p.validate();
  const double c = std::cos(p.phi);
  const double s = std::sin(p.phi);
  const double inv_lambda = 1.0 / p.lambda;
  const Tensor sx = spin_half::sx();
  const Tensor sy = spin_half::sy();
  const Tensor sz = spin_half::sz();
  const Tensor id = spin_half::id();

  // operators paired with the neighbor's Sx, Sy, Sz
  auto a1 = [&] {
    Tensor t({2, 2});
    for (Index i = 0; i < 4; ++i)
      t.data()[i] = -inv_lambda * (c * sx.data()[i] - s * sy.data()[i]);
    return t;
  }();
  auto a2 = [&] {
    Tensor t({2, 2});
    for (Index i = 0; i < 4; ++i)
      t.data()[i] = -inv_lambda * (c * sy.data()[i] + s * sx.data()[i]);
    return t;
  }();
  const cplx jz_coeff(-(2.0 * p.lambda - 1.0) * inv_lambda, 0.0);
  const cplx field(-p.omega_prime, 0.0);

  MpoOperator op;
  // first site: the bottom row of the bulk operator-valued matrix
  Tensor w1({1, 2, 2, 5});
  place(w1, 0, 0, sx, field);
  place(w1, 0, 1, a1);
  place(w1, 0, 2, a2);
  place(w1, 0, 3, sz, jz_coeff);
  place(w1, 0, 4, id);
  op.tensors.push_back(std::move(w1));

  for (int l = 2; l < p.length; ++l) {
    Tensor w({5, 2, 2, 5});
    place(w, 0, 0, id);
    place(w, 1, 0, sx);
    place(w, 2, 0, sy);
    place(w, 3, 0, sz);
    place(w, 4, 0, sx, field);
    place(w, 4, 1, a1);
    place(w, 4, 2, a2);
    place(w, 4, 3, sz, jz_coeff);
    place(w, 4, 4, id);
    op.tensors.push_back(std::move(w));
  }

  // last site: the first column
  Tensor wl({5, 2, 2, 1});
  place(wl, 0, 0, id);
  place(wl, 1, 0, sx);
  place(wl, 2, 0, sy);
  place(wl, 3, 0, sz);
  place(wl, 4, 0, sx, field);
  op.tensors.push_back(std::move(wl));
  return op;
}

MpoOperator build_nearest_neighbor_mpo(int length, const std::vector<BondTerm>& bonds,
                                       const Tensor& site_op) {
  if (length < 2) throw ShapeError("length must be >= 2");
  const Index d = site_op.dim(0);
  const Index nb = static_cast<Index>(bonds.size());
  const Index D = nb + 2;
  Tensor id({d, d});
  for (Index i = 0; i < d; ++i) id.at({i, i}) = cplx(1.0, 0.0);

  MpoOperator op;
  Tensor w1({1, d, d, D});
  place(w1, 0, 0, site_op);
  for (Index t = 0; t < nb; ++t) place(w1, 0, 1 + t, bonds[static_cast<std::size_t>(t)].left_op);
  place(w1, 0, D - 1, id);
  op.tensors.push_back(std::move(w1));

  for (int l = 2; l < length; ++l) {
    Tensor w({D, d, d, D});
    place(w, 0, 0, id);
    for (Index t = 0; t < nb; ++t)
      place(w, 1 + t, 0, bonds[static_cast<std::size_t>(t)].right_op);
    place(w, D - 1, 0, site_op);
    for (Index t = 0; t < nb; ++t)
      place(w, D - 1, 1 + t, bonds[static_cast<std::size_t>(t)].left_op);
    place(w, D - 1, D - 1, id);
    op.tensors.push_back(std::move(w));
  }

  Tensor wl({D, d, d, 1});
  place(wl, 0, 0, id);
  for (Index t = 0; t < nb; ++t)
    place(wl, 1 + t, 0, bonds[static_cast<std::size_t>(t)].right_op);
  place(wl, D - 1, 0, site_op);
  op.tensors.push_back(std::move(wl));
  return op;
}

Tensor mpo_to_dense(const MpoOperator& op) {
  const int L = op.length();
  if (L > 12) throw ShapeError("mpo_to_dense is limited to L <= 12");
  const Index d = op.phys_dim();

  // running tensor (sigma_1..l, sigma'_1..l, b_l) kept as (D_out, D_in, b)
  Tensor acc = Tensor(op.site(1)).reshaped({d, d, op.site(1).dim(3)});
  Index dd = d;
  for (int l = 2; l <= L; ++l) {
    Tensor nxt = contract(acc, op.site(l), {{2, 0}});  // (So, Si, s, s', b)
    nxt = nxt.permuted({0, 2, 1, 3, 4});               // (So, s, Si, s', b)
    dd *= d;
    acc = std::move(nxt).reshaped({dd, dd, op.site(l).dim(3)});
  }
  return std::move(acc).reshaped({dd, dd});
}

}  // namespace xxzdm
