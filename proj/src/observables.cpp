#include "xxzdm/observables.hpp"

#include <cmath>
#include <limits>

#include "xxzdm/mpo.hpp"

namespace xxzdm {

namespace {

constexpr double kCutoff = 1e-14;
constexpr Index kNoCap = std::numeric_limits<Index>::max() / 4;

// <op> at the center site; norm2 is the squared Frobenius norm of the center.
cplx center_expectation(const Tensor& m, const Tensor& op, double norm2) {
  Tensor g = contract(m.conjugated(), m, {{0, 0}, {2, 2}});  // (s, s')
  cplx acc(0, 0);
  for (Index s = 0; s < g.dim(0); ++s)
    for (Index sp = 0; sp < g.dim(1); ++sp) acc += op.at({s, sp}) * g.at({s, sp});
  return acc / norm2;
}

// start the transfer tensor at site j with op applied
Tensor g_start(const Tensor& m, const Tensor& op) {
  Tensor t = contract(op, m, {{1, 1}});                    // (s, a, b')
  return contract(m.conjugated(), t, {{0, 1}, {1, 0}});    // (b, b')
}

// propagate the transfer tensor through one site with the identity
Tensor g_step(const Tensor& g, const Tensor& m) {
  Tensor t = contract(g, m, {{1, 0}});                     // (a, s, b')
  return contract(m.conjugated(), t, {{0, 0}, {1, 1}});    // (b, b')
}

// close the transfer tensor at site l with op applied and trace
cplx g_close(const Tensor& g, const Tensor& m, const Tensor& op) {
  Tensor t = contract(g, m, {{1, 0}});                     // (a, s', b)
  Tensor t2 = contract(op, t, {{1, 1}});                   // (s, a, b)
  Tensor v = contract(m.conjugated(), t2, {{0, 1}, {1, 0}, {2, 2}});
  return v.at({});
}

Tensor matmul2(const Tensor& a, const Tensor& b) { return contract(a, b, {{1, 0}}); }

}  // namespace

Tensor axis_operator(Axis axis) {
  switch (axis) {
    case Axis::X:
      return spin_half::sx();
    case Axis::Y:
      return spin_half::sy();
    default:
      return spin_half::sz();
  }
}

cplx expect_site(const MpsState& psi, int j, const Tensor& op) {
  if (j < 1 || j > psi.length()) throw ShapeError("expect_site: site out of range");
  MpsState work = shift_center(psi, j);
  const Tensor& m = work.site(j);
  const double n2 = std::pow(m.frobenius_norm(), 2);
  return center_expectation(m, op, n2);
}

cplx correlation(const MpsState& psi, int j, int l, const Tensor& op_a,
                 const Tensor& op_b) {
  if (j >= l)
    throw std::invalid_argument("correlation requires j < l; swap and conjugate");
  if (j < 1 || l > psi.length()) throw ShapeError("correlation: sites out of range");
  MpsState work = psi;
  const int center = (work.form == CanonicalForm::None || work.center < j ||
                      work.center > l)
                         ? j
                         : work.center;
  detail::canonicalize(work, center, kNoCap, kCutoff);
  const double n2 = std::pow(work.site(center).frobenius_norm(), 2);

  Tensor g = g_start(work.site(j), op_a);
  for (int m = j + 1; m < l; ++m) g = g_step(g, work.site(m));
  return g_close(g, work.site(l), op_b) / n2;
}

CorrelationRecord correlation_profile(const MpsState& psi, Axis axis) {
  const int L = psi.length();
  const Tensor op = axis_operator(axis);
  const Tensor op2 = matmul2(op, op);

  CorrelationRecord rec;
  rec.axis = axis;
  rec.length = L;
  rec.pairs.assign(static_cast<std::size_t>(L) * static_cast<std::size_t>(L), cplx(0, 0));
  auto put = [&](int j, int l, cplx v) {
    rec.pairs[static_cast<std::size_t>((j - 1) * L + (l - 1))] = v;
  };

  MpsState work = shift_center(psi, 1);
  for (int j = 1; j <= L; ++j) {
    if (j > 1) detail::move_center_right(work, j - 1, kNoCap, kCutoff);
    const double n2 = std::pow(work.site(j).frobenius_norm(), 2);
    put(j, j, center_expectation(work.site(j), op2, n2));
    if (j == L) break;
    Tensor g = g_start(work.site(j), op);
    for (int l = j + 1; l <= L; ++l) {
      const cplx v = g_close(g, work.site(l), op) / n2;
      put(j, l, v);
      put(l, j, std::conj(v));
      if (l < L) g = g_step(g, work.site(l));
    }
  }
  return rec;
}

std::vector<double> default_k_grid(int length) {
  std::vector<double> k(static_cast<std::size_t>(length));
  for (int m = 0; m < length; ++m)
    k[static_cast<std::size_t>(m)] = 2.0 * M_PI * m / length;
  return k;
}

std::vector<double> structure_factor(const CorrelationRecord& corr,
                                     const std::vector<double>& k_grid) {
  const int L = corr.length;
  if (corr.pairs.size() != static_cast<std::size_t>(L) * static_cast<std::size_t>(L))
    throw ShapeError("correlation record is missing pairs");
  std::vector<double> q(k_grid.size(), 0.0);

#pragma omp parallel for schedule(static)
  for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
    const double k = k_grid[ki];
    std::vector<cplx> w(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j)
      w[static_cast<std::size_t>(j)] = std::polar(1.0, k * (j + 1));
    cplx acc(0, 0);
    for (int j = 1; j <= L; ++j) {
      cplx row(0, 0);
      for (int l = 1; l <= L; ++l)
        row += std::conj(w[static_cast<std::size_t>(l - 1)]) * corr.value(j, l);
      acc += w[static_cast<std::size_t>(j - 1)] * row;
    }
    acc /= static_cast<double>(L);
    if (std::abs(acc.imag()) > 1e-9 * std::max(1.0, std::abs(acc.real())))
      throw NumericError("structure factor has a non-negligible imaginary part");
    q[ki] = acc.real();
  }
  return q;
}

std::pair<double, double> structure_factor_peak(const CorrelationRecord& corr) {
  const int L = corr.length;
  std::vector<double> half;
  for (int m = 0; m <= L / 2; ++m) half.push_back(2.0 * M_PI * m / L);
  const std::vector<double> q = structure_factor(corr, half);
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return {half[best], q[best]};
}

OrderParameters order_parameters(const MpsState& psi) {
  const int L = psi.length();
  const Tensor ops[3] = {spin_half::sx(), spin_half::sy(), spin_half::sz()};

  std::array<cplx, 3> msum{}, nsum{};
  std::array<cplx, 3> csum{};

  MpsState work = shift_center(psi, 1);
  for (int j = 1; j <= L; ++j) {
    if (j > 1) detail::move_center_right(work, j - 1, kNoCap, kCutoff);
    const double n2 = std::pow(work.site(j).frobenius_norm(), 2);
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    for (int a = 0; a < 3; ++a) {
      const cplx v = center_expectation(work.site(j), ops[a], n2);
      msum[static_cast<std::size_t>(a)] += v;
      nsum[static_cast<std::size_t>(a)] += sign * v;
    }
    if (j < L) {
      // six mixed nearest-neighbor correlations for the vector chirality
      auto pair_corr = [&](int a, int b) {
        Tensor g = g_start(work.site(j), ops[a]);
        return g_close(g, work.site(j + 1), ops[b]) / n2;
      };
      const cplx yz = pair_corr(1, 2), zy = pair_corr(2, 1);
      const cplx zx = pair_corr(2, 0), xz = pair_corr(0, 2);
      const cplx xy = pair_corr(0, 1), yx = pair_corr(1, 0);
      csum[0] += yz - zy;
      csum[1] += zx - xz;
      csum[2] += xy - yx;
    }
  }

  OrderParameters out;
  for (int a = 0; a < 3; ++a) {
    out.m[static_cast<std::size_t>(a)] = std::abs(msum[static_cast<std::size_t>(a)]) / L;
    out.n[static_cast<std::size_t>(a)] = std::abs(nsum[static_cast<std::size_t>(a)]) / L;
    out.c[static_cast<std::size_t>(a)] = std::abs(csum[static_cast<std::size_t>(a)]) / L;
  }
  return out;
}

std::pair<double, double> energy_gaps(double e0, double e1, double e2) {
  constexpr double slack = 1e-9;
  if (e1 < e0 - slack || e2 < e1 - slack)
    throw SolverQualityError("energy ordering violated beyond tolerance");
  return {std::max(0.0, e1 - e0), std::max(0.0, e2 - e0)};
}

}  // namespace xxzdm
