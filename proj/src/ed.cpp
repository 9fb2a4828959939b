#include "xxzdm/ed.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "lanczos.hpp"

namespace xxzdm {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// two-site bond term (4x4) in scaled units
RowMat bond_term(double cos_phi, double sin_phi, double lambda) {
  auto kron2 = [](const Tensor& a, const Tensor& b) {
    RowMat m(4, 4);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        for (Index k = 0; k < 2; ++k)
          for (Index l = 0; l < 2; ++l)
            m(i * 2 + k, j * 2 + l) = a.at({i, j}) * b.at({k, l});
    return m;
  };
  const Tensor sx = spin_half::sx(), sy = spin_half::sy(), sz = spin_half::sz();
  RowMat h2 = -(1.0 / lambda) *
              (cos_phi * (kron2(sx, sx) + kron2(sy, sy)) +
               (2.0 * lambda - 1.0) * kron2(sz, sz) +
               sin_phi * (kron2(sx, sy) - kron2(sy, sx)));
  return h2;
}

}  // namespace

Tensor dense_from_couplings(int length, double cos_phi, double sin_phi, double lambda,
                            double omega_prime) {
  if (length < 2 || length > 14) throw ShapeError("dense assembly needs 2 <= L <= 14");
  const Index dim = Index(1) << length;
  Tensor h({dim, dim});
  Eigen::Map<RowMat> hm(h.data(), dim, dim);

  const RowMat h2 = bond_term(cos_phi, sin_phi, lambda);
  for (int j = 1; j < length; ++j) {
    const Index left = Index(1) << (j - 1);
    const Index right = Index(1) << (length - j - 1);
#pragma omp parallel for schedule(static) if (dim >= (Index(1) << 10))
    for (Index lb = 0; lb < left; ++lb)
      for (Index a = 0; a < 4; ++a)
        for (Index b = 0; b < 4; ++b) {
          if (h2(a, b) == cplx(0, 0)) continue;
          const Index row_base = (lb * 4 + a) * right;
          const Index col_base = (lb * 4 + b) * right;
          for (Index rb = 0; rb < right; ++rb)
            hm(row_base + rb, col_base + rb) += h2(a, b);
        }
  }

  const Tensor sx = spin_half::sx();
  for (int j = 1; j <= length; ++j) {
    const Index left = Index(1) << (j - 1);
    const Index right = Index(1) << (length - j);
    for (Index lb = 0; lb < left; ++lb)
      for (Index a = 0; a < 2; ++a)
        for (Index b = 0; b < 2; ++b) {
          if (sx.at({a, b}) == cplx(0, 0)) continue;
          const cplx v = -omega_prime * sx.at({a, b});
          const Index row_base = (lb * 2 + a) * right;
          const Index col_base = (lb * 2 + b) * right;
          for (Index rb = 0; rb < right; ++rb)
            hm(row_base + rb, col_base + rb) += v;
        }
  }
  return h;
}

DenseHamiltonian dense_hamiltonian(const ModelParams& p) {
  p.validate();
  if (p.length > 14) throw ShapeError("exact diagonalization is capped at L = 14");
  DenseHamiltonian h;
  h.params = p;
  h.dim = Index(1) << p.length;
  if (p.length <= 12) {
    h.matrix = dense_from_couplings(p.length, std::cos(p.phi), std::sin(p.phi), p.lambda,
                                    p.omega_prime);
    h.materialized = true;
  }
  return h;
}

void apply_hamiltonian(const ModelParams& p, const cplx* x, cplx* y) {
  const int L = p.length;
  const Index dim = Index(1) << L;
  const RowMat h2 = bond_term(std::cos(p.phi), std::sin(p.phi), p.lambda);
  const double field = -0.5 * p.omega_prime;  // -omega' * (Sx off-diagonal 1/2)

#pragma omp parallel for schedule(static)
  for (Index n = 0; n < dim; ++n) {
    cplx acc(0, 0);
    for (int j = 1; j < L; ++j) {
      const int sh = L - j - 1;  // shift of site j+1's bit
      const Index pair = ((n >> sh) & 3);
      const Index base = n & ~(Index(3) << sh);
      for (Index src = 0; src < 4; ++src) {
        const cplx v = h2(pair, src);
        if (v != cplx(0, 0)) acc += v * x[base | (src << sh)];
      }
    }
    for (int j = 1; j <= L; ++j) acc += field * x[n ^ (Index(1) << (L - j))];
    y[n] = acc;
  }
}

std::vector<std::pair<double, std::vector<cplx>>> lowest_spectrum(
    const DenseHamiltonian& h, int n) {
  if (n < 1 || static_cast<Index>(n) > h.dim)
    throw ShapeError("requested eigenpair count out of range");
  std::vector<std::pair<double, std::vector<cplx>>> out;

  if (h.materialized) {
    Eigen::Map<const RowMat> hm(h.matrix.data(), h.dim, h.dim);
    Eigen::MatrixXcd m = hm;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolve failed");
    for (int i = 0; i < n; ++i) {
      std::vector<cplx> v(static_cast<std::size_t>(h.dim));
      Eigen::Map<Eigen::VectorXcd>(v.data(), h.dim) = es.eigenvectors().col(i);
      out.emplace_back(es.eigenvalues()(i), std::move(v));
    }
    return out;
  }

  // matrix-free: deflated Lanczos against the already-found eigenvectors
  const ModelParams& p = h.params;
  for (int state = 0; state < n; ++state) {
    auto project = [&](cplx* data) {
      Eigen::Map<Eigen::VectorXcd> xv(data, h.dim);
      for (const auto& [e, v] : out) {
        (void)e;
        Eigen::Map<const Eigen::VectorXcd> vv(v.data(), h.dim);
        xv -= vv.dot(xv) * vv;
      }
    };
    auto apply = [&](const cplx* xin, cplx* yout) {
      std::vector<cplx> x(xin, xin + h.dim);
      project(x.data());
      apply_hamiltonian(p, x.data(), yout);
      project(yout);
    };

    std::vector<cplx> seed(static_cast<std::size_t>(h.dim));
    std::mt19937_64 rng(0xed5eedULL + static_cast<std::uint64_t>(state));
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& s : seed) s = cplx(g(rng), g(rng));
    project(seed.data());

    detail::LanczosOptions opt;
    opt.max_iter = 128;
    opt.max_restarts = 24;
    opt.tol = 1e-12;
    auto res = detail::lanczos_lowest(h.dim, apply, seed, opt);
    if (!res.converged) throw NumericError("matrix-free eigensolve did not converge");
    out.emplace_back(res.eigenvalue, std::move(res.eigenvector));
  }
  return out;
}

std::vector<double> full_spectrum(const Tensor& hermitian) {
  if (hermitian.rank() != 2 || hermitian.dim(0) != hermitian.dim(1))
    throw ShapeError("full_spectrum needs a square matrix");
  const Index dim = hermitian.dim(0);
  Eigen::Map<const RowMat> hm(hermitian.data(), dim, dim);
  Eigen::MatrixXcd m = hm;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigensolve failed");
  std::vector<double> ev(static_cast<std::size_t>(dim));
  Eigen::Map<Eigen::VectorXd>(ev.data(), dim) = es.eigenvalues();
  return ev;
}

cplx dense_expect_site(const std::vector<cplx>& v, int length, int j, const Tensor& op) {
  const Index dim = Index(1) << length;
  if (static_cast<Index>(v.size()) != dim) throw ShapeError("vector length mismatch");
  if (j < 1 || j > length) throw ShapeError("site out of range");
  const int sh = length - j;
  cplx acc(0, 0);
  double n2 = 0.0;
  for (Index n = 0; n < dim; ++n) {
    n2 += std::norm(v[static_cast<std::size_t>(n)]);
    const Index s = (n >> sh) & 1;
    const Index base = n & ~(Index(1) << sh);
    for (Index sp = 0; sp < 2; ++sp) {
      const cplx o = op.at({s, sp});
      if (o != cplx(0, 0))
        acc += std::conj(v[static_cast<std::size_t>(n)]) * o *
               v[static_cast<std::size_t>(base | (sp << sh))];
    }
  }
  return acc / n2;
}

cplx dense_expect_two_site(const std::vector<cplx>& v, int length, int j, int l,
                           const Tensor& op_a, const Tensor& op_b) {
  const Index dim = Index(1) << length;
  if (static_cast<Index>(v.size()) != dim) throw ShapeError("vector length mismatch");
  if (j < 1 || l < 1 || j > length || l > length || j == l)
    throw ShapeError("sites out of range");
  const int shj = length - j, shl = length - l;
  cplx acc(0, 0);
  double n2 = 0.0;
  for (Index n = 0; n < dim; ++n) {
    n2 += std::norm(v[static_cast<std::size_t>(n)]);
    const Index sj = (n >> shj) & 1, sl = (n >> shl) & 1;
    const Index base = n & ~(Index(1) << shj) & ~(Index(1) << shl);
    for (Index aj = 0; aj < 2; ++aj)
      for (Index al = 0; al < 2; ++al) {
        const cplx o = op_a.at({sj, aj}) * op_b.at({sl, al});
        if (o != cplx(0, 0))
          acc += std::conj(v[static_cast<std::size_t>(n)]) * o *
                 v[static_cast<std::size_t>(base | (aj << shj) | (al << shl))];
      }
  }
  return acc / n2;
}

}  // namespace xxzdm
