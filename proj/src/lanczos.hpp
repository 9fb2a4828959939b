#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "xxzdm/tensor.hpp"

namespace xxzdm::detail {

struct LanczosOptions {
  int max_iter = 64;      // Krylov dimension per restart
  int max_restarts = 8;
  double tol = 1e-12;     // residual tolerance relative to the spectral scale
  std::uint64_t fallback_seed = 0x5eedULL;  // used when the seed vector is ~0
};

struct LanczosResult {
  double eigenvalue = 0.0;
  std::vector<cplx> eigenvector;
  int matvecs = 0;
  bool converged = false;
};

/// Minimal eigenpair of a Hermitian operator by restarted Lanczos with full
/// reorthogonalization. `apply(x, y)` must write y = A x.
template <typename MatVec>
LanczosResult lanczos_lowest(Index dim, MatVec&& apply, const std::vector<cplx>& seed,
                             const LanczosOptions& opt = {}) {
  using Vec = Eigen::VectorXcd;
  using Map = Eigen::Map<Vec>;
  using CMap = Eigen::Map<const Vec>;

  LanczosResult res;
  res.eigenvector.assign(static_cast<std::size_t>(dim), cplx(0, 0));

  std::vector<cplx> v0(seed);
  if (v0.size() != static_cast<std::size_t>(dim))
    v0.assign(static_cast<std::size_t>(dim), cplx(0, 0));
  {
    CMap m(v0.data(), dim);
    double n = m.norm();
    if (!(n > 1e-14)) {
      std::mt19937_64 rng(opt.fallback_seed);
      std::normal_distribution<double> g(0.0, 1.0);
      for (auto& x : v0) x = cplx(g(rng), g(rng));
      n = CMap(v0.data(), dim).norm();
    }
    Map(v0.data(), dim) /= n;
  }

  std::vector<std::vector<cplx>> basis;
  std::vector<cplx> w(static_cast<std::size_t>(dim));
  double theta = 0.0;

  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    basis.clear();
    basis.push_back(v0);
    std::vector<double> alpha, beta;
    Eigen::VectorXd ritz;  // Ritz coefficients of the lowest pair

    int m_used = 0;
    bool exhausted = false;
    for (int m = 0; m < opt.max_iter && m < dim; ++m) {
      apply(basis.back().data(), w.data());
      ++res.matvecs;
      Map wm(w.data(), dim);
      CMap vm(basis.back().data(), dim);
      const double a = wm.dot(vm).real();  // dot conjugates the left argument
      alpha.push_back(a);

      // full reorthogonalization, twice for safety
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
          CMap bm(b.data(), dim);
          wm -= bm.dot(wm) * bm;
        }

      m_used = m + 1;
      const double b_next = wm.norm();

      // lowest Ritz pair of the tridiagonal
      Eigen::VectorXd diag =
          Eigen::Map<const Eigen::VectorXd>(alpha.data(), m_used);
      Eigen::VectorXd sub = beta.empty()
                                ? Eigen::VectorXd()
                                : Eigen::Map<const Eigen::VectorXd>(beta.data(),
                                                                    m_used - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      theta = es.eigenvalues()(0);
      ritz = es.eigenvectors().col(0);

      const double scale =
          std::max(1.0, std::abs(es.eigenvalues()(m_used - 1)) + std::abs(theta));
      const double resid_est = b_next * std::abs(ritz(m_used - 1));
      if (resid_est < opt.tol * scale || b_next < 1e-14 * scale) {
        exhausted = b_next < 1e-14 * scale;
        break;
      }
      beta.push_back(b_next);
      wm /= b_next;
      basis.push_back(w);
      if (m + 1 == opt.max_iter || m + 1 == dim) exhausted = true;
    }

    // assemble the Ritz vector
    Map out(res.eigenvector.data(), dim);
    out.setZero();
    for (int i = 0; i < m_used; ++i)
      out += ritz(i) * CMap(basis[static_cast<std::size_t>(i)].data(), dim);
    out /= out.norm();
    res.eigenvalue = theta;

    // true residual decides convergence across restarts
    apply(res.eigenvector.data(), w.data());
    ++res.matvecs;
    Map wm(w.data(), dim);
    wm -= theta * out;
    const double scale = std::max(1.0, std::abs(theta));
    if (wm.norm() < 10.0 * opt.tol * scale) {
      res.converged = true;
      return res;
    }
    if (exhausted && m_used >= dim) {
      res.converged = true;  // Krylov space spans everything reachable
      return res;
    }
    v0 = res.eigenvector;
  }
  return res;
}

}  // namespace xxzdm::detail
