#include "xxzdm/sweep.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lanczos.hpp"

namespace xxzdm {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RowMat, 0, Eigen::OuterStride<>>;
using CMapRM = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;
using VecMap = Eigen::Map<Eigen::VectorXcd>;
using CVecMap = Eigen::Map<const Eigen::VectorXcd>;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + (salt + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// MPO site tensor as a list of scalar entries (w, s, s', w', value);
/// the Hamiltonian MPO is mostly zeros and the local contractions skip them.
struct SparseSiteOp {
  Index d = 0;
  Index dl = 0, dr = 0;
  struct Entry {
    Index w, s, sp, wp;
    cplx v;
  };
  std::vector<Entry> entries;
};

SparseSiteOp make_sparse(const Tensor& w) {
  SparseSiteOp out;
  out.dl = w.dim(0);
  out.d = w.dim(1);
  out.dr = w.dim(3);
  for (Index a = 0; a < out.dl; ++a)
    for (Index s = 0; s < out.d; ++s)
      for (Index sp = 0; sp < out.d; ++sp)
        for (Index b = 0; b < out.dr; ++b) {
          const cplx v = w.at({a, s, sp, b});
          if (v != cplx(0.0, 0.0)) out.entries.push_back({a, s, sp, b, v});
        }
  return out;
}

struct LocalWorkspace {
  std::vector<cplx> t1, t2;
  std::vector<char> need, used;
};

// y[a,s,b] = sum L[a,w,a'] W[w,s,s',w'] R[b,w',b'] x[a',s',b']
void apply_local_fast(const Tensor& left, const SparseSiteOp& w, const Tensor& right,
                      const cplx* x, cplx* y, LocalWorkspace& ws) {
  const Index aB = left.dim(0), D = left.dim(1), aK = left.dim(2);
  const Index bB = right.dim(0), Dp = right.dim(1), bK = right.dim(2);
  const Index d = w.d;
  const Index blk = aK * bB;

  ws.t1.assign(static_cast<std::size_t>(Dp * d * blk), cplx(0, 0));
  ws.t2.assign(static_cast<std::size_t>(D * d * blk), cplx(0, 0));
  ws.need.assign(static_cast<std::size_t>(Dp * d), 0);
  ws.used.assign(static_cast<std::size_t>(D * d), 0);
  for (const auto& e : w.entries) {
    ws.need[static_cast<std::size_t>(e.wp * d + e.sp)] = 1;
    ws.used[static_cast<std::size_t>(e.w * d + e.s)] = 1;
  }

  for (Index wp = 0; wp < Dp; ++wp)
    for (Index sp = 0; sp < d; ++sp) {
      if (!ws.need[static_cast<std::size_t>(wp * d + sp)]) continue;
      CMapRM xm(x + sp * bK, aK, bK, Eigen::OuterStride<>(d * bK));
      CMapRM rm(right.data() + wp * bK, bB, bK, Eigen::OuterStride<>(Dp * bK));
      MapRM t1(ws.t1.data() + (wp * d + sp) * blk, aK, bB, Eigen::OuterStride<>(bB));
      t1.noalias() = xm * rm.transpose();
    }

  for (const auto& e : w.entries) {
    cplx* dst = ws.t2.data() + (e.w * d + e.s) * blk;
    const cplx* src = ws.t1.data() + (e.wp * d + e.sp) * blk;
    for (Index i = 0; i < blk; ++i) dst[i] += e.v * src[i];
  }

  std::fill(y, y + aB * d * bB, cplx(0, 0));
  for (Index wl = 0; wl < D; ++wl)
    for (Index s = 0; s < d; ++s) {
      if (!ws.used[static_cast<std::size_t>(wl * d + s)]) continue;
      CMapRM lm(left.data() + wl * aK, aB, aK, Eigen::OuterStride<>(D * aK));
      CMapRM t2(ws.t2.data() + (wl * d + s) * blk, aK, bB, Eigen::OuterStride<>(bB));
      MapRM ym(y + s * bB, aB, bB, Eigen::OuterStride<>(d * bB));
      ym.noalias() += lm * t2;
    }
}

Tensor scalar_env3() {
  Tensor t({1, 1, 1});
  t.at({0, 0, 0}) = cplx(1.0, 0.0);
  return t;
}

Tensor scalar_env2() {
  Tensor t({1, 1});
  t.at({0, 0}) = cplx(1.0, 0.0);
  return t;
}

// overlap environments between the variational bra and a fixed lower state
Tensor ovl_left_update(const Tensor& prev, const Tensor& bra_site, const Tensor& ket_site) {
  Tensor t = contract(prev, ket_site, {{1, 0}});                  // (a, s, b')
  return contract(bra_site.conjugated(), t, {{0, 0}, {1, 1}});    // (b, b')
}

Tensor ovl_right_update(const Tensor& next, const Tensor& bra_site, const Tensor& ket_site) {
  Tensor t = contract(ket_site, next, {{2, 1}});                  // (a', s, a)
  return contract(bra_site.conjugated(), t, {{1, 1}, {2, 2}});    // (a, a')
}

// <H> and <H^2> via one and two MPO layers; both divided by <psi|psi>.
std::pair<double, double> h_moments(const MpsState& psi, const MpoOperator& h) {
  const int L = psi.length();
  Tensor t1 = scalar_env3();
  for (int l = 1; l <= L; ++l)
    t1 = detail::update_left_env(t1, psi.site(l), h.site(l));

  Tensor t2({1, 1, 1, 1});
  t2.at({0, 0, 0, 0}) = cplx(1.0, 0.0);
  for (int l = 1; l <= L; ++l) {
    const Tensor& a = psi.site(l);
    const Tensor& w = h.site(l);
    Tensor s = contract(t2, a, {{3, 0}});          // (a, b1, b2, s'', b')
    s = contract(s, w, {{2, 0}, {3, 2}});          // (a, b1, b', s', w2r)
    s = contract(s, w, {{1, 0}, {3, 2}});          // (a, b', w2r, s, w1r)
    s = contract(a.conjugated(), s, {{0, 0}, {1, 3}});  // (ã, b', w2r, w1r)
    t2 = s.permuted({0, 3, 2, 1});                 // (ã, w1r, w2r, b')
  }

  const double n2 = std::abs(overlap(psi, psi));
  const double e1 = t1.at({0, 0, 0}).real() / n2;
  const double e2 = t2.at({0, 0, 0, 0}).real() / n2;
  return {e1, e2};
}

}  // namespace

void SweepConfig::validate() const {
  if (chi_max < 1) throw ShapeError("chi_max must be >= 1");
  if (!(tol_variance > 0.0)) throw ShapeError("tol_variance must be positive");
  if (max_sweeps < 1) throw ShapeError("max_sweeps must be >= 1");
  if (restarts < 1) throw ShapeError("restarts must be >= 1");
  if (local_solver_dim_threshold < 2)
    throw ShapeError("local_solver_dim_threshold must be >= 2");
}

namespace detail {

Tensor update_left_env(const Tensor& prev, const Tensor& a, const Tensor& w) {
  Tensor t = contract(prev, a, {{2, 0}});             // (a, w, s', ã')
  t = contract(t, w, {{1, 0}, {2, 2}});               // (a, ã', s, w')
  t = contract(a.conjugated(), t, {{0, 0}, {1, 2}});  // (ã, ã', w')
  return t.permuted({0, 2, 1});                       // (ã, w', ã')
}

Tensor update_right_env(const Tensor& next, const Tensor& a, const Tensor& w) {
  Tensor t = contract(a, next, {{2, 2}});             // (a', s', ã, w')
  t = contract(t, w, {{1, 2}, {3, 3}});               // (a', ã, w, s)
  t = contract(a.conjugated(), t, {{1, 3}, {2, 1}});  // (a, a', w)
  return t.permuted({0, 2, 1});                       // (a, w, a')
}

Tensor apply_local_hamiltonian(const Tensor& left, const Tensor& w, const Tensor& right,
                               const Tensor& x) {
  if (x.rank() != 3) throw ShapeError("local vector must be rank 3");
  SparseSiteOp sp = make_sparse(w);
  LocalWorkspace ws;
  Tensor y({left.dim(0), w.dim(1), right.dim(0)});
  apply_local_fast(left, sp, right, x.data(), y.data(), ws);
  return y;
}

Tensor project_out(const std::vector<Tensor>& f_tensors, const Tensor& x) {
  const int n = static_cast<int>(f_tensors.size());
  if (n == 0) return x;
  const Index dim = x.size();
  Eigen::MatrixXcd f(dim, n);
  for (int m = 0; m < n; ++m) {
    if (f_tensors[static_cast<std::size_t>(m)].size() != dim)
      throw ShapeError("constraint tensor size mismatch");
    f.col(m) = CVecMap(f_tensors[static_cast<std::size_t>(m)].data(), dim);
  }
  Eigen::MatrixXcd gram = f.adjoint() * f;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  if (es.info() != Eigen::Success) throw DegeneracyError("Gram matrix eigensolve failed");
  const double lmax = es.eigenvalues().maxCoeff();
  const double floor = 1e-12 * std::max(lmax, 0.0);
  Eigen::MatrixXcd ninv = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    if (es.eigenvalues()(i) > floor && es.eigenvalues()(i) > 0.0)
      ninv += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() /
              es.eigenvalues()(i);
  if (!ninv.allFinite())
    throw DegeneracyError("constraint Gram matrix singular beyond regularization");

  Tensor out = x;
  VecMap xv(out.data(), dim);
  Eigen::VectorXcd g = f.adjoint() * xv;
  xv -= f * (ninv * g);
  return out;
}

}  // namespace detail

EnvironmentCache make_environment_cache(int length) {
  EnvironmentCache cache;
  cache.left.assign(static_cast<std::size_t>(length + 1), Tensor());
  cache.right.assign(static_cast<std::size_t>(length + 2), Tensor());
  cache.left[0] = scalar_env3();
  cache.right[static_cast<std::size_t>(length + 1)] = scalar_env3();
  return cache;
}

namespace {

int effective_center(const MpsState& psi) {
  switch (psi.form) {
    case CanonicalForm::Left:
      return psi.length();
    case CanonicalForm::Right:
      return 1;
    case CanonicalForm::Mixed:
      return psi.center;
    default:
      return -1;
  }
}

}  // namespace

EnvironmentCache update_environment(const EnvironmentCache& cache, Side side, int site,
                                    const MpsState& psi, const MpoOperator& h) {
  const int L = psi.length();
  if (site < 1 || site > L) throw ShapeError("update_environment: site out of range");
  const int center = effective_center(psi);
  if (center < 0)
    throw ShapeError("update_environment requires a canonical state");
  EnvironmentCache out = cache;
  if (side == Side::Left) {
    if (center <= site)
      throw ShapeError("stale canonical form: left update needs center > site");
    if (cache.left[static_cast<std::size_t>(site - 1)].rank() != 3)
      throw ShapeError("environment entry for the inward neighbor is missing");
    out.left[static_cast<std::size_t>(site)] = detail::update_left_env(
        cache.left[static_cast<std::size_t>(site - 1)], psi.site(site), h.site(site));
  } else {
    if (center >= site)
      throw ShapeError("stale canonical form: right update needs center < site");
    if (cache.right[static_cast<std::size_t>(site + 1)].rank() != 3)
      throw ShapeError("environment entry for the inward neighbor is missing");
    out.right[static_cast<std::size_t>(site)] = detail::update_right_env(
        cache.right[static_cast<std::size_t>(site + 1)], psi.site(site), h.site(site));
  }
  return out;
}

Tensor local_effective_hamiltonian(const EnvironmentCache& cache, const MpoOperator& h,
                                   int k) {
  const Tensor& left = cache.left[static_cast<std::size_t>(k - 1)];
  const Tensor& right = cache.right[static_cast<std::size_t>(k + 1)];
  if (left.rank() != 3 || right.rank() != 3)
    throw ShapeError("environment cache entries missing around site");
  Tensor t = contract(left, h.site(k), {{1, 0}});  // (a, a', s, s', w')
  Tensor h6 = contract(t, right, {{4, 1}});        // (a, a', s, s', b, b')
  h6 = h6.permuted({0, 2, 4, 1, 3, 5});            // (a, s, b | a', s', b')
  const Index m = h6.dim(0) * h6.dim(1) * h6.dim(2);
  return std::move(h6).reshaped({m, m});
}

double energy_expectation(const MpsState& psi, const MpoOperator& h) {
  Tensor t = scalar_env3();
  for (int l = 1; l <= psi.length(); ++l)
    t = detail::update_left_env(t, psi.site(l), h.site(l));
  return t.at({0, 0, 0}).real() / std::abs(overlap(psi, psi));
}

double energy_variance(const MpsState& psi, const MpoOperator& h) {
  auto [e1, e2] = h_moments(psi, h);
  return std::max(0.0, e2 - e1 * e1);
}

namespace {

/// One variational solve: sweeps on a fixed initial state.
class Engine {
 public:
  Engine(const MpoOperator& h, const std::vector<const MpsState*>& lower,
         const SweepConfig& cfg, MpsState init, std::uint64_t noise_seed)
      : h_(h), lower_(lower), cfg_(cfg), psi_(std::move(init)), noise_rng_(noise_seed) {}

  SolveReport run() {
    const int L = h_.length();
    detail::canonicalize(psi_, 1, cfg_.chi_max, cfg_.svd_cutoff);
    detail::normalize_center(psi_);

    sparse_.clear();
    for (int l = 1; l <= L; ++l) sparse_.push_back(make_sparse(h_.site(l)));

    env_ = make_environment_cache(L);
    for (int l = L; l >= 2; --l)
      env_.right[static_cast<std::size_t>(l)] = detail::update_right_env(
          env_.right[static_cast<std::size_t>(l + 1)], psi_.site(l), h_.site(l));

    ovl_left_.assign(lower_.size(), {});
    ovl_right_.assign(lower_.size(), {});
    for (std::size_t m = 0; m < lower_.size(); ++m) {
      ovl_left_[m].assign(static_cast<std::size_t>(L + 1), Tensor());
      ovl_right_[m].assign(static_cast<std::size_t>(L + 2), Tensor());
      ovl_left_[m][0] = scalar_env2();
      ovl_right_[m][static_cast<std::size_t>(L + 1)] = scalar_env2();
      for (int l = L; l >= 2; --l)
        ovl_right_[m][static_cast<std::size_t>(l)] =
            ovl_right_update(ovl_right_[m][static_cast<std::size_t>(l + 1)], psi_.site(l),
                             lower_[m]->site(l));
    }

    SolveReport rep;
    double prev_e = std::numeric_limits<double>::infinity();
    double prev_var = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    for (int sweep = 1; sweep <= cfg_.max_sweeps; ++sweep) {
      max_disc_ = 0.0;
      for (int k = 1; k < L; ++k) {
        rep.update_energies.push_back(solve_site(k, sweep));
        move_right(k);
      }
      for (int k = L; k > 1; --k) {
        rep.update_energies.push_back(solve_site(k, sweep));
        move_left(k);
      }
      detail::normalize_center(psi_);
      auto [e, v] = h_moments(psi_, h_);
      const double var = std::max(0.0, v - e * e);
      rep.progress.push_back({sweep, e, var, max_disc_});
      if (var < cfg_.tol_variance) {
        rep.converged = true;
        break;
      }
      // give up when both energy and variance have frozen
      if (std::abs(e - prev_e) <= 1e-14 * std::max(1.0, std::abs(e)) &&
          var >= 0.999 * prev_var) {
        if (++stagnant >= 3) break;
      } else {
        stagnant = 0;
      }
      prev_e = e;
      prev_var = var;
    }

    psi_.form = CanonicalForm::Right;
    rep.energy = rep.progress.back().energy;
    rep.variance = rep.progress.back().variance;
    rep.sweeps_used = static_cast<int>(rep.progress.size());
    rep.max_discarded_weight = rep.progress.back().max_discarded;
    rep.final_state = std::move(psi_);
    return rep;
  }

 private:
  // F tensors of the orthogonality constraints at site k (local overlap gradients)
  std::vector<Tensor> constraint_tensors(int k) const {
    std::vector<Tensor> fs;
    fs.reserve(lower_.size());
    for (std::size_t m = 0; m < lower_.size(); ++m) {
      Tensor t = contract(ovl_left_[m][static_cast<std::size_t>(k - 1)],
                          lower_[m]->site(k), {{1, 0}});  // (a, s, b')
      fs.push_back(
          contract(t, ovl_right_[m][static_cast<std::size_t>(k + 1)], {{2, 1}}));
    }
    return fs;
  }

  double solve_site(int k, int sweep) {
    const Tensor& left = env_.left[static_cast<std::size_t>(k - 1)];
    const Tensor& right = env_.right[static_cast<std::size_t>(k + 1)];
    Tensor& m = psi_.site(k);
    const Index a = m.dim(0), d = m.dim(1), b = m.dim(2);
    const Index dim = a * d * b;
    const int n = static_cast<int>(lower_.size());

    std::vector<Tensor> fs = constraint_tensors(k);
    Eigen::MatrixXcd f, ninv;
    if (n > 0) {
      if (dim <= n)
        throw DegeneracyError("local space exhausted by orthogonality constraints");
      f.resize(dim, n);
      for (int i = 0; i < n; ++i)
        f.col(i) = CVecMap(fs[static_cast<std::size_t>(i)].data(), dim);
      Eigen::MatrixXcd gram = f.adjoint() * f;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
      if (es.info() != Eigen::Success)
        throw DegeneracyError("Gram matrix eigensolve failed");
      const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
      const double floor = 1e-12 * lmax;
      ninv = Eigen::MatrixXcd::Zero(n, n);
      for (int i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > floor && es.eigenvalues()(i) > 0.0)
          ninv += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() /
                  es.eigenvalues()(i);
      if (!ninv.allFinite())
        throw DegeneracyError("constraint Gram matrix singular beyond regularization");
    }

    auto project = [&](Eigen::VectorXcd& x) {
      if (n == 0) return;
      x -= f * (ninv * (f.adjoint() * x));
    };

    double theta;
    Eigen::VectorXcd vec;
    if (dim <= cfg_.local_solver_dim_threshold) {
      Tensor hd = local_effective_hamiltonian(env_, h_, k);
      Eigen::Map<const RowMat, 0, Eigen::OuterStride<>> hm(
          hd.data(), dim, dim, Eigen::OuterStride<>(dim));
      Eigen::MatrixXcd hmat = hm;
      if (n > 0) {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dim, dim) - f * ninv * f.adjoint();
        const double mu = hmat.cwiseAbs().colwise().sum().maxCoeff() + 1.0;
        hmat = p * hmat * p + mu * (Eigen::MatrixXcd::Identity(dim, dim) - p);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hmat);
      if (es.info() != Eigen::Success) throw NumericError("local eigensolve failed");
      theta = es.eigenvalues()(0);
      vec = es.eigenvectors().col(0);
    } else {
      std::vector<cplx> seed(m.storage());
      if (n > 0) {
        VecMap sv(seed.data(), dim);
        Eigen::VectorXcd s = sv;
        project(s);
        if (s.norm() < 1e-12) {
          std::mt19937_64 rng(mix_seed(cfg_.seed, static_cast<std::uint64_t>(k) * 977 +
                                                      static_cast<std::uint64_t>(sweep)));
          std::normal_distribution<double> g(0.0, 1.0);
          for (Index i = 0; i < dim; ++i) s(i) = cplx(g(rng), g(rng));
          project(s);
        }
        sv = s;
      }
      auto apply = [&](const cplx* xin, cplx* yout) {
        if (n == 0) {
          apply_local_fast(left, sparse_[static_cast<std::size_t>(k - 1)], right, xin,
                           yout, ws_);
          return;
        }
        Eigen::VectorXcd x = CVecMap(xin, dim);
        project(x);
        apply_local_fast(left, sparse_[static_cast<std::size_t>(k - 1)], right, x.data(),
                         yout, ws_);
        Eigen::VectorXcd y = CVecMap(yout, dim);
        project(y);
        VecMap(yout, dim) = y;
      };
      detail::LanczosOptions opt;
      opt.tol = 1e-12;
      opt.fallback_seed = mix_seed(cfg_.seed, static_cast<std::uint64_t>(k));
      auto res = detail::lanczos_lowest(dim, apply, seed, opt);
      theta = res.eigenvalue;
      vec = CVecMap(res.eigenvector.data(), dim);
    }

    VecMap(m.data(), dim) = vec;

    if (cfg_.noise_scale > 0.0 && sweep <= cfg_.noise_sweeps) {
      std::normal_distribution<double> g(0.0, 1.0);
      const double sigma = cfg_.noise_scale * std::pow(0.5, sweep - 1) /
                           std::sqrt(static_cast<double>(dim));
      for (Index i = 0; i < dim; ++i)
        m.data()[i] += sigma * cplx(g(noise_rng_), g(noise_rng_));
    }
    return theta;
  }

  void move_right(int k) {
    max_disc_ = std::max(
        max_disc_, detail::move_center_right(psi_, k, cfg_.chi_max, cfg_.svd_cutoff));
    env_.left[static_cast<std::size_t>(k)] = detail::update_left_env(
        env_.left[static_cast<std::size_t>(k - 1)], psi_.site(k), h_.site(k));
    for (std::size_t m = 0; m < lower_.size(); ++m)
      ovl_left_[m][static_cast<std::size_t>(k)] =
          ovl_left_update(ovl_left_[m][static_cast<std::size_t>(k - 1)], psi_.site(k),
                          lower_[m]->site(k));
  }

  void move_left(int k) {
    max_disc_ = std::max(
        max_disc_, detail::move_center_left(psi_, k, cfg_.chi_max, cfg_.svd_cutoff));
    env_.right[static_cast<std::size_t>(k)] = detail::update_right_env(
        env_.right[static_cast<std::size_t>(k + 1)], psi_.site(k), h_.site(k));
    for (std::size_t m = 0; m < lower_.size(); ++m)
      ovl_right_[m][static_cast<std::size_t>(k)] =
          ovl_right_update(ovl_right_[m][static_cast<std::size_t>(k + 1)], psi_.site(k),
                           lower_[m]->site(k));
  }

  const MpoOperator& h_;
  const std::vector<const MpsState*>& lower_;
  SweepConfig cfg_;
  MpsState psi_;
  EnvironmentCache env_;
  std::vector<std::vector<Tensor>> ovl_left_, ovl_right_;
  std::vector<SparseSiteOp> sparse_;
  LocalWorkspace ws_;
  std::mt19937_64 noise_rng_;
  double max_disc_ = 0.0;
};

SolveReport run_search(const MpoOperator& h, const std::vector<MpsState>& lower,
                       const SweepConfig& cfg, const MpsState* initial) {
  cfg.validate();
  const int L = h.length();
  if (L < 2) throw ShapeError("Hamiltonian must span at least 2 sites");
  const int d = h.phys_dim();

  std::vector<const MpsState*> low;
  for (const auto& s : lower) {
    if (s.length() != L || s.phys_dim != d)
      throw ShapeError("lower state incompatible with the Hamiltonian");
    low.push_back(&s);
  }
  for (std::size_t i = 0; i < lower.size(); ++i)
    for (std::size_t j = i + 1; j < lower.size(); ++j) {
      const double ov = std::abs(overlap(lower[i], lower[j]));
      if (ov > 1e-6 * norm(lower[i]) * norm(lower[j]))
        throw std::invalid_argument("lower states are not mutually orthogonal to 1e-6");
    }

  SolveReport best;
  bool have = false;
  for (int attempt = 0; attempt < cfg.restarts; ++attempt) {
    MpsState init;
    if (attempt == 0 && initial)
      init = *initial;
    else
      init = random_mps(L, d, cfg.chi_max, mix_seed(cfg.seed, static_cast<std::uint64_t>(attempt)));
    Engine eng(h, low, cfg, std::move(init),
               mix_seed(cfg.seed ^ 0x6e6f697365ULL, static_cast<std::uint64_t>(attempt)));
    SolveReport rep = eng.run();
    if (!have || rep.energy < best.energy) {
      best = std::move(rep);
      have = true;
    }
  }
  return best;
}

}  // namespace

SolveReport ground_state_search(const MpoOperator& h, const SweepConfig& cfg) {
  return run_search(h, {}, cfg, nullptr);
}

SolveReport ground_state_search(const MpoOperator& h, const SweepConfig& cfg,
                                const MpsState& initial) {
  return run_search(h, {}, cfg, &initial);
}

SolveReport excited_state_search(const MpoOperator& h, const std::vector<MpsState>& lower,
                                 const SweepConfig& cfg) {
  return run_search(h, lower, cfg, nullptr);
}

SolveReport excited_state_search(const MpoOperator& h, const std::vector<MpsState>& lower,
                                 const SweepConfig& cfg, const MpsState& initial) {
  return run_search(h, lower, cfg, &initial);
}

}  // namespace xxzdm
