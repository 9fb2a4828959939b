#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"
#include "xxzdm/ed.hpp"
#include "xxzdm/observables.hpp"
#include "xxzdm/sweep.hpp"

using namespace xxzdm;

namespace {

MpsState product_up(int L) {
  std::vector<cplx> up(static_cast<std::size_t>(Index(1) << L), cplx(0, 0));
  up[0] = 1.0;
  return from_dense_vector(up, 1);
}

SweepConfig cfg_for(Index chi, double tol = 1e-10) {
  SweepConfig cfg;
  cfg.chi_max = chi;
  cfg.tol_variance = tol;
  cfg.max_sweeps = 60;
  cfg.restarts = 2;
  cfg.seed = 321;
  cfg.local_solver_dim_threshold = 256;
  return cfg;
}

MpsState solve_gs(const ModelParams& p, Index chi, double tol = 1e-10) {
  SolveReport rep = ground_state_search(build_xxz_dm_mpo(p), cfg_for(chi, tol));
  REQUIRE(rep.converged);
  return rep.final_state;
}

}  // namespace

TEST_CASE("expect_site: polarized product state") {
  MpsState psi = product_up(5);
  for (int j = 1; j <= 5; ++j) {
    CHECK(std::abs(expect_site(psi, j, spin_half::sz()) - cplx(0.5, 0)) < 1e-13);
    CHECK(std::abs(expect_site(psi, j, spin_half::sx())) < 1e-13);
  }
  CHECK_THROWS_AS(expect_site(psi, 0, spin_half::sz()), ShapeError);
  CHECK_THROWS_AS(expect_site(psi, 6, spin_half::sz()), ShapeError);
}

TEST_CASE("expect_site: converged ground state matches the dense oracle") {
  const ModelParams p{M_PI, 0.75, 1.0, 8};
  MpsState gs = solve_gs(p, 16);
  auto dense = lowest_spectrum(dense_hamiltonian(p), 2);
  REQUIRE(dense[1].first - dense[0].first > 1e-4);  // unique finite-size GS
  for (int j = 1; j <= 8; ++j) {
    const cplx want = dense_expect_site(dense[0].second, 8, j, spin_half::sy());
    CHECK(std::abs(expect_site(gs, j, spin_half::sy()) - want) < 1e-7);
  }
}

TEST_CASE("correlation: product states factorize") {
  MpsState psi = product_up(6);
  CHECK(std::abs(correlation(psi, 2, 5, spin_half::sz(), spin_half::sz()) -
                 cplx(0.25, 0)) < 1e-13);
  for (const auto& [a, b] : {std::pair{spin_half::sx(), spin_half::sz()},
                             {spin_half::sy(), spin_half::sy()}}) {
    const cplx lhs = correlation(psi, 1, 4, a, b);
    const cplx rhs = expect_site(psi, 1, a) * expect_site(psi, 4, b);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
  CHECK_THROWS_AS(correlation(psi, 4, 4, spin_half::sz(), spin_half::sz()),
                  std::invalid_argument);
  CHECK_THROWS_AS(correlation(psi, 5, 2, spin_half::sz(), spin_half::sz()),
                  std::invalid_argument);
}

TEST_CASE("correlation: matches the dense oracle on a converged ground state") {
  const ModelParams p{0.5 * M_PI, 0.75, 0.5, 8};
  MpsState gs = solve_gs(p, 16);
  auto dense = lowest_spectrum(dense_hamiltonian(p), 2);
  REQUIRE(dense[1].first - dense[0].first > 1e-4);
  for (auto [j, l] : {std::pair{1, 4}, {2, 7}, {3, 8}}) {
    const cplx want =
        dense_expect_two_site(dense[0].second, 8, j, l, spin_half::sx(), spin_half::sx());
    CHECK(std::abs(correlation(gs, j, l, spin_half::sx(), spin_half::sx()) - want) < 1e-7);
  }
}

TEST_CASE("correlation: independent of the center position inside [j, l]") {
  MpsState psi = random_mps(8, 2, 6, 55);
  const cplx base = correlation(shift_center(psi, 3), 3, 6, spin_half::sy(), spin_half::sx());
  for (int c = 3; c <= 6; ++c) {
    const cplx v =
        correlation(shift_center(psi, c), 3, 6, spin_half::sy(), spin_half::sx());
    CHECK(std::abs(v - base) < 1e-10);
  }
}

TEST_CASE("correlation_profile: Hermitian pairs, quarter diagonal, matches pointwise calls") {
  MpsState psi = random_mps(7, 2, 6, 91);
  CorrelationRecord rec = correlation_profile(psi, Axis::Y);
  CHECK(rec.reference_site() == 4);
  for (int j = 1; j <= 7; ++j) {
    CHECK(std::abs(rec.value(j, j) - cplx(0.25, 0)) < 1e-12);
    for (int l = j + 1; l <= 7; ++l) {
      CHECK(std::abs(rec.value(j, l) - std::conj(rec.value(l, j))) < 1e-12);
      const cplx want = correlation(psi, j, l, spin_half::sy(), spin_half::sy());
      CHECK(std::abs(rec.value(j, l) - want) < 1e-10);
    }
  }
}

TEST_CASE("correlation_profile: long-range order by phase, short scale") {
  // z-FM: the polarized state carries flat 1/4 zz correlations
  MpsState zfm = solve_gs({0.0, 1.25, 0.0, 12}, 8, 1e-9);
  CorrelationRecord cz = correlation_profile(zfm, Axis::Z);
  const int ref = cz.reference_site();
  CHECK(cz.value(ref, ref + 3).real() > 0.2);

  // x-PARA: transverse correlations die out
  MpsState xpara = solve_gs({0.0, 1.25, 0.6, 16}, 12, 1e-9);
  CorrelationRecord cy2 = correlation_profile(xpara, Axis::Y);
  CorrelationRecord cz2 = correlation_profile(xpara, Axis::Z);
  CHECK(std::abs(cy2.value(4, 12)) < 0.01);
  CHECK(std::abs(cz2.value(4, 12)) < 0.01);
}

TEST_CASE("structure_factor: polarized state against the explicit double sum") {
  const int L = 8;
  MpsState psi = product_up(L);
  CorrelationRecord rec = correlation_profile(psi, Axis::Z);
  const std::vector<double> grid = default_k_grid(L);
  const std::vector<double> q = structure_factor(rec, grid);

  for (std::size_t ki = 0; ki < grid.size(); ++ki) {
    cplx want(0, 0);
    for (int j = 1; j <= L; ++j)
      for (int l = 1; l <= L; ++l)
        want += std::polar(1.0, grid[ki] * (j - l)) * rec.value(j, l);
    want /= static_cast<double>(L);
    CHECK(q[ki] == doctest::Approx(want.real()).epsilon(1e-10));
    CHECK(q[ki] >= -1e-9);
  }
  CHECK(q[0] == doctest::Approx(L / 4.0).epsilon(1e-12));
}

TEST_CASE("structure_factor: sum rule over the full grid") {
  MpsState psi = random_mps(10, 2, 8, 77);
  for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
    CorrelationRecord rec = correlation_profile(psi, ax);
    const std::vector<double> q = structure_factor(rec, default_k_grid(10));
    double total = 0.0;
    for (double v : q) total += v;
    CHECK(total == doctest::Approx(10.0 / 4.0).epsilon(1e-8));
  }
}

TEST_CASE("structure_factor: spiral peak sits at the flux momentum") {
  // gapless spiral at phi = pi/2: Q_x and Q_y peak at k = phi; chi = 24 keeps
  // the truncation variance floor below the tolerance at this gapless point
  MpsState gs = solve_gs({0.5 * M_PI, 0.75, 0.0, 16}, 24, 1e-7);
  for (Axis ax : {Axis::X, Axis::Y}) {
    const auto [k, val] = structure_factor_peak(correlation_profile(gs, ax));
    CHECK(k == doctest::Approx(0.5 * M_PI).epsilon(1e-12));
    CHECK(val > 0.1);
  }
}

TEST_CASE("order_parameters: polarized product state") {
  OrderParameters ops = order_parameters(product_up(6));
  CHECK(ops.m[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ops.m[0] < 1e-12);
  CHECK(ops.n[2] < 1e-12);  // even L
  for (double c : ops.c) CHECK(c < 1e-12);
}

TEST_CASE("order_parameters: all nine values match the dense oracle") {
  const ModelParams p{0.8 * M_PI, 0.75, 0.5, 8};
  MpsState gs = solve_gs(p, 16);
  auto dense = lowest_spectrum(dense_hamiltonian(p), 2);
  REQUIRE(dense[1].first - dense[0].first > 1e-4);
  const auto& v = dense[0].second;

  const Tensor ops3[3] = {spin_half::sx(), spin_half::sy(), spin_half::sz()};
  std::array<cplx, 3> msum{}, nsum{}, csum{};
  for (int j = 1; j <= 8; ++j) {
    for (int a = 0; a < 3; ++a) {
      const cplx e = dense_expect_site(v, 8, j, ops3[a]);
      msum[static_cast<std::size_t>(a)] += e;
      nsum[static_cast<std::size_t>(a)] += ((j % 2 == 0) ? 1.0 : -1.0) * e;
    }
    if (j < 8) {
      auto two = [&](int a, int b) {
        return dense_expect_two_site(v, 8, j, j + 1, ops3[a], ops3[b]);
      };
      csum[0] += two(1, 2) - two(2, 1);
      csum[1] += two(2, 0) - two(0, 2);
      csum[2] += two(0, 1) - two(1, 0);
    }
  }
  OrderParameters got = order_parameters(gs);
  for (int a = 0; a < 3; ++a) {
    CHECK(got.m[static_cast<std::size_t>(a)] ==
          doctest::Approx(std::abs(msum[static_cast<std::size_t>(a)]) / 8).epsilon(1e-6));
    CHECK(got.n[static_cast<std::size_t>(a)] ==
          doctest::Approx(std::abs(nsum[static_cast<std::size_t>(a)]) / 8).epsilon(1e-6));
    CHECK(got.c[static_cast<std::size_t>(a)] ==
          doctest::Approx(std::abs(csum[static_cast<std::size_t>(a)]) / 8).epsilon(1e-6));
  }
}

TEST_CASE("order_parameters: magnetization agrees with per-site expectations") {
  MpsState psi = random_mps(6, 2, 6, 17);
  OrderParameters ops = order_parameters(psi);
  cplx sum(0, 0);
  for (int j = 1; j <= 6; ++j) sum += expect_site(psi, j, spin_half::sx());
  CHECK(ops.m[0] == doctest::Approx(std::abs(sum) / 6).epsilon(1e-12));
}

TEST_CASE("energy_gaps: arithmetic, clamping, ordering") {
  auto [d1, d2] = energy_gaps(-4.5, -4.5, -3.9);
  CHECK(d1 == 0.0);
  CHECK(d2 == doctest::Approx(0.6).epsilon(1e-12));
  auto [e1, e2] = energy_gaps(-1.0, -1.0 - 5e-10, -0.5);
  CHECK(e1 == 0.0);
  CHECK(e2 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(energy_gaps(-1.0, -1.1, -0.5), SolverQualityError);
  CHECK_THROWS_AS(energy_gaps(-1.0, -0.5, -0.8), SolverQualityError);

  // identical to the dense spectrum gaps
  auto spec = lowest_spectrum(dense_hamiltonian({0.5 * M_PI, 0.75, 0.5, 8}), 3);
  auto [g1, g2] = energy_gaps(spec[0].first, spec[1].first, spec[2].first);
  CHECK(g1 == doctest::Approx(spec[1].first - spec[0].first));
  CHECK(g2 == doctest::Approx(spec[2].first - spec[0].first));
}
