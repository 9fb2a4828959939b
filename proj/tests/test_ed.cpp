#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"
#include "xxzdm/ed.hpp"
#include "xxzdm/mpo.hpp"

using namespace xxzdm;

TEST_CASE("dense_hamiltonian: two-site isotropic ferromagnet") {
  DenseHamiltonian h = dense_hamiltonian({0.0, 1.0, 0.0, 2});
  REQUIRE(h.materialized);
  auto ev = full_spectrum(h.matrix);
  CHECK(ev[0] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("dense_hamiltonian: pure DM term has a spectrum symmetric about zero") {
  DenseHamiltonian h = dense_hamiltonian({0.5 * M_PI, 0.5, 0.0, 2});
  auto ev = full_spectrum(h.matrix);
  for (std::size_t i = 0; i < ev.size(); ++i)
    CHECK(ev[i] == doctest::Approx(-ev[ev.size() - 1 - i]).epsilon(1e-12));
}

TEST_CASE("dense_hamiltonian: flux is a gauge choice when the field vanishes") {
  const int L = 5;
  auto base = full_spectrum(dense_hamiltonian({0.0, 0.75, 0.0, L}).matrix);
  for (double phi : {0.3 * M_PI, 0.5 * M_PI, 0.8 * M_PI, M_PI}) {
    auto ev = full_spectrum(dense_hamiltonian({phi, 0.75, 0.0, L}).matrix);
    for (std::size_t i = 0; i < ev.size(); ++i)
      CHECK(ev[i] == doctest::Approx(base[i]).epsilon(1e-10));
  }
}

TEST_CASE("dense_hamiltonian: length cap") {
  CHECK_THROWS_AS(dense_hamiltonian({0.0, 1.0, 0.0, 15}), ShapeError);
}

TEST_CASE("lowest_spectrum: twofold degenerate polarized ground states") {
  DenseHamiltonian h = dense_hamiltonian({0.3 * M_PI, 1.25, 0.0, 6});
  auto pairs = lowest_spectrum(h, 3);
  CHECK(pairs[0].first == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(pairs[1].first == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(pairs[2].first > -1.5 + 1e-6);

  // orthonormality and residuals, residual via the matrix-free application
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      cplx dot(0, 0);
      for (Index i = 0; i < h.dim; ++i)
        dot += std::conj(pairs[a].second[static_cast<std::size_t>(i)]) *
               pairs[b].second[static_cast<std::size_t>(i)];
      CHECK(std::abs(dot - (a == b ? cplx(1, 0) : cplx(0, 0))) < 1e-10);
    }
    std::vector<cplx> hv(static_cast<std::size_t>(h.dim));
    apply_hamiltonian(h.params, pairs[a].second.data(), hv.data());
    double resid = 0.0;
    for (Index i = 0; i < h.dim; ++i)
      resid += std::norm(hv[static_cast<std::size_t>(i)] -
                         pairs[a].first * pairs[a].second[static_cast<std::size_t>(i)]);
    CHECK(std::sqrt(resid) < 1e-9);
  }
}

TEST_CASE("lowest_spectrum: identity matrix gives all ones") {
  const Index dim = 8;
  Tensor eye({dim, dim});
  for (Index i = 0; i < dim; ++i) eye.at({i, i}) = 1.0;
  DenseHamiltonian h;
  h.params = {0.0, 1.0, 0.0, 3};
  h.dim = dim;
  h.matrix = eye;
  h.materialized = true;
  auto pairs = lowest_spectrum(h, 4);
  for (const auto& [e, v] : pairs) {
    (void)v;
    CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lowest_spectrum: dense and matrix-free paths agree at L=10") {
  const ModelParams p{0.8 * M_PI, 0.75, 0.5, 10};
  DenseHamiltonian dense = dense_hamiltonian(p);
  auto want = lowest_spectrum(dense, 3);

  DenseHamiltonian free;
  free.params = p;
  free.dim = Index(1) << 10;
  free.materialized = false;
  auto got = lowest_spectrum(free, 3);
  for (int i = 0; i < 3; ++i)
    CHECK(got[static_cast<std::size_t>(i)].first ==
          doctest::Approx(want[static_cast<std::size_t>(i)].first).epsilon(1e-9));
}

TEST_CASE("matrix-free application matches the dense matrix") {
  const ModelParams p{0.6, 0.9, 0.3, 8};
  DenseHamiltonian h = dense_hamiltonian(p);
  Tensor x = testutil::random_tensor({h.dim}, 17);
  std::vector<cplx> y(static_cast<std::size_t>(h.dim));
  apply_hamiltonian(p, x.data(), y.data());
  Tensor want = contract(h.matrix, x, {{1, 0}});
  double worst = 0.0;
  for (Index i = 0; i < h.dim; ++i)
    worst = std::max(worst, std::abs(want.data()[i] - y[static_cast<std::size_t>(i)]));
  CHECK(worst < 1e-12);
}

TEST_CASE("dense observable oracles on the polarized state") {
  const int L = 4;
  std::vector<cplx> up(16, cplx(0, 0));
  up[0] = 1.0;
  for (int j = 1; j <= L; ++j) {
    CHECK(std::abs(dense_expect_site(up, L, j, spin_half::sz()) - cplx(0.5, 0)) < 1e-14);
    CHECK(std::abs(dense_expect_site(up, L, j, spin_half::sx())) < 1e-14);
  }
  CHECK(std::abs(dense_expect_two_site(up, L, 1, 3, spin_half::sz(), spin_half::sz()) -
                 cplx(0.25, 0)) < 1e-14);
}
