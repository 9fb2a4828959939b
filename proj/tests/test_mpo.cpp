#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"
#include "xxzdm/ed.hpp"
#include "xxzdm/mpo.hpp"

using namespace xxzdm;

namespace {

double hermiticity_defect(const Tensor& h) {
  double worst = 0.0, scale = 0.0;
  for (Index i = 0; i < h.dim(0); ++i)
    for (Index j = 0; j < h.dim(1); ++j) {
      worst = std::max(worst, std::abs(h.at({i, j}) - std::conj(h.at({j, i}))));
      scale = std::max(scale, std::abs(h.at({i, j})));
    }
  return worst / std::max(scale, 1.0);
}

}  // namespace

TEST_CASE("derive_scaled_params: direct substitution") {
  auto s = derive_scaled_params(1.0, 20.0, 1.0, 0.0);
  CHECK(s.j == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(s.j_z == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.omega_prime == 0.0);
  CHECK(s.strong_coupling);
}

TEST_CASE("derive_scaled_params: j_z crosses zero at lambda = 1/2") {
  CHECK(derive_scaled_params(1.0, 20.0, 0.5, 0.0).j_z == doctest::Approx(0.0));
}

TEST_CASE("derive_scaled_params: independent arithmetic check") {
  auto s = derive_scaled_params(1.0, 20.0, 0.75, 0.05);
  CHECK(s.j == doctest::Approx(-4.0 / 15.0).epsilon(1e-15));
  CHECK(s.j_z == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.omega_prime == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("derive_scaled_params: errors and the perturbative-regime flag") {
  CHECK_THROWS_AS(derive_scaled_params(0.0, 20.0, 1.0, 0.0), ShapeError);
  CHECK_THROWS_AS(derive_scaled_params(1.0, -1.0, 1.0, 0.0), ShapeError);
  CHECK_FALSE(derive_scaled_params(1.0, 5.0, 1.0, 0.0).strong_coupling);
  CHECK_FALSE(derive_scaled_params(1.0, 20.0, 1.0, 3.0).strong_coupling);
}

TEST_CASE("model params validation") {
  CHECK_THROWS_AS((ModelParams{-0.1, 1.0, 0.0, 4}.validate()), ShapeError);
  CHECK_THROWS_AS((ModelParams{0.0, -1.0, 0.0, 4}.validate()), ShapeError);
  CHECK_THROWS_AS((ModelParams{0.0, 1.0, -0.2, 4}.validate()), ShapeError);
  CHECK_THROWS_AS((ModelParams{0.0, 1.0, 0.0, 1}.validate()), ShapeError);
}

TEST_CASE("mpo: bulk bond dimension is 5") {
  MpoOperator op = build_xxz_dm_mpo({0.3, 0.9, 0.4, 6});
  CHECK(op.bond_dim(0) == 1);
  for (int l = 1; l < 6; ++l) CHECK(op.bond_dim(l) == 5);
  CHECK(op.bond_dim(6) == 1);
}

TEST_CASE("mpo: L=2 has only the boundary tensors") {
  MpoOperator op = build_xxz_dm_mpo({0.1, 1.1, 0.2, 2});
  REQUIRE(op.length() == 2);
  CHECK(op.site(1).dim(0) == 1);
  CHECK(op.site(1).dim(3) == 5);
  CHECK(op.site(2).dim(0) == 5);
  CHECK(op.site(2).dim(3) == 1);
}

TEST_CASE("mpo: two-site isotropic point reproduces the exact spectrum") {
  MpoOperator op = build_xxz_dm_mpo({0.0, 1.0, 0.0, 2});
  Tensor h = mpo_to_dense(op);

  // explicit -(SxSx + SySy + SzSz)
  Tensor want = dense_from_couplings(2, 1.0, 0.0, 1.0, 0.0);
  CHECK(testutil::max_abs_diff(h, want) < 1e-15);

  auto ev = full_spectrum(h);
  CHECK(ev[0] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("mpo: phi = pi/2 removes the SxSx and SySy couplings") {
  const double lambda = 0.8, omega = 0.35;
  MpoOperator op = build_xxz_dm_mpo({0.5 * M_PI, lambda, omega, 4});
  Tensor h = mpo_to_dense(op);
  // DM + zz + field only; cos(pi/2) contributions must vanish to fp accuracy
  Tensor want = dense_from_couplings(4, 0.0, 1.0, lambda, omega);
  double scale = 0.0;
  for (Index i = 0; i < h.size(); ++i) scale = std::max(scale, std::abs(h.data()[i]));
  CHECK(testutil::max_abs_diff(h, want) < 1e-15 * std::max(scale, 1.0) + 1e-15);
}

TEST_CASE("mpo: dense reconstruction matches the direct assembly across parameters") {
  for (auto [phi, lambda, omega] :
       {std::tuple{0.0, 1.25, 0.2}, {0.8 * M_PI, 0.75, 0.5}, {M_PI, 0.92, 1.0}}) {
    MpoOperator op = build_xxz_dm_mpo({phi, lambda, omega, 5});
    Tensor h = mpo_to_dense(op);
    Tensor want =
        dense_from_couplings(5, std::cos(phi), std::sin(phi), lambda, omega);
    CHECK(testutil::max_abs_diff(h, want) < 1e-13);
  }
}

TEST_CASE("mpo: Hermitian on dense reconstructions up to L=8") {
  for (int L : {2, 5, 8}) {
    Tensor h = mpo_to_dense(build_xxz_dm_mpo({0.6, 0.85, 0.7, L}));
    CHECK(hermiticity_defect(h) < 1e-15);
  }
}

TEST_CASE("mpo: Gamma symmetry maps phi to -phi") {
  const double phi = 0.4 * M_PI, lambda = 0.9, omega = 0.6;
  const int L = 5;
  Tensor h = mpo_to_dense(build_xxz_dm_mpo({phi, lambda, omega, L}));
  // Gamma = prod_j 2 S^x_j flips every spin: (Gamma H Gamma)[i,j] = H[~i, ~j]
  const Index dim = Index(1) << L;
  const Index mask = dim - 1;
  Tensor flipped({dim, dim});
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j)
      flipped.at({i, j}) = h.at({(~i) & mask, (~j) & mask});
  Tensor want = dense_from_couplings(L, std::cos(-phi), std::sin(-phi), lambda, omega);
  CHECK(testutil::max_abs_diff(flipped, want) < 1e-13);
}

TEST_CASE("mpo: spectrum is flux-independent without the field") {
  const int L = 6;
  auto base = full_spectrum(mpo_to_dense(build_xxz_dm_mpo({0.0, 0.8, 0.0, L})));
  for (double phi : {0.3, 0.5 * M_PI, 0.9 * M_PI}) {
    auto ev = full_spectrum(mpo_to_dense(build_xxz_dm_mpo({phi, 0.8, 0.0, L})));
    double worst = 0.0;
    for (std::size_t i = 0; i < ev.size(); ++i)
      worst = std::max(worst, std::abs(ev[i] - base[i]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("mpo: direct builder agrees with the generic nearest-neighbor compiler") {
  const double phi = 0.7, lambda = 1.1, omega = 0.45;
  const double c = std::cos(phi), s = std::sin(phi);
  MpoOperator direct = build_xxz_dm_mpo({phi, lambda, omega, 4});

  auto scale2 = [](const Tensor& t, double f) { return t.scaled(cplx(f, 0.0)); };
  Tensor a1({2, 2}), a2({2, 2});
  for (Index i = 0; i < 4; ++i) {
    a1.data()[i] = -(c * spin_half::sx().data()[i] - s * spin_half::sy().data()[i]) / lambda;
    a2.data()[i] = -(c * spin_half::sy().data()[i] + s * spin_half::sx().data()[i]) / lambda;
  }
  std::vector<BondTerm> bonds{{a1, spin_half::sx()},
                              {a2, spin_half::sy()},
                              {scale2(spin_half::sz(), -(2.0 * lambda - 1.0) / lambda),
                               spin_half::sz()}};
  MpoOperator generic =
      build_nearest_neighbor_mpo(4, bonds, scale2(spin_half::sx(), -omega));

  CHECK(testutil::max_abs_diff(mpo_to_dense(direct), mpo_to_dense(generic)) < 1e-14);
}
