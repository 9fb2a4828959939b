#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "test_helpers.hpp"
#include "xxzdm/reference.hpp"
#include "xxzdm/tensor.hpp"

using namespace xxzdm;
using testutil::frobenius_diff;
using testutil::max_abs_diff;
using testutil::random_tensor;
using testutil::reconstruct;

TEST_CASE("reshape preserves data exactly") {
  Tensor t = random_tensor({2, 3, 4}, 1);
  Tensor r = t.reshaped({6, 4});
  CHECK(r.rank() == 2);
  for (Index i = 0; i < t.size(); ++i) CHECK(r.data()[i] == t.data()[i]);
  CHECK_THROWS_AS(t.reshaped({5, 5}), ShapeError);
}

TEST_CASE("permute matches the serial reference") {
  Tensor t = random_tensor({3, 4, 2, 5}, 2);
  const std::vector<int> perm{2, 0, 3, 1};
  CHECK(max_abs_diff(t.permuted(perm), reference::permute(t, perm)) == 0.0);
}

TEST_CASE("svd_full: 2x2 identity") {
  Tensor eye({2, 2});
  eye.at({0, 0}) = eye.at({1, 1}) = 1.0;
  auto svd = svd_full(eye);
  REQUIRE(svd.s.size() == 2);
  CHECK(svd.s[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(svd.s[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(svd.discarded_weight == 0.0);
}

TEST_CASE("svd_full: rank-1 outer product of unit vectors") {
  // |u><v| with u, v random unit vectors
  Tensor u = random_tensor({3}, 3), v = random_tensor({4}, 4);
  double nu = u.frobenius_norm(), nv = v.frobenius_norm();
  Tensor m({3, 4});
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j)
      m.at({i, j}) = (u.data()[i] / nu) * std::conj(v.data()[j] / nv);
  auto svd = svd_full(m);
  REQUIRE(svd.s.size() == 3);
  CHECK(svd.s[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(svd.s[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(svd.s[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("svd_full: random 4x4 reconstructs and matches the eigensolve oracle") {
  Tensor m = random_tensor({4, 4}, 5);
  auto svd = svd_full(m);
  CHECK(frobenius_diff(reconstruct(svd), m) / m.frobenius_norm() < 1e-12);

  // oracle: singular values are the square roots of eig(m^dag m)
  Eigen::MatrixXcd em(4, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) em(i, j) = m.at({i, j});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(em.adjoint() * em);
  for (int i = 0; i < 4; ++i)
    CHECK(svd.s[static_cast<std::size_t>(i)] ==
          doctest::Approx(std::sqrt(es.eigenvalues()(3 - i))).epsilon(1e-10));

  // orthonormality of the factors
  Tensor uu = contract(svd.u.conjugated(), svd.u, {{0, 0}});
  Tensor vv = contract(svd.vdag, svd.vdag.conjugated(), {{1, 1}});
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      const cplx want = (i == j) ? cplx(1, 0) : cplx(0, 0);
      CHECK(std::abs(uu.at({i, j}) - want) < 1e-12);
      CHECK(std::abs(vv.at({i, j}) - want) < 1e-12);
    }
}

TEST_CASE("svd errors") {
  CHECK_THROWS_AS(svd_full(random_tensor({2, 3, 4}, 6)), ShapeError);
  Tensor bad({2, 2});
  bad.at({0, 0}) = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(svd_full(bad), NumericError);
  CHECK_THROWS_AS(svd_truncate(random_tensor({2, 2}, 7), 0, 0.0), ShapeError);
}

TEST_CASE("svd_truncate: identity at chi_max=1 keeps one value") {
  Tensor eye({2, 2});
  eye.at({0, 0}) = eye.at({1, 1}) = 1.0;
  auto svd = svd_truncate(eye, 1, 0.0);
  REQUIRE(svd.s.size() == 1);
  CHECK(svd.s[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(svd.discarded_weight == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("svd_truncate: no-op truncation equals svd_full") {
  Tensor m = random_tensor({5, 3}, 8);
  auto a = svd_full(m);
  auto b = svd_truncate(m, 10, 0.0);
  REQUIRE(a.s.size() == b.s.size());
  for (std::size_t i = 0; i < a.s.size(); ++i) CHECK(a.s[i] == b.s[i]);
  CHECK(max_abs_diff(a.u, b.u) == 0.0);
  CHECK(max_abs_diff(a.vdag, b.vdag) == 0.0);
}

TEST_CASE("svd_truncate: rank-3 error equals the dropped tail of svd_full") {
  Tensor m = random_tensor({6, 6}, 9);
  auto full = svd_full(m);
  auto trunc = svd_truncate(m, 3, 0.0);
  REQUIRE(trunc.s.size() == 3);
  const double tail = std::sqrt(full.s[3] * full.s[3] + full.s[4] * full.s[4] +
                                full.s[5] * full.s[5]);
  CHECK(frobenius_diff(reconstruct(trunc), m) == doctest::Approx(tail).epsilon(1e-10));
  CHECK(std::sqrt(trunc.discarded_weight) == doctest::Approx(tail).epsilon(1e-10));
}

TEST_CASE("reconstruction error equals discarded weight (property)") {
  for (std::uint64_t seed = 20; seed < 28; ++seed) {
    Tensor m = random_tensor({7, 5}, seed);
    const Index chi = 1 + static_cast<Index>(seed % 5);
    auto svd = svd_truncate(m, chi, 0.0);
    const double err2 = std::pow(frobenius_diff(reconstruct(svd), m), 2);
    CHECK(err2 == doctest::Approx(svd.discarded_weight).epsilon(1e-10));
  }
}

TEST_CASE("truncation optimality against random orthonormal bases") {
  Tensor m = random_tensor({8, 8}, 30);
  const Index r = 3;
  auto svd = svd_truncate(m, r, 0.0);
  const double best = frobenius_diff(reconstruct(svd), m);

  Eigen::MatrixXcd em(8, 8);
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 8; ++j) em(i, j) = m.at({i, j});
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::MatrixXcd q(8, r);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < static_cast<int>(r); ++j) q(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(q);
    Eigen::MatrixXcd qq = qr.householderQ() * Eigen::MatrixXcd::Identity(8, r);
    // best approximation with column space qq
    const double err = (em - qq * (qq.adjoint() * em)).norm();
    CHECK(err >= best - 1e-10);
  }
}

TEST_CASE("contract: matrix times identity") {
  Tensor m = random_tensor({3, 4}, 40);
  Tensor eye({4, 4});
  for (Index i = 0; i < 4; ++i) eye.at({i, i}) = 1.0;
  CHECK(max_abs_diff(contract(m, eye, {{1, 0}}), m) < 1e-15);
}

TEST_CASE("contract: vector inner product gives a scalar") {
  Tensor a = random_tensor({5}, 41), b = random_tensor({5}, 42);
  Tensor s = contract(a, b, {{0, 0}});
  CHECK(s.rank() == 0);
  cplx want(0, 0);
  for (Index i = 0; i < 5; ++i) want += a.data()[i] * b.data()[i];
  CHECK(std::abs(s.at({}) - want) < 1e-13);
}

TEST_CASE("contract: rank-3 x rank-3 over two pairs matches the nested-loop oracle") {
  Tensor a = random_tensor({2, 3, 4}, 43);
  Tensor b = random_tensor({4, 3, 5}, 44);
  const std::vector<std::pair<int, int>> pairs{{2, 0}, {1, 1}};
  Tensor fast = contract(a, b, pairs);
  Tensor ref = reference::contract(a, b, pairs);
  REQUIRE(fast.shape() == ref.shape());
  CHECK(max_abs_diff(fast, ref) < 1e-12);
}

TEST_CASE("contract: bilinearity") {
  Tensor a = random_tensor({3, 4}, 45), b = random_tensor({4, 2}, 46);
  const cplx alpha(0.7, -1.3);
  Tensor lhs = contract(a.scaled(alpha), b, {{1, 0}});
  Tensor rhs = contract(a, b, {{1, 0}}).scaled(alpha);
  CHECK(max_abs_diff(lhs, rhs) < 1e-13);
}

TEST_CASE("contract: dimension mismatch") {
  Tensor a = random_tensor({3, 4}, 47), b = random_tensor({5, 2}, 48);
  CHECK_THROWS_AS(contract(a, b, {{1, 0}}), ShapeError);
}
