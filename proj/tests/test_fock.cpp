#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "kerrmech/fock.hpp"
#include "test_support.hpp"

using namespace kerrmech;

TEST_SUITE("fock") {

TEST_CASE("truncated ladder operators") {
  const FockConfig q{2, 0};
  const Eigen::MatrixXcd a = ladder_op(q, Mode::Optical).dense();
  Eigen::MatrixXcd want(2, 2);
  want << 0.0, 1.0, 0.0, 0.0;
  CHECK((a - want).norm() == 0.0);

  const FockConfig d{5, 4};
  const FockOperator A = ladder_op(d, Mode::Optical);
  const FockOperator B = ladder_op(d, Mode::Mechanical);
  for (int n = 1; n < 5; ++n) {
    CHECK(std::abs(A.element(d.index(n - 1, 2), d.index(n, 2)) - std::sqrt(double(n))) < 1e-15);
  }
  CHECK(commutator(A, B).matrix().norm() == 0.0);
  CHECK(commutator(A, B.adjoint()).matrix().norm() == 0.0);

  const Eigen::MatrixXcd c = commutator(A, A.adjoint()).dense();
  for (int n = 0; n < 5; ++n) {
    for (int m = 0; m < 4; ++m) {
      const int i = d.index(n, m);
      CHECK(std::abs(c(i, i) - (n < 4 ? 1.0 : -4.0)) < 1e-14);
    }
  }
  CHECK_THROWS_AS(ladder_op(q, Mode::Mechanical), DimensionError);
  CHECK_THROWS_AS((FockConfig{1, 0}.validate()), DimensionError);
  CHECK_THROWS_AS(A + FockOperator::identity({5, 0}), DimensionError);
}

TEST_CASE("optomechanical Hamiltonian") {
  PhysicalParams p = testing::bistable_params(0.26);
  const FockConfig d{4, 3};
  const FockOperator h = build_hamiltonian_om(p, d);
  CHECK(h.is_hermitian());
  CHECK(std::abs(h.element(d.index(1, 0), d.index(1, 1)) - (-p.g0)) < 1e-14);
  CHECK(std::abs(h.element(d.index(2, 1), d.index(2, 2)) - (-p.g0 * 2.0 * std::sqrt(2.0))) < 1e-13);

  p.g0 = 0.0;
  p.eps = 0.0;
  const Eigen::MatrixXcd h0 = build_hamiltonian_om(p, d).dense();
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 3; ++m) {
      const int i = d.index(n, m);
      CHECK(std::abs(h0(i, i) - (p.omega_m * m - p.delta0 * n)) < 1e-13);
    }
  }
  CHECK((h0 - Eigen::MatrixXcd(h0.diagonal().asDiagonal())).norm() == 0.0);
  CHECK_THROWS_AS(build_hamiltonian_om(p, {4, 0}), DimensionError);
}

TEST_CASE("spectrum of the undriven Hamiltonian has the polaron form") {
  PhysicalParams p = testing::bistable_params(0.0);
  p.eps = 0.0;
  const FockConfig d{4, 40};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(build_hamiltonian_om(p, d).dense());
  const Eigen::VectorXd ev = es.eigenvalues();
  const double k = p.kerr_shift();
  for (int n = 0; n < 3; ++n) {
    for (int m = 0; m < 6; ++m) {
      const double want = -p.delta0 * n - k * n * n + p.omega_m * m;
      const double best = (ev.array() - want).abs().minCoeff();
      CHECK(best <= 1e-6 * p.omega_m);
    }
  }
}

TEST_CASE("Kerr Hamiltonian") {
  PhysicalParams p = testing::bistable_params(0.26);
  const FockConfig d{6, 0};
  CHECK(build_hamiltonian_kerr(p, d).is_hermitian());
  p.eps = 0.0;
  const Eigen::MatrixXcd h = build_hamiltonian_kerr(p, d).dense();
  const double k = p.kerr_shift();
  for (int n = 0; n < 6; ++n) CHECK(std::abs(h(n, n) - (-p.delta0 * n - k * n * n)) < 1e-13);
  CHECK((h(2, 2) - 2.0 * h(1, 1)).real() == doctest::Approx(-2.0 * k));
  CHECK_THROWS_AS(build_hamiltonian_kerr(p, {6, 2}), DimensionError);
}

TEST_CASE("polaron transformation check") {
  PhysicalParams p = testing::bistable_params(0.0);
  CHECK(p.g0 / p.omega_m == doctest::Approx(0.0516).epsilon(1e-2));
  CHECK(polaron_check(p, {6, 40}) <= 1e-6 * p.omega_m);

  PhysicalParams free = p;
  free.g0 = 0.0;
  CHECK(polaron_check(free, {6, 40}) < 1e-12);

  // The window reaching the mechanical truncation edge shows the artifact.
  const double inner = polaron_check(p, {6, 20}, 3, 6);
  const double edge = polaron_check(p, {6, 20}, 3, 20);
  CHECK(edge > inner);
  CHECK(edge > 1e-3 * p.omega_m);
}

TEST_CASE("density matrix invariants") {
  std::mt19937_64 rng(7);
  const FockConfig d{3, 2};
  CHECK_NOTHROW(DensityMatrix(d, testing::random_rho(6, rng)));
  CHECK_THROWS_AS(DensityMatrix(d, testing::random_rho(5, rng)), DimensionError);
  CHECK_THROWS_AS(DensityMatrix(d, 2.0 * testing::random_rho(6, rng)), std::domain_error);
  Eigen::MatrixXcd nonherm = testing::random_rho(6, rng);
  nonherm(0, 1) += 0.1;
  CHECK_THROWS_AS(DensityMatrix(d, nonherm), std::domain_error);
  Eigen::MatrixXcd neg = Eigen::MatrixXcd::Zero(6, 6);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(d, neg), std::domain_error);

  double min_ev = 0.0;
  const Eigen::MatrixXcd fixed = hermitize_and_clip(neg, &min_ev);
  CHECK(min_ev == doctest::Approx(-0.5));
  CHECK(std::abs(fixed.trace() - 1.0) < 1e-14);
  CHECK_NOTHROW(DensityMatrix(d, fixed));
}

}
