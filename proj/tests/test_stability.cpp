#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "qrc/dynamics.hpp"
#include "qrc/error.hpp"
#include "qrc/random.hpp"
#include "qrc/stability.hpp"

using namespace qrc;
using namespace qrc::stability;

TEST_CASE("sign-fixed QR") {
  Matrix w(5, 3);
  w << 1, 2, 3, -4, 5, 6, 7, -8, 9, 1, 0, 2, -3, 1, 1;
  auto [q, r] = positive_qr(w);
  CHECK((q * r - w).norm() < 1e-13);
  CHECK((q.transpose() * q - Matrix::Identity(3, 3)).norm() < 1e-14);
  CHECK(r.diagonal().minCoeff() > 0.0);
  CHECK(r.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm() == 0.0);

  Matrix degenerate = w;
  degenerate.col(2).setZero();
  try {
    positive_qr(degenerate);
    FAIL("expected degenerate tangent basis");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TangentDegenerate);
  }
}

TEST_CASE("exponents of a constant linear map are log|eigenvalue| / dt") {
  // Upper-triangular, non-normal: exponents come from the diagonal.
  Matrix a(3, 3);
  a << 1.5, 0.7, -2.0, 0.0, 0.9, 1.1, 0.0, 0.0, 0.3;
  SpectrumOptions o;
  o.n_exponents = 3;
  o.state_dim = 3;
  o.n_steps = 4000;
  o.n_skip = 100;
  o.dt = 0.5;
  auto run = lyapunov_spectrum([&] { return a; }, [] {}, o);
  CHECK(run.result.exponents(0) == doctest::Approx(std::log(1.5) / 0.5).epsilon(1e-3));
  CHECK(run.result.exponents(1) == doctest::Approx(std::log(0.9) / 0.5).epsilon(1e-3));
  CHECK(run.result.exponents(2) == doctest::Approx(std::log(0.3) / 0.5).epsilon(1e-3));
  // The full-dimension sum is exact at every step: log |det A| / dt.
  CHECK(run.result.exponents.sum() == doctest::Approx(std::log(1.5 * 0.9 * 0.3) / 0.5).epsilon(1e-12));
  CHECK(run.result.convergence.cols() == 4000);
}

TEST_CASE("in-place tangent step overload agrees with the dense one") {
  Matrix a = Matrix::Random(6, 6);
  SpectrumOptions o;
  o.n_exponents = 4;
  o.state_dim = 6;
  o.n_steps = 300;
  o.seed = 5;
  const auto dense = lyapunov_spectrum([&] { return a; }, [] {}, o);
  const auto inplace = lyapunov_spectrum([&](Matrix& b) { b = a * b; }, o);
  CHECK((dense.result.exponents - inplace.result.exponents).norm() < 1e-13);
}

TEST_CASE("Kaplan-Yorke dimension") {
  Vector l(3);
  l << 0.9056, 0.0, -14.5723;
  CHECK(kaplan_yorke(l) == doctest::Approx(oracle::kaplan_yorke({0.9056, 0.0, -14.5723})));
  CHECK(kaplan_yorke(l) == doctest::Approx(2.0 + 0.9056 / 14.5723));
  l << 1.0, 0.0, -2.0;
  CHECK(kaplan_yorke(l) == doctest::Approx(2.5));
  l << -0.1, -0.5, -2.0;
  CHECK(kaplan_yorke(l) == 0.0);
  l << 1.0, 0.5, -0.1;
  CHECK_THROWS_AS(kaplan_yorke(l), Error);
  l << -1.0, 0.5, -0.1;  // not descending
  CHECK_THROWS_AS(kaplan_yorke(l), Error);
  const std::vector<double> l96{1.201, 0.738, 0.085, 0.014, -0.416, -0.861, -1.333, -1.954, -2.872, -4.601};
  CHECK(kaplan_yorke(Eigen::Map<const Vector>(l96.data(), 10)) == doctest::Approx(oracle::kaplan_yorke(l96)));
}

TEST_CASE("angles between directions") {
  Vector a(3), b(3);
  a << 1, 0, 0;
  b << 0, 2, 0;
  CHECK(subspace_angle_deg(a, b) == doctest::Approx(90.0));
  CHECK(subspace_angle_deg(a, -3.0 * a) == doctest::Approx(0.0));
  b << 1, 1, 0;
  CHECK(subspace_angle_deg(a, b) == doctest::Approx(45.0));
  CHECK(subspace_angle_deg(a, -b) == doctest::Approx(45.0));
}

TEST_CASE("Wasserstein-1 of empirical samples") {
  std::vector<double> a{1, 2, 3, 4}, b{3, 4, 5, 6};
  CHECK(wasserstein1(a, b) == doctest::Approx(2.0));
  CHECK(wasserstein1(a, a) == 0.0);
  CHECK(wasserstein1({0.0}, {1.0, 2.0}) == doctest::Approx(1.5));
  CHECK_THROWS_AS(wasserstein1({}, a), Error);
}

TEST_CASE("covariant vectors of a constant map are its eigenvectors") {
  // Eigenvalues 2, 1, 0.5 with a non-orthogonal eigenbasis.
  Matrix v(3, 3);
  v << 1, 1, 0, 0, 1, 1, 1, 0, 1;
  Vector lam(3);
  lam << 2.0, 1.0, 0.5;
  const Matrix a = v * lam.asDiagonal() * v.inverse();
  SpectrumOptions o;
  o.n_exponents = 3;
  o.state_dim = 3;
  o.n_steps = 200;
  o.n_skip = 50;
  o.dt = 1.0;
  o.save_factors = true;
  const auto run = lyapunov_spectrum([&] { return a; }, [] {}, o);
  const auto clv = clv_backward(run.history, 50, 1);
  REQUIRE(!clv.vectors.empty());
  for (const auto& m : clv.vectors)
    for (int i = 0; i < 3; ++i) CHECK(subspace_angle_deg(m.col(i), v.col(i)) < 1e-6);
}

TEST_CASE("covariant vectors map onto each other along a chaotic flow") {
  dynamics::TrajectoryOptions to;
  to.n_steps = 2000;
  to.n_discard = 500;
  const auto spec = dynamics::SystemSpec::lorenz63();
  const auto traj = dynamics::generate_trajectory(spec, to);
  Eigen::Index index = 0;
  SpectrumOptions o;
  o.n_exponents = 3;
  o.state_dim = 3;
  o.n_steps = 1800;
  o.n_skip = 100;
  o.save_factors = true;
  const auto run = lyapunov_spectrum(
      [&] { return dynamics::rk4_step_jacobian(spec, traj.states.row(index).transpose(), to.dt); },
      [&] { ++index; }, o);
  const auto clv = clv_backward(run.history, 300, 2);
  // vectors[k] is the basis after n_skip + first_step + k + 1 steps.
  double worst = 0;
  for (std::size_t k = 0; k + 1 < clv.vectors.size(); k += 7) {
    const auto at = o.n_skip + clv.first_step + static_cast<Eigen::Index>(k) + 1;
    const Matrix j = dynamics::rk4_step_jacobian(spec, traj.states.row(at).transpose(), to.dt);
    for (int i = 0; i < 3; ++i) {
      const Vector mapped = (j * clv.vectors[k].col(i)).normalized();
      const Vector next = clv.vectors[k + 1].col(i);
      worst = std::max(worst, std::min((mapped - next).norm(), (mapped + next).norm()));
    }
  }
  CHECK(worst < 1e-6);
  const auto stats = clv_angles(clv);
  CHECK(stats.pairs.size() == 3);
  CHECK(stats.angles.minCoeff() >= 0.0);
  CHECK(stats.angles.maxCoeff() <= 90.0);
  for (Eigen::Index p = 0; p < 3; ++p) CHECK(stats.pdf.row(p).sum() == doctest::Approx(1.0));
}

TEST_CASE("generalized-synchronization classification") {
  CHECK(classify_gs(0.1, -14.5).gs_class == GSClass::NoGS);
  CHECK(classify_gs(0.0, -14.5).gs_class == GSClass::NoGS);
  CHECK(classify_gs(-20.0, -14.5).gs_class == GSClass::DGS);
  CHECK(classify_gs(-3.0, -14.5).gs_class == GSClass::GSNonDifferentiable);
  CHECK(classify_gs(-std::numeric_limits<double>::infinity(), -14.5).gs_class == GSClass::DGS);
  CHECK_THROWS_AS(classify_gs(-1.0, 0.5), Error);
  CHECK(std::string(to_string(GSClass::DGS)) == "dgs");
}
