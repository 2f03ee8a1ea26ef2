#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "qrc/dynamics.hpp"
#include "qrc/error.hpp"

using namespace qrc;
using namespace qrc::dynamics;

TEST_CASE("Lorenz-63 right-hand side") {
  const auto spec = SystemSpec::lorenz63();
  Vector x(3);
  x << 1.0, 2.0, 3.0;
  const Vector f = rhs(spec, x);
  CHECK(f(0) == doctest::Approx(10.0 * (2.0 - 1.0)));
  CHECK(f(1) == doctest::Approx(1.0 * (28.0 - 3.0) - 2.0));
  CHECK(f(2) == doctest::Approx(1.0 * 2.0 - 8.0));
}

TEST_CASE("Lorenz-96 right-hand side wraps cyclically") {
  const auto spec = SystemSpec::lorenz96(5, 8.0);
  Vector x(5);
  x << 1, 2, 3, 4, 5;
  const Vector f = rhs(spec, x);
  for (int i = 0; i < 5; ++i) {
    const double ref = (x((i + 1) % 5) - x((i + 3) % 5)) * x((i + 4) % 5) - x(i) + 8.0;
    CHECK(f(i) == doctest::Approx(ref));
  }
  CHECK_THROWS_AS(SystemSpec::lorenz96(3).validate(), Error);
}

TEST_CASE("analytic Jacobians match central differences") {
  for (const auto& spec : {SystemSpec::lorenz63(), SystemSpec::lorenz96(10)}) {
    Vector x = Vector::LinSpaced(spec.dim, -3.0, 7.0);
    const Matrix fd_rhs = oracle::central_difference([&](const Vector& y) { return rhs(spec, y); }, x, 1e-6);
    CHECK((system_jacobian(spec, x) - fd_rhs).norm() / fd_rhs.norm() < 1e-8);
    const Matrix fd_step =
        oracle::central_difference([&](const Vector& y) { return rk4_step(spec, y, 0.01); }, x, 1e-6);
    CHECK((rk4_step_jacobian(spec, x, 0.01) - fd_step).norm() / fd_step.norm() < 1e-8);
  }
}

TEST_CASE("trajectories are reproducible per seed") {
  TrajectoryOptions o;
  o.n_steps = 200;
  o.n_discard = 100;
  o.seed = 3;
  const auto spec = SystemSpec::lorenz63();
  const auto a = generate_trajectory(spec, o), b = generate_trajectory(spec, o);
  CHECK(a.states == b.states);
  CHECK(a.n_steps() == 200);
  CHECK(a.lt_steps == 110);
  o.seed = 4;
  CHECK(generate_trajectory(spec, o).states != a.states);
  // Consecutive rows are one RK4 step apart.
  CHECK((rk4_step(spec, a.states.row(10).transpose(), o.dt) - a.states.row(11).transpose()).norm() < 1e-12);
}

TEST_CASE("trajectory errors") {
  TrajectoryOptions o;
  CHECK_THROWS_AS(generate_trajectory(SystemSpec::lorenz63(), o), Error);  // zero steps
  o.n_steps = 2000;
  o.dt = 0.5;
  try {
    generate_trajectory(SystemSpec::lorenz63(), o);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IntegrationDiverged);
  }
}

TEST_CASE("min-max scaling maps the training range onto [0, 1]") {
  TrajectoryOptions o;
  o.n_steps = 110 * 10 + 1;
  o.n_discard = 500;
  const auto traj = generate_trajectory(SystemSpec::lorenz63(), o);
  const auto split = split_and_scale(traj, 2.0, 5.0, 3.0);
  CHECK(split.washout.size() == 220);
  CHECK(split.train.begin == split.washout.end);
  CHECK(split.test.begin == split.train.end);
  double lo = 1, hi = 0;
  for (Eigen::Index k = split.train.begin; k < split.train.end; ++k) {
    const Vector s = split.scaler.scale(traj.states.row(k).transpose());
    lo = std::min(lo, s.minCoeff());
    hi = std::max(hi, s.maxCoeff());
    CHECK((split.scaler.unscale(s) - traj.states.row(k).transpose()).norm() < 1e-12);
  }
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(1.0));
}

TEST_CASE("constant data cannot be scaled") {
  // x_i = F is a fixed point of Lorenz-96.
  TrajectoryOptions o;
  o.n_steps = 600;
  o.x0 = Vector::Constant(5, 8.0);
  o.lambda1 = 1.0;
  const auto traj = generate_trajectory(SystemSpec::lorenz96(5), o);
  try {
    split_and_scale(traj, 1.0, 2.0, 1.0);
    FAIL("expected degenerate scaler");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateScaler);
  }
}

TEST_CASE("CSV round trip is lossless") {
  TrajectoryOptions o;
  o.n_steps = 50;
  o.seed = 9;
  o.lambda1 = 1.5;
  const auto spec = SystemSpec::lorenz96(6);
  const auto traj = generate_trajectory(spec, o);
  const auto dir = std::filesystem::temp_directory_path() / "qrc_test_csv";
  std::filesystem::create_directories(dir);
  write_trajectory_csv(traj, spec, (dir / "t.csv").string(), (dir / "t.json").string());
  SystemSpec back_spec;
  const auto back = read_trajectory_csv((dir / "t.csv").string(), (dir / "t.json").string(), &back_spec);
  CHECK(back.states == traj.states);
  CHECK(back.dt == traj.dt);
  CHECK(back_spec.dim == 6);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ground-truth exponents agree with an independent Benettin loop") {
  TrajectoryOptions o;
  o.n_steps = 20000;
  o.n_discard = 1000;
  const auto spec = SystemSpec::lorenz63();
  const auto traj = generate_trajectory(spec, o);
  const Vector lib = reference_lyapunov(spec, traj, 3);
  const Vector ref = oracle::benettin(
      [&](long k) { return rk4_step_jacobian(spec, traj.states.row(k).transpose(), o.dt); }, traj.n_steps() - 1, 3,
      o.dt);
  // Different initial bases: individual exponents agree up to the transient,
  // while the full-dimension sum (log |det J|) is basis-independent.
  CHECK((lib - ref).lpNorm<Eigen::Infinity>() < 0.02);
  CHECK(std::abs(lib.sum() - ref.sum()) < 1e-9);
  CHECK(lib.sum() == doctest::Approx(-41.0 / 3.0).epsilon(0.01));
}
