#include "qrc/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qrc/error.hpp"
#include "qrc/random.hpp"
#include "qrc/stability.hpp"

namespace qrc::dynamics {

std::string to_string(SystemKind kind) {
  return kind == SystemKind::Lorenz63 ? "lorenz63" : "lorenz96";
}

SystemKind system_kind_from_string(const std::string& name) {
  if (name == "lorenz63") return SystemKind::Lorenz63;
  if (name == "lorenz96") return SystemKind::Lorenz96;
  throw Error(ErrorCode::InvalidArgument, "unknown system kind '" + name + "'");
}

SystemSpec SystemSpec::lorenz63(double sigma, double rho, double beta) {
  return SystemSpec{SystemKind::Lorenz63, {sigma, rho, beta}, 3};
}

SystemSpec SystemSpec::lorenz96(int dim, double forcing) {
  return SystemSpec{SystemKind::Lorenz96, {forcing}, dim};
}

void SystemSpec::validate() const {
  for (double p : params) require(std::isfinite(p), "system parameters must be finite");
  if (kind == SystemKind::Lorenz63) {
    require(dim == 3, "Lorenz63 has dimension 3");
    require(params.size() == 3, "Lorenz63 takes (sigma, rho, beta)");
  } else {
    require(dim >= 4, "Lorenz96 needs at least 4 components");
    require(params.size() == 1, "Lorenz96 takes (forcing)");
  }
}

std::optional<double> SystemSpec::default_lambda1() const {
  if (kind == SystemKind::Lorenz63 && params == std::vector<double>{10.0, 28.0, 8.0 / 3.0})
    return 0.9056;
  if (kind == SystemKind::Lorenz96 && params.size() == 1 && params[0] == 8.0) {
    if (dim == 10) return 1.2;
    if (dim == 20) return 1.5;
  }
  return std::nullopt;
}

Vector MinMaxScaler::scale(const Vector& x) const {
  return (x - min).cwiseQuotient(max - min);
}

Vector MinMaxScaler::unscale(const Vector& s) const {
  return min + s.cwiseProduct(max - min);
}

namespace {

void check_dim(const SystemSpec& spec, const Vector& x) {
  if (x.size() != spec.dim)
    throw Error(ErrorCode::InvalidArgument, "state has dimension " + std::to_string(x.size()) +
                                                ", system expects " + std::to_string(spec.dim));
}

// Periodic index for Lorenz96.
inline Eigen::Index wrap(Eigen::Index i, Eigen::Index m) { return ((i % m) + m) % m; }

}  // namespace

Vector rhs(const SystemSpec& spec, const Vector& x) {
  check_dim(spec, x);
  Vector dx(x.size());
  if (spec.kind == SystemKind::Lorenz63) {
    const double sigma = spec.params[0], rho = spec.params[1], beta = spec.params[2];
    dx(0) = sigma * (x(1) - x(0));
    dx(1) = x(0) * (rho - x(2)) - x(1);
    dx(2) = x(0) * x(1) - beta * x(2);
  } else {
    const double forcing = spec.params[0];
    const Eigen::Index m = x.size();
    for (Eigen::Index i = 0; i < m; ++i)
      dx(i) = (x(wrap(i + 1, m)) - x(wrap(i - 2, m))) * x(wrap(i - 1, m)) - x(i) + forcing;
  }
  return dx;
}

Matrix system_jacobian(const SystemSpec& spec, const Vector& x) {
  check_dim(spec, x);
  const Eigen::Index m = x.size();
  Matrix jac = Matrix::Zero(m, m);
  if (spec.kind == SystemKind::Lorenz63) {
    const double sigma = spec.params[0], rho = spec.params[1], beta = spec.params[2];
    jac << -sigma, sigma, 0.0,
           rho - x(2), -1.0, -x(0),
           x(1), x(0), -beta;
  } else {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index ip1 = wrap(i + 1, m), im1 = wrap(i - 1, m), im2 = wrap(i - 2, m);
      jac(i, ip1) += x(im1);
      jac(i, im2) -= x(im1);
      jac(i, im1) += x(ip1) - x(im2);
      jac(i, i) -= 1.0;
    }
  }
  return jac;
}

namespace {

void check_finite(const Vector& v, const char* stage) {
  if (!v.allFinite())
    throw Error(ErrorCode::NumericOverflow, std::string("non-finite value in RK4 ") + stage);
}

}  // namespace

Vector rk4_step(const SystemSpec& spec, const Vector& x, double dt) {
  require(dt > 0.0, "time step must be positive");
  const Vector k1 = rhs(spec, x);
  check_finite(k1, "stage 1");
  const Vector k2 = rhs(spec, x + 0.5 * dt * k1);
  check_finite(k2, "stage 2");
  const Vector k3 = rhs(spec, x + 0.5 * dt * k2);
  check_finite(k3, "stage 3");
  const Vector k4 = rhs(spec, x + dt * k3);
  check_finite(k4, "stage 4");
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix rk4_step_jacobian(const SystemSpec& spec, const Vector& x, double dt) {
  require(dt > 0.0, "time step must be positive");
  const Eigen::Index m = x.size();
  const Matrix id = Matrix::Identity(m, m);
  const Vector k1 = rhs(spec, x);
  const Vector x2 = x + 0.5 * dt * k1;
  const Vector k2 = rhs(spec, x2);
  const Vector x3 = x + 0.5 * dt * k2;
  const Vector k3 = rhs(spec, x3);
  const Vector x4 = x + dt * k3;

  const Matrix dk1 = system_jacobian(spec, x);
  const Matrix dk2 = system_jacobian(spec, x2) * (id + 0.5 * dt * dk1);
  const Matrix dk3 = system_jacobian(spec, x3) * (id + 0.5 * dt * dk2);
  const Matrix dk4 = system_jacobian(spec, x4) * (id + dt * dk3);
  return id + dt / 6.0 * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4);
}

Trajectory generate_trajectory(const SystemSpec& spec, const TrajectoryOptions& options) {
  spec.validate();
  require(options.dt > 0.0, "time step must be positive");
  require(options.n_discard >= 0, "discard count must be non-negative");
  if (options.n_steps <= 0) throw Error(ErrorCode::EmptyTrajectory, "no steps requested");

  Vector x;
  if (options.x0) {
    x = *options.x0;
    check_dim(spec, x);
    require(x.allFinite(), "initial condition must be finite");
  } else {
    Rng rng = make_rng(options.seed, Stream::InitialCondition);
    std::normal_distribution<double> normal(0.0, 1.0);
    x.resize(spec.dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  }

  auto advance = [&](Eigen::Index step) {
    x = rk4_step(spec, x, options.dt);
    if (x.cwiseAbs().maxCoeff() > kDivergenceBound)
      throw Error(ErrorCode::IntegrationDiverged,
                  "trajectory left |x| <= 1e6 at step " + std::to_string(step));
  };

  for (Eigen::Index i = 0; i < options.n_discard; ++i) advance(i);

  Trajectory traj;
  traj.dt = options.dt;
  traj.seed = options.seed;
  traj.states.resize(options.n_steps, spec.dim);
  for (Eigen::Index i = 0; i < options.n_steps; ++i) {
    traj.states.row(i) = x.transpose();
    if (i + 1 < options.n_steps) advance(options.n_discard + i);
  }

  if (options.lambda1) {
    traj.lambda1 = *options.lambda1;
  } else if (auto l1 = spec.default_lambda1()) {
    traj.lambda1 = *l1;
  } else {
    traj.lambda1 = reference_lyapunov(spec, traj, 1)(0);
  }
  require(traj.lambda1 > 0.0, "leading exponent must be positive to define a Lyapunov time");
  traj.lt_steps = std::max(1, static_cast<int>(std::lround(1.0 / (traj.lambda1 * traj.dt))));
  return traj;
}

Vector reference_lyapunov(const SystemSpec& spec, const Trajectory& traj, int n_exponents,
                          Eigen::Index n_skip) {
  require(n_exponents >= 1 && n_exponents <= spec.dim, "exponent count must lie in [1, D]");
  require(traj.n_steps() > n_skip + 1, "trajectory too short for the requested skip");
  Eigen::Index index = 0;
  auto jacobian = [&] {
    return rk4_step_jacobian(spec, traj.states.row(index).transpose(), traj.dt);
  };
  auto advance = [&] { ++index; };
  stability::SpectrumOptions options;
  options.n_exponents = n_exponents;
  options.state_dim = spec.dim;
  options.n_skip = n_skip;
  options.n_steps = traj.n_steps() - 1 - n_skip;
  options.dt = traj.dt;
  options.seed = traj.seed;
  return stability::lyapunov_spectrum(jacobian, advance, options).result.exponents;
}

DatasetSplit split_and_scale(const Trajectory& traj, double washout_lt, double train_lt,
                             double test_lt) {
  require(washout_lt >= 0.0 && train_lt > 0.0 && test_lt >= 0.0, "split lengths must be non-negative");
  const auto to_steps = [&](double lt) {
    return static_cast<Eigen::Index>(std::llround(lt * traj.lt_steps));
  };
  DatasetSplit split;
  split.washout = {0, to_steps(washout_lt)};
  split.train = {split.washout.end, split.washout.end + to_steps(train_lt)};
  split.test = {split.train.end, split.train.end + to_steps(test_lt)};
  // The last training column is paired with the sample that follows it.
  const Eigen::Index needed = std::max(split.test.end, split.train.end + 1);
  require(needed <= traj.n_steps(), "trajectory has " + std::to_string(traj.n_steps()) +
                                        " steps, split needs " + std::to_string(needed));

  const auto train = traj.states.middleRows(split.train.begin, split.train.size());
  split.scaler.min = train.colwise().minCoeff().transpose();
  split.scaler.max = train.colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < traj.dim(); ++j) {
    if (!(split.scaler.max(j) > split.scaler.min(j)))
      throw Error(ErrorCode::DegenerateScaler,
                  "component " + std::to_string(j) + " is constant over the training range");
  }
  return split;
}

void write_trajectory_csv(const Trajectory& traj, const SystemSpec& spec, const std::string& csv_path,
                          const std::string& sidecar_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw Error(ErrorCode::Io, "cannot open " + csv_path);
  csv << 't';
  for (Eigen::Index j = 0; j < traj.dim(); ++j) csv << ",x" << (j + 1);
  csv << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < traj.n_steps(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(i) * traj.dt);
    csv << buf;
    for (Eigen::Index j = 0; j < traj.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.states(i, j));
      csv << ',' << buf;
    }
    csv << '\n';
  }
  if (!csv) throw Error(ErrorCode::Io, "write failed for " + csv_path);

  nlohmann::json meta{{"kind", to_string(spec.kind)},
                      {"params", spec.params},
                      {"dt", traj.dt},
                      {"lambda1", traj.lambda1},
                      {"seed", traj.seed}};
  std::ofstream side(sidecar_path);
  if (!side) throw Error(ErrorCode::Io, "cannot open " + sidecar_path);
  side << meta.dump(2) << '\n';
}

Trajectory read_trajectory_csv(const std::string& csv_path, const std::string& sidecar_path,
                               SystemSpec* spec_out) {
  std::ifstream side(sidecar_path);
  if (!side) throw Error(ErrorCode::Io, "cannot open " + sidecar_path);
  const auto meta = nlohmann::json::parse(side);

  std::ifstream csv(csv_path);
  if (!csv) throw Error(ErrorCode::Io, "cannot open " + csv_path);
  std::string line;
  std::getline(csv, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (!first) row.push_back(std::stod(cell));
      first = false;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyTrajectory, csv_path + " has no rows");

  Trajectory traj;
  traj.states.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw Error(ErrorCode::Io, "ragged row in " + csv_path);
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      traj.states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  traj.dt = meta.at("dt").get<double>();
  traj.lambda1 = meta.at("lambda1").get<double>();
  traj.seed = meta.at("seed").get<std::uint64_t>();
  traj.lt_steps = std::max(1, static_cast<int>(std::lround(1.0 / (traj.lambda1 * traj.dt))));
  if (spec_out) {
    spec_out->kind = system_kind_from_string(meta.at("kind").get<std::string>());
    spec_out->params = meta.at("params").get<std::vector<double>>();
    spec_out->dim = static_cast<int>(traj.dim());
  }
  return traj;
}

}  // namespace qrc::dynamics
