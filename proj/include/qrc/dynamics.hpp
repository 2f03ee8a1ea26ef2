#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qrc::dynamics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class SystemKind { Lorenz63, Lorenz96 };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

/// Lorenz63 params are (sigma, rho, beta); Lorenz96 params are (forcing).
struct SystemSpec {
  SystemKind kind = SystemKind::Lorenz63;
  std::vector<double> params{10.0, 28.0, 8.0 / 3.0};
  int dim = 3;

  static SystemSpec lorenz63(double sigma = 10.0, double rho = 28.0, double beta = 8.0 / 3.0);
  static SystemSpec lorenz96(int dim, double forcing = 8.0);

  void validate() const;

  /// Leading exponent used to define the Lyapunov time, if a reference value
  /// is known for this configuration.
  std::optional<double> default_lambda1() const;
};

/// Time-indexed states, one row per step.
struct Trajectory {
  Matrix states;
  double dt = 0.01;
  double lambda1 = 1.0;
  int lt_steps = 1;
  std::uint64_t seed = 0;

  Eigen::Index n_steps() const { return states.rows(); }
  Eigen::Index dim() const { return states.cols(); }
};

/// Half-open index range [begin, end) into a Trajectory.
struct IndexRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  Eigen::Index size() const { return end - begin; }
};

/// Per-component affine map of the training range onto [0, 1].
struct MinMaxScaler {
  Vector min;
  Vector max;

  Vector scale(const Vector& x) const;
  Vector unscale(const Vector& s) const;
  /// d(scaled)/d(physical), one entry per component.
  Vector slope() const { return (max - min).cwiseInverse(); }
};

struct DatasetSplit {
  IndexRange washout;
  IndexRange train;
  IndexRange test;
  MinMaxScaler scaler;
};

Vector rhs(const SystemSpec& spec, const Vector& x);
Matrix system_jacobian(const SystemSpec& spec, const Vector& x);

Vector rk4_step(const SystemSpec& spec, const Vector& x, double dt);

/// Exact Jacobian of the discrete RK4 map, obtained by differentiating the
/// four stages. This is the tangent propagator of the time-discrete system.
Matrix rk4_step_jacobian(const SystemSpec& spec, const Vector& x, double dt);

inline constexpr double kDivergenceBound = 1e6;

struct TrajectoryOptions {
  std::optional<Vector> x0;
  double dt = 0.01;
  Eigen::Index n_steps = 0;
  Eigen::Index n_discard = 0;
  std::uint64_t seed = 0;
  /// Overrides the reference leading exponent; when neither this nor a
  /// default exists it is estimated from the generated data.
  std::optional<double> lambda1;
};

Trajectory generate_trajectory(const SystemSpec& spec, const TrajectoryOptions& options);

/// Ground-truth exponents of the discrete RK4 flow along `traj`, descending,
/// continuous-time units.
Vector reference_lyapunov(const SystemSpec& spec, const Trajectory& traj, int n_exponents,
                          Eigen::Index n_skip = 0);

DatasetSplit split_and_scale(const Trajectory& traj, double washout_lt, double train_lt,
                             double test_lt);

// CSV `t,x1,...,xD` plus a JSON sidecar with {kind, params, dt, lambda1, seed}.
void write_trajectory_csv(const Trajectory& traj, const SystemSpec& spec, const std::string& csv_path,
                          const std::string& sidecar_path);
Trajectory read_trajectory_csv(const std::string& csv_path, const std::string& sidecar_path,
                               SystemSpec* spec_out = nullptr);

}  // namespace qrc::dynamics
