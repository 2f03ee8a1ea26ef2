#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrc/dynamics.hpp"
#include "qrc/qcore.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/stability.hpp"

namespace qrc::harness {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using nlohmann::json;

struct SystemSection {
  dynamics::SystemSpec spec;
  double dt = 0.01;
  /// Leading exponent defining the Lyapunov time; the system default when absent.
  std::optional<double> lambda1;
  double spinup_lt = 100.0;
  /// Length of the ground-truth run used for target exponents and CLVs.
  double reference_lt = 1000.0;
  std::uint64_t reference_seed = 20240607;
};

struct SplitSection {
  double washout_lt = 5.0;
  double train_lt = 20.0;
  double test_lt = 10.0;
};

struct ReservoirSection {
  reservoir::Variant variant = reservoir::Variant::RFQRC;
  int qubits = 7;
  double epsilon = 0.21;
  std::vector<double> beta_grid{1e-12, 1e-9};
  double val_fraction = 0.2;
  double angle_scale = qcore::kDefaultAngleScale;
  double angle_offset = qcore::kDefaultAngleOffset;
  qcore::SlotFill fill = qcore::SlotFill::Cycle;
  qcore::NoiseKind noise = qcore::NoiseKind::None;
  long shots = 1;
  double noise_p = 0.0;
};

struct StabilitySection {
  /// Number of exponents; 0 means the system dimension.
  int n_exponents = 0;
  double skip_lt = 5.0;
  double window_lt = 200.0;
  /// Backward transient of the CLV iteration (the forward one is skip_lt).
  double clv_backward_lt = 5.0;
};

struct Tasks {
  bool forecast = true;
  bool spectrum = true;
  bool cle = true;
  bool clv = false;
};

enum class SweepAxis { None, Epsilon, Shots, NoiseP };
const char* to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepSection {
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;
  /// Leak rates crossed with the shot / noise axis; empty keeps the base rate.
  std::vector<double> epsilons;
};

struct ExperimentConfig {
  std::string experiment = "lorenz63";
  SystemSection system;
  SplitSection split;
  ReservoirSection reservoir;
  StabilitySection stability;
  Tasks tasks;
  SweepSection sweep;
  std::vector<std::uint64_t> seeds{0};
  int workers = 1;

  int n_exponents() const {
    return stability.n_exponents > 0 ? stability.n_exponents : system.spec.dim;
  }
  void validate() const;
};

json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::string& path);

/// One sweep point: the varied value (NaN without a sweep) and the leak rate.
struct SweepPoint {
  double value = 0.0;
  double epsilon = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  SweepPoint point;
  bool ok = false;
  std::string error;
  double beta = 0.0;
  double train_nmse = 0.0;
  Vector exponents;
  std::optional<double> ky;
  std::optional<double> max_cle;
  std::optional<stability::GSClass> gs_class;
  std::optional<double> vpt;
  /// Angle samples in degrees per CLV pair (only with the clv task).
  std::vector<std::vector<double>> clv_angles;
  Matrix clv_pdf;
};

struct Reference {
  Vector exponents;
  std::optional<double> ky;
  std::vector<std::vector<double>> clv_angles;
  Matrix clv_pdf;
};

struct ExperimentReport {
  ExperimentConfig config;
  Reference reference;
  std::vector<SweepPoint> points;
  /// Point-major, then seed order.
  std::vector<SeedResult> runs;
  double runtime_seconds = 0.0;

  std::size_t n_failed() const;
};

/// The dataset and trained reservoir for one seed.
struct TrainedRun {
  dynamics::Trajectory traj;
  dynamics::DatasetSplit split;
  reservoir::TrainedModel model;
  double train_nmse = 0.0;
};

dynamics::Trajectory make_trajectory(const ExperimentConfig& config, std::uint64_t seed);
reservoir::ReservoirConfig make_reservoir_config(const ExperimentConfig& config, std::uint64_t seed,
                                                 const SweepPoint& point);
TrainedRun train_seed(const ExperimentConfig& config, std::uint64_t seed, const SweepPoint& point);

/// Ground-truth exponents (and CLV angles when requested) on a long run.
Reference compute_reference(const ExperimentConfig& config);

/// Full pipeline for one (seed, sweep point). Stage errors are caught and
/// recorded in the result.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const SweepPoint& point,
                    const Reference& reference);

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config);

/// Runs every (point, seed) job on a bounded pool. Job failures are recorded
/// per run, never thrown; callers decide via n_failed().
ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentReport sweep_leak_rate(ExperimentConfig config, const std::vector<double>& epsilons);
ExperimentReport sweep_shots(ExperimentConfig config, const std::vector<double>& shot_counts);
ExperimentReport sweep_channel_noise(ExperimentConfig config, qcore::NoiseKind kind,
                                     const std::vector<double>& intensities);

struct Summary {
  std::size_t n_ok = 0;
  Vector exponent_mean, exponent_std;
  std::optional<double> ky_mean, ky_std, max_cle_mean, vpt_mean, vpt_std;
};

/// Mean and sample standard deviation over the successful runs of one point.
Summary summarize(const std::vector<const SeedResult*>& runs);

/// Writes `{experiment}_{dataset}.csv` files and `summary.json` into dir
/// (created if missing), plus `runtime.json` which is the only
/// non-deterministic output. Returns the written paths.
std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& dir);

}  // namespace qrc::harness
