#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrc/dynamics.hpp"
#include "qrc/qcore.hpp"
#include "qrc/random.hpp"

namespace qrc::reservoir {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Variant { RFQRC, QRC };
const char* to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Scaled inputs are clamped to this band before encoding.
inline constexpr double kInputLow = -0.05;
inline constexpr double kInputHigh = 1.05;

struct ReservoirConfig {
  qcore::CircuitLayout layout;
  double epsilon = 0.21;
  Variant variant = Variant::RFQRC;
  /// n x N_r, unit-norm rows; only used by the recurrent variant.
  Matrix projection;
  std::vector<double> beta_grid{1e-12, 1e-9};
  qcore::NoiseModel noise;

  Eigen::Index reservoir_dim() const { return layout.reservoir_dim(); }
  bool recurrent() const { return variant == Variant::QRC; }
  void validate() const;
};

/// Gaussian rows normalized to unit length, from the projection stream.
Matrix random_projection(int n_qubits, Eigen::Index reservoir_dim, std::uint64_t seed);

Vector clamp_input(const Vector& u_scaled);

/// Stateful wrapper around a configuration: owns the shot-noise stream and,
/// when possible, a compiled noisy readout.
class Reservoir {
 public:
  explicit Reservoir(ReservoirConfig config);

  const ReservoirConfig& config() const { return config_; }

  /// P(r) angles pi * tanh(Proj r); empty for the recurrence-free variant.
  Vector recurrence_angles(const Vector& r) const;

  /// Circuit probabilities for state r and scaled input u (clamped), with the
  /// configured noise. Sampling noise advances the internal stream.
  Vector probabilities(const Vector& r, const Vector& u_scaled);

  /// Probabilities for explicit encoding and recurrence angles, using the
  /// configured channel noise but never shot noise.
  Vector exact_probabilities(const std::vector<double>& slot_angles, const Vector* rec) const;

  /// r' = (1 - eps) r + eps p(r, u).
  Vector step(const Vector& r, const Vector& u_scaled);

 private:
  ReservoirConfig config_;
  Rng shots_;
  std::optional<qcore::NoisyProductReadout> compiled_;
};

struct OpenLoopResult {
  /// N_r x N_tr, column i is the state after consuming train input i.
  Matrix states;
  /// D x N_tr physical next-step targets.
  Matrix targets;
  Vector final_state;
};

/// Teacher-forced run from r_init (zero when absent): washout inputs are
/// consumed and discarded, then the train range is collected.
OpenLoopResult open_loop_run(const dynamics::Trajectory& traj, const dynamics::DatasetSplit& split,
                             Reservoir& reservoir, const Vector* r_init = nullptr);

/// Solves (R R^T + beta I) W = R U^T. Returns N_r x D.
Matrix train_readout(const Matrix& states, const Matrix& targets, double beta);

/// Holds out the trailing `val_fraction` of the columns; smallest one-step
/// MSE wins, ties go to the smaller beta.
double select_beta(const Matrix& states, const Matrix& targets, const std::vector<double>& grid,
                   double val_fraction = 0.2);

/// Autonomous forecast: u_hat = W^T r, fed back through the scaler. Rows are
/// predictions for consecutive steps.
Matrix closed_loop_run(const Vector& r_init, const Matrix& w_out, Reservoir& reservoir,
                       Eigen::Index n_steps, const dynamics::MinMaxScaler& scaler,
                       Vector* final_state = nullptr);

/// Distance ratios |dr(t+1)| / |dr(t)| for two states driven by the same
/// scaled inputs (rows of `drive`). Stops once the distance underflows 1e-14.
std::vector<double> esp_contraction_test(Reservoir& reservoir, const Matrix& drive,
                                         const Vector& r1, const Vector& r2);

inline constexpr double kVptThreshold = 0.4;

/// Valid prediction time in Lyapunov times; the horizon if never exceeded.
double vpt(const Matrix& prediction, const Matrix& truth, double dt, double lambda1);

struct TrainedModel {
  ReservoirConfig config;
  dynamics::MinMaxScaler scaler;
  Matrix w_out;
  Vector final_state;
  double beta = 0.0;
};

}  // namespace qrc::reservoir
