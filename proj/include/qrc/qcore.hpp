#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrc/random.hpp"

namespace qrc::qcore {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Matrix2c = Eigen::Matrix2cd;

/// Qubit 0 is the most significant bit of the computational-basis index.
class QuantumState {
 public:
  /// |0...0> on `n_qubits` qubits.
  explicit QuantumState(int n_qubits);
  static QuantumState from_amplitudes(Eigen::VectorXcd amplitudes);

  int n_qubits() const { return n_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  double norm() const { return amps_.norm(); }

  void apply_ry(int qubit, double angle);
  void apply_cnot(int control, int target);

 private:
  QuantumState() = default;
  int n_ = 0;
  Eigen::VectorXcd amps_;
};

QuantumState apply_ry(QuantumState state, int qubit, double angle);
QuantumState apply_cnot(QuantumState state, int control, int target);

/// Hermitian, unit-trace operator on n qubits.
class DensityMatrix {
 public:
  explicit DensityMatrix(int n_qubits);
  static DensityMatrix from_matrix(Eigen::MatrixXcd rho);
  static DensityMatrix from_state(const QuantumState& state);

  int n_qubits() const { return n_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Complex trace() const { return rho_.trace(); }
  Vector diagonal() const { return rho_.diagonal().real(); }

  void apply_ry(int qubit, double angle);
  void apply_cnot(int control, int target);
  /// rho <- sum_m K_m rho K_m^dagger on one qubit.
  void apply_kraus(int qubit, const std::vector<Matrix2c>& kraus);
  /// X <- sum_m K_m^dagger X K_m on one qubit (Heisenberg picture).
  void apply_kraus_adjoint(int qubit, const std::vector<Matrix2c>& kraus);

  double hermiticity_error() const { return (rho_ - rho_.adjoint()).norm(); }

 private:
  DensityMatrix() = default;
  void apply_1q_left(int qubit, const Matrix2c& u);
  int n_ = 0;
  Eigen::MatrixXcd rho_;
};

/// How encoding slots beyond the D input components are populated.
enum class SlotFill {
  /// Unused slots carry angle 0.
  Zero,
  /// Slot s carries component s mod D (inputs re-uploaded on idle qubits).
  Cycle,
};

const char* to_string(SlotFill fill);
SlotFill slot_fill_from_string(const std::string& name);

inline constexpr double kPi = 3.14159265358979323846;

/// Default encoding: angle = offset + scale * u, idle qubits re-upload the
/// inputs. A small scale around 0.8 rad keeps each Ry away from the poles;
/// with offset 0 the 10-D Lorenz-96 readout is capacity-limited.
inline constexpr double kDefaultAngleScale = 0.15;
inline constexpr double kDefaultAngleOffset = 0.8;

struct CircuitLayout {
  int n_qubits = 0;
  int input_dim = 0;
  std::vector<double> alpha;
  SlotFill fill = SlotFill::Cycle;
  double angle_scale = kDefaultAngleScale;
  double angle_offset = kDefaultAngleOffset;
  std::uint64_t seed = 0;

  /// alpha ~ U[0, 4 pi] from the circuit-angle stream of `seed`.
  static CircuitLayout random(int n_qubits, int input_dim, std::uint64_t seed,
                              SlotFill fill = SlotFill::Cycle,
                              double angle_scale = kDefaultAngleScale,
                              double angle_offset = kDefaultAngleOffset);

  void validate() const;
  int encoding_layers() const { return (input_dim + n_qubits - 1) / n_qubits; }
  int n_slots() const { return encoding_layers() * n_qubits; }
  Eigen::Index reservoir_dim() const { return Eigen::Index{1} << n_qubits; }
  /// Input component driving `slot`, or -1 for an idle slot.
  int slot_component(int slot) const;
  /// All ordered pairs (i, j), i < j, lexicographic.
  std::vector<std::pair<int, int>> entangler() const;
};

enum class NoiseKind { None, Sampling, Depolarizing, AmplitudeDamping };

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  long shots = 1;
  double p = 0.0;
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel sampling(long shots, std::uint64_t seed) {
    return {NoiseKind::Sampling, shots, 0.0, seed};
  }
  static NoiseModel depolarizing(double p) { return {NoiseKind::Depolarizing, 1, p, 0}; }
  static NoiseModel amplitude_damping(double p) { return {NoiseKind::AmplitudeDamping, 1, p, 0}; }

  bool is_channel() const {
    return kind == NoiseKind::Depolarizing || kind == NoiseKind::AmplitudeDamping;
  }
  void validate() const;
};

/// One angle per encoding slot, layer-major: angle = angle_offset + angle_scale * u_j.
/// Idle slots carry angle 0.
std::vector<double> encode_angles(const Vector& u_scaled, const CircuitLayout& layout);

/// P(r) (optional) -> per encoding layer [Ry on every qubit, CNOT block] ->
/// V(alpha) = [Ry(alpha_q) on every qubit, CNOT block], from |0...0>.
QuantumState run_circuit_pure(const Vector& u_scaled, const Vector* recurrence_angles,
                              const CircuitLayout& layout);
QuantumState run_encoded_pure(const std::vector<double>& slot_angles,
                              const Vector* recurrence_angles, const CircuitLayout& layout);

Vector measure_probabilities(const QuantumState& state);

/// Empirical frequencies of `shots` draws from `probs`.
Vector sample_shots(const Vector& probs, long shots, Rng& rng);

std::array<Matrix2c, 2> amplitude_damping_kraus(double p);
/// Pauli form: sqrt(1 - 3p/4) I, sqrt(p/4) {X, Y, Z}.
std::array<Matrix2c, 4> depolarizing_kraus(double p);
Matrix2c depolarizing_apply(const Matrix2c& rho, double p);
std::vector<Matrix2c> channel_kraus(const NoiseModel& noise);

/// Same gate sequence as the pure path on a density matrix, with the noise
/// channel applied after every gate on each qubit it touched. Returns the
/// computational-basis probabilities.
Vector run_circuit_noisy(const Vector& u_scaled, const Vector* recurrence_angles,
                         const CircuitLayout& layout, const NoiseModel& noise);
Vector run_encoded_noisy(const std::vector<double>& slot_angles, const Vector* recurrence_angles,
                         const CircuitLayout& layout, const NoiseModel& noise,
                         DensityMatrix* final_state = nullptr);

/// Noisy circuit with a single encoding layer and no recurrence block, folded
/// into a fixed linear readout of the product state produced by the encoding
/// rotations: p_k = Tr(Phi^dagger(|k><k|) rho_product). Each row of the
/// readout is the Heisenberg-picture image of one basis projector.
class NoisyProductReadout {
 public:
  NoisyProductReadout(const CircuitLayout& layout, const NoiseModel& noise);

  static bool applicable(const CircuitLayout& layout, bool has_recurrence);

  Vector probabilities(const std::vector<double>& slot_angles) const;

 private:
  Matrix2c qubit_state(double angle) const;
  int n_ = 0;
  std::vector<Matrix2c> kraus_;
  Matrix readout_;  // 2^n x 3^n, coefficients on the {I, X, Z} product basis
};

}  // namespace qrc::qcore
