#include "qrc/qcore.hpp"

#include <cmath>
#include <random>

#include "qrc/error.hpp"

namespace qrc::qcore {

namespace {

inline Eigen::Index bit_of(int n_qubits, int qubit) {
  return Eigen::Index{1} << (n_qubits - 1 - qubit);
}

void check_qubit(int n_qubits, int qubit) {
  require(qubit >= 0 && qubit < n_qubits,
          "qubit " + std::to_string(qubit) + " outside [0, " + std::to_string(n_qubits) + ")");
}

}  // namespace

QuantumState::QuantumState(int n_qubits) : n_(n_qubits) {
  require(n_qubits >= 1 && n_qubits <= 24, "qubit count must lie in [1, 24]");
  amps_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
  amps_(0) = 1.0;
}

QuantumState QuantumState::from_amplitudes(Eigen::VectorXcd amplitudes) {
  const Eigen::Index size = amplitudes.size();
  require(size >= 2 && (size & (size - 1)) == 0, "amplitude count must be a power of two");
  require(std::abs(amplitudes.norm() - 1.0) <= 1e-10, "state must have unit norm");
  QuantumState state;
  state.n_ = 0;
  while ((Eigen::Index{1} << state.n_) < size) ++state.n_;
  state.amps_ = std::move(amplitudes);
  return state;
}

void QuantumState::apply_ry(int qubit, double angle) {
  check_qubit(n_, qubit);
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  const Eigen::Index stride = bit_of(n_, qubit);
  const Eigen::Index dim = amps_.size();
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index i = base; i < base + stride; ++i) {
      const Complex a0 = amps_(i), a1 = amps_(i + stride);
      amps_(i) = c * a0 - s * a1;
      amps_(i + stride) = s * a0 + c * a1;
    }
  }
}

void QuantumState::apply_cnot(int control, int target) {
  check_qubit(n_, control);
  check_qubit(n_, target);
  require(control != target, "CNOT control and target must differ");
  const Eigen::Index cbit = bit_of(n_, control), tbit = bit_of(n_, target);
  for (Eigen::Index i = 0; i < amps_.size(); ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(amps_(i), amps_(i | tbit));
  }
}

QuantumState apply_ry(QuantumState state, int qubit, double angle) {
  state.apply_ry(qubit, angle);
  return state;
}

QuantumState apply_cnot(QuantumState state, int control, int target) {
  state.apply_cnot(control, target);
  return state;
}

const char* to_string(SlotFill fill) { return fill == SlotFill::Zero ? "zero" : "cycle"; }

SlotFill slot_fill_from_string(const std::string& name) {
  if (name == "zero") return SlotFill::Zero;
  if (name == "cycle") return SlotFill::Cycle;
  throw Error(ErrorCode::InvalidArgument, "unknown slot fill '" + name + "'");
}

CircuitLayout CircuitLayout::random(int n_qubits, int input_dim, std::uint64_t seed, SlotFill fill,
                                    double angle_scale, double angle_offset) {
  CircuitLayout layout;
  layout.n_qubits = n_qubits;
  layout.input_dim = input_dim;
  layout.fill = fill;
  layout.angle_scale = angle_scale;
  layout.angle_offset = angle_offset;
  layout.seed = seed;
  Rng rng = make_rng(seed, Stream::CircuitAngles);
  std::uniform_real_distribution<double> uniform(0.0, 4.0 * kPi);
  layout.alpha.resize(static_cast<std::size_t>(n_qubits));
  for (double& a : layout.alpha) a = uniform(rng);
  layout.validate();
  return layout;
}

void CircuitLayout::validate() const {
  require(n_qubits >= 1 && n_qubits <= 24, "qubit count must lie in [1, 24]");
  require(input_dim >= 1, "input dimension must be positive");
  require(alpha.size() == static_cast<std::size_t>(n_qubits), "alpha needs one angle per qubit");
  for (double a : alpha) require(a >= 0.0 && a <= 4.0 * kPi, "alpha entries must lie in [0, 4 pi]");
  require(std::isfinite(angle_scale) && angle_scale > 0.0, "angle scale must be positive");
  require(std::isfinite(angle_offset), "angle offset must be finite");
}

int CircuitLayout::slot_component(int slot) const {
  if (slot < input_dim) return slot;
  return fill == SlotFill::Cycle ? slot % input_dim : -1;
}

std::vector<std::pair<int, int>> CircuitLayout::entangler() const {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n_qubits; ++i)
    for (int j = i + 1; j < n_qubits; ++j) pairs.emplace_back(i, j);
  return pairs;
}

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Sampling: return "sampling";
    case NoiseKind::Depolarizing: return "depolarizing";
    case NoiseKind::AmplitudeDamping: return "amplitude_damping";
  }
  return "none";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::None;
  if (name == "sampling") return NoiseKind::Sampling;
  if (name == "depolarizing") return NoiseKind::Depolarizing;
  if (name == "amplitude_damping") return NoiseKind::AmplitudeDamping;
  throw Error(ErrorCode::InvalidArgument, "unknown noise kind '" + name + "'");
}

void NoiseModel::validate() const {
  require(shots >= 1, "shot count must be at least 1");
  require(p >= 0.0 && p <= 1.0, "noise intensity must lie in [0, 1]");
}

std::vector<double> encode_angles(const Vector& u_scaled, const CircuitLayout& layout) {
  require(u_scaled.size() == layout.input_dim, "input has wrong dimension for the layout");
  std::vector<double> angles(static_cast<std::size_t>(layout.n_slots()), 0.0);
  for (int s = 0; s < layout.n_slots(); ++s) {
    const int j = layout.slot_component(s);
    if (j >= 0)
      angles[static_cast<std::size_t>(s)] = layout.angle_offset + layout.angle_scale * u_scaled(j);
  }
  return angles;
}

namespace {

template <typename Register>
void entangle(Register& reg, const CircuitLayout& layout) {
  for (auto [c, t] : layout.entangler()) reg.apply_cnot(c, t);
}

}  // namespace

QuantumState run_encoded_pure(const std::vector<double>& slot_angles,
                              const Vector* recurrence_angles, const CircuitLayout& layout) {
  require(slot_angles.size() == static_cast<std::size_t>(layout.n_slots()),
          "one angle per encoding slot expected");
  QuantumState state(layout.n_qubits);
  if (recurrence_angles) {
    require(recurrence_angles->size() == layout.n_qubits, "one recurrence angle per qubit expected");
    for (int q = 0; q < layout.n_qubits; ++q) state.apply_ry(q, (*recurrence_angles)(q));
    entangle(state, layout);
  }
  for (int layer = 0; layer < layout.encoding_layers(); ++layer) {
    for (int q = 0; q < layout.n_qubits; ++q)
      state.apply_ry(q, slot_angles[static_cast<std::size_t>(layer * layout.n_qubits + q)]);
    entangle(state, layout);
  }
  for (int q = 0; q < layout.n_qubits; ++q)
    state.apply_ry(q, layout.alpha[static_cast<std::size_t>(q)]);
  entangle(state, layout);
  return state;
}

QuantumState run_circuit_pure(const Vector& u_scaled, const Vector* recurrence_angles,
                              const CircuitLayout& layout) {
  return run_encoded_pure(encode_angles(u_scaled, layout), recurrence_angles, layout);
}

Vector measure_probabilities(const QuantumState& state) {
  return state.amplitudes().cwiseAbs2();
}

Vector sample_shots(const Vector& probs, long shots, Rng& rng) {
  require(shots >= 1, "shot count must be at least 1");
  // Multinomial draw as a chain of conditional binomials.
  Vector freq = Vector::Zero(probs.size());
  long remaining = shots;
  double mass = 1.0;
  for (Eigen::Index k = 0; k < probs.size() && remaining > 0; ++k) {
    const double pk = std::max(0.0, probs(k));
    long count;
    if (k + 1 == probs.size() || pk >= mass) {
      count = remaining;
    } else {
      std::binomial_distribution<long> binom(remaining, std::clamp(pk / mass, 0.0, 1.0));
      count = binom(rng);
    }
    freq(k) = static_cast<double>(count) / static_cast<double>(shots);
    remaining -= count;
    mass -= pk;
  }
  return freq;
}

std::array<Matrix2c, 2> amplitude_damping_kraus(double p) {
  require(p >= 0.0 && p <= 1.0, "damping probability must lie in [0, 1]");
  Matrix2c k0, k1;
  k0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - p);
  k1 << 0.0, std::sqrt(p), 0.0, 0.0;
  return {k0, k1};
}

std::array<Matrix2c, 4> depolarizing_kraus(double p) {
  require(p >= 0.0 && p <= 1.0, "depolarizing probability must lie in [0, 1]");
  const Complex i(0.0, 1.0);
  const double a = std::sqrt(1.0 - 0.75 * p), b = std::sqrt(0.25 * p);
  Matrix2c k0 = a * Matrix2c::Identity();
  Matrix2c x, y, z;
  x << 0.0, 1.0, 1.0, 0.0;
  y << 0.0, -i, i, 0.0;
  z << 1.0, 0.0, 0.0, -1.0;
  return {k0, b * x, b * y, b * z};
}

Matrix2c depolarizing_apply(const Matrix2c& rho, double p) {
  Matrix2c out = Matrix2c::Zero();
  for (const auto& k : depolarizing_kraus(p)) out += k * rho * k.adjoint();
  return out;
}

std::vector<Matrix2c> channel_kraus(const NoiseModel& noise) {
  noise.validate();
  if (noise.kind == NoiseKind::AmplitudeDamping) {
    auto k = amplitude_damping_kraus(noise.p);
    return {k.begin(), k.end()};
  }
  if (noise.kind == NoiseKind::Depolarizing) {
    auto k = depolarizing_kraus(noise.p);
    return {k.begin(), k.end()};
  }
  throw Error(ErrorCode::InvalidArgument, "noise model has no Kraus representation");
}

}  // namespace qrc::qcore
