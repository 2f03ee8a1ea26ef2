#include <cmath>

#include "qrc/error.hpp"
#include "qrc/qcore.hpp"

namespace qrc::qcore {

namespace {

inline Eigen::Index bit_of(int n_qubits, int qubit) {
  return Eigen::Index{1} << (n_qubits - 1 - qubit);
}

Matrix2c ry_matrix(double angle) {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  Matrix2c u;
  u << c, -s, s, c;
  return u;
}

// 4x4 superoperator of a single-qubit Kraus map on the vectorized 2x2 block
// (index 2a + b for entry (a, b)).
Eigen::Matrix4cd superoperator(const std::vector<Matrix2c>& kraus) {
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  for (const auto& k : kraus)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) s(2 * a + b, 2 * c + d) += k(a, c) * std::conj(k(b, d));
  return s;
}

}  // namespace

DensityMatrix::DensityMatrix(int n_qubits) : n_(n_qubits) {
  require(n_qubits >= 1 && n_qubits <= 10, "density-matrix path supports 1 to 10 qubits");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  rho_ = Eigen::MatrixXcd::Zero(dim, dim);
  rho_(0, 0) = 1.0;
}

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd rho) {
  const Eigen::Index dim = rho.rows();
  require(rho.cols() == dim && dim >= 2 && (dim & (dim - 1)) == 0,
          "density matrix must be square with power-of-two size");
  require((rho - rho.adjoint()).norm() < 1e-10, "density matrix must be Hermitian");
  require(std::abs(rho.trace() - Complex(1.0)) < 1e-10, "density matrix must have unit trace");
  DensityMatrix out;
  while ((Eigen::Index{1} << out.n_) < dim) ++out.n_;
  out.rho_ = std::move(rho);
  return out;
}

DensityMatrix DensityMatrix::from_state(const QuantumState& state) {
  DensityMatrix out;
  out.n_ = state.n_qubits();
  out.rho_ = state.amplitudes() * state.amplitudes().adjoint();
  return out;
}

void DensityMatrix::apply_1q_left(int qubit, const Matrix2c& u) {
  const Eigen::Index stride = bit_of(n_, qubit);
  const Eigen::Index dim = rho_.rows();
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index i = base; i < base + stride; ++i) {
      Eigen::RowVectorXcd r0 = rho_.row(i), r1 = rho_.row(i + stride);
      rho_.row(i) = u(0, 0) * r0 + u(0, 1) * r1;
      rho_.row(i + stride) = u(1, 0) * r0 + u(1, 1) * r1;
    }
  }
}

void DensityMatrix::apply_ry(int qubit, double angle) {
  require(qubit >= 0 && qubit < n_, "qubit out of range");
  const Matrix2c u = ry_matrix(angle);
  apply_1q_left(qubit, u);
  // rho U^dagger: columns mix with conj(U) entries.
  const Eigen::Index stride = bit_of(n_, qubit);
  const Eigen::Index dim = rho_.cols();
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index j = base; j < base + stride; ++j) {
      Eigen::VectorXcd c0 = rho_.col(j), c1 = rho_.col(j + stride);
      rho_.col(j) = std::conj(u(0, 0)) * c0 + std::conj(u(0, 1)) * c1;
      rho_.col(j + stride) = std::conj(u(1, 0)) * c0 + std::conj(u(1, 1)) * c1;
    }
  }
}

void DensityMatrix::apply_cnot(int control, int target) {
  require(control >= 0 && control < n_ && target >= 0 && target < n_ && control != target,
          "invalid CNOT pair");
  const Eigen::Index cbit = bit_of(n_, control), tbit = bit_of(n_, target);
  const Eigen::Index dim = rho_.rows();
  for (Eigen::Index i = 0; i < dim; ++i)
    if ((i & cbit) && !(i & tbit)) rho_.row(i).swap(rho_.row(i | tbit));
  for (Eigen::Index j = 0; j < dim; ++j)
    if ((j & cbit) && !(j & tbit)) rho_.col(j).swap(rho_.col(j | tbit));
}

void DensityMatrix::apply_kraus(int qubit, const std::vector<Matrix2c>& kraus) {
  require(qubit >= 0 && qubit < n_, "qubit out of range");
  const Eigen::Matrix4cd s = superoperator(kraus);
  const Eigen::Index stride = bit_of(n_, qubit);
  const Eigen::Index dim = rho_.rows();
  Eigen::Vector4cd block;
  for (Eigen::Index jb = 0; jb < dim; jb += 2 * stride) {
    for (Eigen::Index j = jb; j < jb + stride; ++j) {
      for (Eigen::Index ib = 0; ib < dim; ib += 2 * stride) {
        for (Eigen::Index i = ib; i < ib + stride; ++i) {
          block << rho_(i, j), rho_(i, j + stride), rho_(i + stride, j),
              rho_(i + stride, j + stride);
          const Eigen::Vector4cd out = s * block;
          rho_(i, j) = out(0);
          rho_(i, j + stride) = out(1);
          rho_(i + stride, j) = out(2);
          rho_(i + stride, j + stride) = out(3);
        }
      }
    }
  }
}

void DensityMatrix::apply_kraus_adjoint(int qubit, const std::vector<Matrix2c>& kraus) {
  std::vector<Matrix2c> adjoint;
  adjoint.reserve(kraus.size());
  for (const auto& k : kraus) adjoint.push_back(k.adjoint());
  apply_kraus(qubit, adjoint);
}

Vector run_encoded_noisy(const std::vector<double>& slot_angles, const Vector* recurrence_angles,
                         const CircuitLayout& layout, const NoiseModel& noise,
                         DensityMatrix* final_state) {
  require(slot_angles.size() == static_cast<std::size_t>(layout.n_slots()),
          "one angle per encoding slot expected");
  const std::vector<Matrix2c> kraus = channel_kraus(noise);
  DensityMatrix rho(layout.n_qubits);
  auto rotation_layer = [&](auto angle_of) {
    for (int q = 0; q < layout.n_qubits; ++q) {
      rho.apply_ry(q, angle_of(q));
      rho.apply_kraus(q, kraus);
    }
  };
  auto entangling_block = [&] {
    for (auto [c, t] : layout.entangler()) {
      rho.apply_cnot(c, t);
      rho.apply_kraus(c, kraus);
      rho.apply_kraus(t, kraus);
    }
  };
  if (recurrence_angles) {
    require(recurrence_angles->size() == layout.n_qubits, "one recurrence angle per qubit expected");
    rotation_layer([&](int q) { return (*recurrence_angles)(q); });
    entangling_block();
  }
  for (int layer = 0; layer < layout.encoding_layers(); ++layer) {
    rotation_layer(
        [&](int q) { return slot_angles[static_cast<std::size_t>(layer * layout.n_qubits + q)]; });
    entangling_block();
  }
  rotation_layer([&](int q) { return layout.alpha[static_cast<std::size_t>(q)]; });
  entangling_block();

  const double drift = std::abs(rho.trace() - Complex(1.0));
  if (drift > 1e-8)
    throw Error(ErrorCode::NumericIntegrity, "trace drifted by " + std::to_string(drift));
  Vector probs = rho.diagonal();
  if (final_state) *final_state = std::move(rho);
  return probs;
}

Vector run_circuit_noisy(const Vector& u_scaled, const Vector* recurrence_angles,
                         const CircuitLayout& layout, const NoiseModel& noise) {
  return run_encoded_noisy(encode_angles(u_scaled, layout), recurrence_angles, layout, noise);
}

bool NoisyProductReadout::applicable(const CircuitLayout& layout, bool has_recurrence) {
  return !has_recurrence && layout.encoding_layers() == 1 && layout.n_qubits <= 9;
}

NoisyProductReadout::NoisyProductReadout(const CircuitLayout& layout, const NoiseModel& noise)
    : n_(layout.n_qubits) {
  require(applicable(layout, false), "compiled readout needs one encoding layer, no recurrence");
  if (noise.is_channel()) kraus_ = channel_kraus(noise);

  const Eigen::Index dim = layout.reservoir_dim();
  Eigen::Index n_pauli = 1;
  for (int q = 0; q < n_; ++q) n_pauli *= 3;
  readout_.resize(dim, n_pauli);

  const auto pairs = layout.entangler();
  auto channel_adjoint = [&](DensityMatrix& x, int q) {
    if (!kraus_.empty()) x.apply_kraus_adjoint(q, kraus_);
  };
  auto entangling_adjoint = [&](DensityMatrix& x) {
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
      channel_adjoint(x, it->second);
      channel_adjoint(x, it->first);
      x.apply_cnot(it->first, it->second);
    }
  };

  std::vector<double> cur, next;
  for (Eigen::Index k = 0; k < dim; ++k) {
    Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(dim, dim);
    projector(k, k) = 1.0;
    DensityMatrix x = DensityMatrix::from_matrix(std::move(projector));
    // Everything after the encoding rotations, traversed backwards.
    entangling_adjoint(x);
    for (int q = n_ - 1; q >= 0; --q) {
      channel_adjoint(x, q);
      x.apply_ry(q, -layout.alpha[static_cast<std::size_t>(q)]);
    }
    entangling_adjoint(x);

    const Eigen::MatrixXcd& a = x.matrix();
    if (a.imag().cwiseAbs().maxCoeff() > 1e-12)
      throw Error(ErrorCode::NumericIntegrity, "Heisenberg readout is not real");
    // Contract qubit by qubit onto the {I, X, Z} basis: Tr(A P_s).
    cur.assign(static_cast<std::size_t>(dim * dim), 0.0);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) cur[static_cast<std::size_t>(i * dim + j)] = a(i, j).real();
    Eigen::Index prefix = 1, rem = dim;
    while (rem > 1) {
      const Eigen::Index h = rem / 2;
      next.assign(static_cast<std::size_t>(prefix * 3 * h * h), 0.0);
      for (Eigen::Index p = 0; p < prefix; ++p) {
        const double* src = cur.data() + p * rem * rem;
        double* dst = next.data() + p * 3 * h * h;
        for (Eigen::Index r = 0; r < h; ++r) {
          for (Eigen::Index c = 0; c < h; ++c) {
            const double a00 = src[r * rem + c], a01 = src[r * rem + c + h];
            const double a10 = src[(r + h) * rem + c], a11 = src[(r + h) * rem + c + h];
            dst[0 * h * h + r * h + c] = a00 + a11;
            dst[1 * h * h + r * h + c] = a01 + a10;
            dst[2 * h * h + r * h + c] = a00 - a11;
          }
        }
      }
      cur.swap(next);
      prefix *= 3;
      rem = h;
    }
    for (Eigen::Index s = 0; s < n_pauli; ++s) readout_(k, s) = cur[static_cast<std::size_t>(s)];
  }
}

Matrix2c NoisyProductReadout::qubit_state(double angle) const {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  Matrix2c rho;
  rho << c * c, c * s, c * s, s * s;
  if (kraus_.empty()) return rho;
  Matrix2c out = Matrix2c::Zero();
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

Vector NoisyProductReadout::probabilities(const std::vector<double>& slot_angles) const {
  require(slot_angles.size() == static_cast<std::size_t>(n_), "one angle per qubit expected");
  Vector coeffs = Vector::Ones(1);
  for (int q = 0; q < n_; ++q) {
    const Matrix2c rho = qubit_state(slot_angles[static_cast<std::size_t>(q)]);
    // rho = (I + x X + z Z) / 2 for real single-qubit states.
    const double x = 2.0 * rho(0, 1).real();
    const double z = (rho(0, 0) - rho(1, 1)).real();
    Vector next(coeffs.size() * 3);
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      next(3 * i) = 0.5 * coeffs(i);
      next(3 * i + 1) = 0.5 * x * coeffs(i);
      next(3 * i + 2) = 0.5 * z * coeffs(i);
    }
    coeffs.swap(next);
  }
  return readout_ * coeffs;
}

}  // namespace qrc::qcore
