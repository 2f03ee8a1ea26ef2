#include "qrc/tangent.hpp"

#include "qrc/error.hpp"

namespace qrc::tangent {

namespace {

constexpr double kShift = qcore::kPi / 2.0;

bool clamped(double u) { return u < reservoir::kInputLow || u > reservoir::kInputHigh; }

// Shift-rule derivatives for the listed slots only; other columns stay zero.
Matrix shift_slots(const std::vector<double>& slot_angles, const Vector* rec_angles,
                   const reservoir::Reservoir& res, const std::vector<bool>& wanted) {
  const Eigen::Index n_r = res.config().reservoir_dim();
  Matrix d = Matrix::Zero(n_r, static_cast<Eigen::Index>(slot_angles.size()));
  std::vector<double> shifted = slot_angles;
  for (std::size_t s = 0; s < slot_angles.size(); ++s) {
    if (!wanted[s]) continue;
    shifted[s] = slot_angles[s] + kShift;
    const Vector plus = res.exact_probabilities(shifted, rec_angles);
    shifted[s] = slot_angles[s] - kShift;
    const Vector minus = res.exact_probabilities(shifted, rec_angles);
    shifted[s] = slot_angles[s];
    d.col(static_cast<Eigen::Index>(s)) = 0.5 * (plus - minus);
  }
  return d;
}

Matrix dprobs_du_impl(const Vector& u_scaled, const Vector* rec_angles,
                      const reservoir::Reservoir& res) {
  const qcore::CircuitLayout& layout = res.config().layout;
  require(u_scaled.size() == layout.input_dim, "input has the wrong dimension");
  const auto angles = qcore::encode_angles(reservoir::clamp_input(u_scaled), layout);
  std::vector<bool> wanted(angles.size(), false);
  for (int s = 0; s < layout.n_slots(); ++s) {
    const int j = layout.slot_component(s);
    wanted[static_cast<std::size_t>(s)] = j >= 0 && !clamped(u_scaled(j));
  }
  const Matrix per_slot = shift_slots(angles, rec_angles, res, wanted);
  Matrix d = Matrix::Zero(per_slot.rows(), layout.input_dim);
  for (int s = 0; s < layout.n_slots(); ++s)
    if (wanted[static_cast<std::size_t>(s)]) d.col(layout.slot_component(s)) += per_slot.col(s);
  return layout.angle_scale * d;
}

reservoir::Reservoir noise_free(const qcore::CircuitLayout& layout, double epsilon) {
  reservoir::ReservoirConfig config;
  config.layout = layout;
  config.epsilon = epsilon;
  return reservoir::Reservoir(std::move(config));
}

LowRankJacobian closed_loop_at(const Vector& r, const Vector& u_scaled, const Matrix& w_out,
                               const reservoir::Reservoir& res,
                               const dynamics::MinMaxScaler& scaler) {
  const auto& config = res.config();
  require(r.size() == config.reservoir_dim(), "reservoir state has the wrong size");
  require(w_out.rows() == r.size() && w_out.cols() == config.layout.input_dim,
          "readout must be N_r x D");
  const double eps = config.epsilon;
  Vector rec;
  if (config.recurrent()) rec = res.recurrence_angles(r);
  const Vector* rec_ptr = config.recurrent() ? &rec : nullptr;

  LowRankJacobian jac;
  jac.diag = 1.0 - eps;
  const Matrix du = dprobs_du_impl(u_scaled, rec_ptr, res) * scaler.slope().asDiagonal();
  if (!config.recurrent()) {
    jac.left = eps * du;
    jac.right = w_out.transpose();
    return jac;
  }
  const Eigen::Index d = du.cols(), n = config.layout.n_qubits;
  const Vector chain =
      qcore::kPi * (1.0 - (config.projection * r).array().tanh().square()).matrix();
  const Matrix drec = parameter_shift_dprobs_drec(u_scaled, rec, res) * chain.asDiagonal();
  jac.left.resize(r.size(), d + n);
  jac.left << eps * du, eps * drec;
  jac.right.resize(d + n, r.size());
  jac.right << w_out.transpose(), config.projection;
  return jac;
}

}  // namespace

Matrix dprobs_dslots(const std::vector<double>& slot_angles, const Vector* rec_angles,
                     const reservoir::Reservoir& reservoir) {
  return shift_slots(slot_angles, rec_angles, reservoir,
                     std::vector<bool>(slot_angles.size(), true));
}

Matrix parameter_shift_dprobs_du(const Vector& u_scaled, const Vector* rec_angles,
                                 const reservoir::Reservoir& reservoir) {
  return dprobs_du_impl(u_scaled, rec_angles, reservoir);
}

Matrix parameter_shift_dprobs_du(const Vector& u_scaled, const Vector* rec_angles,
                                 const qcore::CircuitLayout& layout) {
  return dprobs_du_impl(u_scaled, rec_angles, noise_free(layout, 1.0));
}

Matrix parameter_shift_dprobs_drec(const Vector& u_scaled, const Vector& rec_angles,
                                   const reservoir::Reservoir& reservoir) {
  const auto& layout = reservoir.config().layout;
  require(rec_angles.size() == layout.n_qubits, "one recurrence angle per qubit expected");
  const auto angles = qcore::encode_angles(reservoir::clamp_input(u_scaled), layout);
  Matrix d(reservoir.config().reservoir_dim(), layout.n_qubits);
  Vector shifted = rec_angles;
  for (int q = 0; q < layout.n_qubits; ++q) {
    shifted(q) = rec_angles(q) + kShift;
    const Vector plus = reservoir.exact_probabilities(angles, &shifted);
    shifted(q) = rec_angles(q) - kShift;
    const Vector minus = reservoir.exact_probabilities(angles, &shifted);
    shifted(q) = rec_angles(q);
    d.col(q) = 0.5 * (plus - minus);
  }
  return d;
}

Matrix LowRankJacobian::dense() const {
  const Eigen::Index n = left.rows() > 0 ? left.rows() : right.cols();
  require(n > 0, "low-rank Jacobian has no shape");
  Matrix j = diag * Matrix::Identity(n, n);
  if (left.cols() > 0) j += left * right;
  return j;
}

LowRankJacobian closed_loop_factors(const Vector& r, const Matrix& w_out,
                                    const reservoir::Reservoir& reservoir,
                                    const dynamics::MinMaxScaler& scaler) {
  require(w_out.rows() == r.size(), "readout does not match the reservoir size");
  const Vector u_scaled = scaler.scale(w_out.transpose() * r);
  return closed_loop_at(r, u_scaled, w_out, reservoir, scaler);
}

JacobianRecord jacobian_rfqrc_closed(const Vector& r, const Vector& u_scaled, const Matrix& w_out,
                                     double epsilon, const qcore::CircuitLayout& layout,
                                     const dynamics::MinMaxScaler& scaler) {
  require(epsilon >= 0.0 && epsilon <= 1.0, "leak rate must lie in [0, 1]");
  if (epsilon == 0.0) return {Matrix::Identity(r.size(), r.size()), JacobianKind::ClosedLoop, 0};
  const auto res = noise_free(layout, epsilon);
  return {closed_loop_at(r, u_scaled, w_out, res, scaler).dense(), JacobianKind::ClosedLoop, 0};
}

JacobianRecord jacobian_qrc_closed(const Vector& r, const Vector& u_scaled, const Matrix& w_out,
                                   const reservoir::ReservoirConfig& config,
                                   const dynamics::MinMaxScaler& scaler) {
  require(config.recurrent(), "recurrent variant expected");
  reservoir::ReservoirConfig clean = config;
  clean.noise = qcore::NoiseModel::none();
  const reservoir::Reservoir res(std::move(clean));
  return {closed_loop_at(r, u_scaled, w_out, res, scaler).dense(), JacobianKind::ClosedLoop, 0};
}

LowRankJacobian conditional_factors(const Vector& r, const Vector& u_scaled,
                                    const reservoir::Reservoir& reservoir) {
  const auto& config = reservoir.config();
  LowRankJacobian jac;
  jac.diag = 1.0 - config.epsilon;
  if (!config.recurrent()) return jac;
  const Vector rec = reservoir.recurrence_angles(r);
  const Vector chain =
      qcore::kPi * (1.0 - (config.projection * r).array().tanh().square()).matrix();
  jac.left = config.epsilon * parameter_shift_dprobs_drec(u_scaled, rec, reservoir) *
             chain.asDiagonal();
  jac.right = config.projection;
  return jac;
}

JacobianRecord jacobian_conditional(const reservoir::ReservoirConfig& config, const Vector& r,
                                    const Vector& u_scaled) {
  const Eigen::Index n_r = config.reservoir_dim();
  if (!config.recurrent())
    return {(1.0 - config.epsilon) * Matrix::Identity(n_r, n_r), JacobianKind::Conditional, 0};
  reservoir::ReservoirConfig clean = config;
  clean.noise = qcore::NoiseModel::none();
  const reservoir::Reservoir res(std::move(clean));
  LowRankJacobian jac = conditional_factors(r, u_scaled, res);
  return {jac.dense(), JacobianKind::Conditional, 0};
}

Matrix finite_difference_jacobian(const std::function<Vector(const Vector&)>& step_fn,
                                  const Vector& r, double h) {
  require(h > 0.0, "finite-difference step must be positive");
  const Vector f0 = step_fn(r);
  Matrix j(f0.size(), r.size());
  Vector x = r;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    x(i) = r(i) + h;
    const Vector plus = step_fn(x);
    x(i) = r(i) - h;
    const Vector minus = step_fn(x);
    x(i) = r(i);
    j.col(i) = (plus - minus) / (2.0 * h);
  }
  return j;
}

}  // namespace qrc::tangent
