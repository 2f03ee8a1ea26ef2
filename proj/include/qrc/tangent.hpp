#pragma once

#include <Eigen/Dense>
#include <functional>

#include "qrc/dynamics.hpp"
#include "qrc/qcore.hpp"
#include "qrc/reservoir.hpp"

namespace qrc::tangent {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class JacobianKind { ClosedLoop, Conditional };

struct JacobianRecord {
  Matrix matrix;
  JacobianKind kind = JacobianKind::ClosedLoop;
  Eigen::Index at_step = 0;
};

/// d p / d theta_s for every encoding slot, by the two-point shift rule.
/// Channel noise is differentiated exactly; shot noise is ignored.
Matrix dprobs_dslots(const std::vector<double>& slot_angles, const Vector* rec_angles,
                     const reservoir::Reservoir& reservoir);

/// d p / d u (scaled input), N_r x D: angle_scale times the sum over slots
/// that carry each component. Clamped components get zero columns.
Matrix parameter_shift_dprobs_du(const Vector& u_scaled, const Vector* rec_angles,
                                 const reservoir::Reservoir& reservoir);

/// Noise-free convenience overload on a bare layout.
Matrix parameter_shift_dprobs_du(const Vector& u_scaled, const Vector* rec_angles,
                                 const qcore::CircuitLayout& layout);

/// d p / d phi for the recurrence rotation angles, N_r x n.
Matrix parameter_shift_dprobs_drec(const Vector& u_scaled, const Vector& rec_angles,
                                   const reservoir::Reservoir& reservoir);

/// J = diag I + left * right, applied without forming the N_r x N_r matrix.
struct LowRankJacobian {
  double diag = 1.0;
  Matrix left;
  Matrix right;

  Matrix apply(const Matrix& w) const {
    if (left.cols() == 0) return diag * w;
    return diag * w + left * (right * w);
  }
  Matrix dense() const;
};

/// Closed-loop one-step Jacobian at reservoir state r (u = scaled(W^T r)).
LowRankJacobian closed_loop_factors(const Vector& r, const Matrix& w_out,
                                    const reservoir::Reservoir& reservoir,
                                    const dynamics::MinMaxScaler& scaler);

JacobianRecord jacobian_rfqrc_closed(const Vector& r, const Vector& u_scaled, const Matrix& w_out,
                                     double epsilon, const qcore::CircuitLayout& layout,
                                     const dynamics::MinMaxScaler& scaler);

JacobianRecord jacobian_qrc_closed(const Vector& r, const Vector& u_scaled, const Matrix& w_out,
                                   const reservoir::ReservoirConfig& config,
                                   const dynamics::MinMaxScaler& scaler);

/// Jacobian of the teacher-forced update with the drive held fixed. For the
/// recurrence-free variant this is (1 - eps) I without touching the circuit.
JacobianRecord jacobian_conditional(const reservoir::ReservoirConfig& config, const Vector& r,
                                    const Vector& u_scaled);

LowRankJacobian conditional_factors(const Vector& r, const Vector& u_scaled,
                                    const reservoir::Reservoir& reservoir);

/// Central differences, one column per perturbed component.
Matrix finite_difference_jacobian(const std::function<Vector(const Vector&)>& step_fn,
                                  const Vector& r, double h);

}  // namespace qrc::tangent
