#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qrc/dynamics.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/stability.hpp"

namespace qrc::analysis {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Lyapunov spectrum of the autonomous closed-loop reservoir, starting from
/// r_init. The tangent basis lives in reservoir space.
stability::LyapunovRun closed_loop_spectrum(reservoir::Reservoir& reservoir, const Vector& r_init,
                                            const Matrix& w_out,
                                            const dynamics::MinMaxScaler& scaler,
                                            const stability::SpectrumOptions& options);

/// Conditional exponents of the teacher-forced reservoir over the train range
/// (after the washout). Returned descending.
Vector conditional_spectrum(const reservoir::ReservoirConfig& config,
                            const dynamics::Trajectory& traj, const dynamics::DatasetSplit& split,
                            int n_exponents, std::uint64_t seed);

/// Leading conditional exponent for each leak rate. A leak rate of one
/// annihilates every tangent direction and reports -infinity.
std::vector<double> conditional_les(const reservoir::ReservoirConfig& config,
                                    const dynamics::Trajectory& traj,
                                    const dynamics::DatasetSplit& split,
                                    const std::vector<double>& epsilons, int n_exponents,
                                    std::uint64_t seed);

}  // namespace qrc::analysis
