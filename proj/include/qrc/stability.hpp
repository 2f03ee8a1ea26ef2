#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace qrc::stability {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct SpectrumOptions {
  int n_exponents = 1;
  Eigen::Index state_dim = 0;
  /// Steps that contribute to the averages (after the skipped transient).
  Eigen::Index n_steps = 0;
  Eigen::Index n_skip = 0;
  double dt = 0.01;
  std::uint64_t seed = 0;
  /// Keep the per-step Q and R factors of the averaging window (needed for CLVs).
  bool save_factors = false;
};

struct TangentHistory {
  std::vector<Matrix> q;
  std::vector<Matrix> r;
  /// log(diag R) / dt, one column per averaging step.
  Matrix finite_time_les;
};

struct LyapunovResult {
  Vector exponents;
  std::optional<double> ky_dimension;
  /// Running means of the exponents, one column per averaging step.
  Matrix convergence;
};

struct LyapunovRun {
  LyapunovResult result;
  TangentHistory history;
};

/// Propagates the tangent basis in place through one step of the underlying
/// map (basis <- J(x_k) basis) and advances the state x_k -> x_{k+1}.
using TangentStep = std::function<void(Matrix& basis)>;

LyapunovRun lyapunov_spectrum(const TangentStep& step, const SpectrumOptions& options);

/// Variant with a dense Jacobian evaluated before each state advance.
LyapunovRun lyapunov_spectrum(const std::function<Matrix()>& jacobian,
                              const std::function<void()>& advance,
                              const SpectrumOptions& options);

/// Sign-fixed thin QR: returns (Q, R) with diag(R) > 0. Throws
/// TangentDegenerate if a diagonal entry of R falls below 1e-300.
std::pair<Matrix, Matrix> positive_qr(const Matrix& w);

/// Kaplan-Yorke dimension of a descending spectrum. Zero if the leading
/// exponent is negative; invalid-argument if every partial sum is positive.
double kaplan_yorke(const Vector& exponents);

struct CLVResult {
  /// Unit-column vectors, one matrix per retained step.
  std::vector<Matrix> vectors;
  /// Index into the history window of vectors[0].
  Eigen::Index first_step = 0;
};

/// Backward (Ginelli) iteration over saved factors. The trailing
/// `backward_skip` steps only serve as transient. With `projection` the
/// vectors are mapped through it (e.g. reservoir -> physical space) before
/// normalization.
CLVResult clv_backward(const TangentHistory& history, Eigen::Index backward_skip,
                       std::uint64_t seed, const Matrix* projection = nullptr);

struct AngleStats {
  std::vector<std::pair<int, int>> pairs;
  /// Degrees, one row per pair, one column per step.
  Matrix angles;
  /// Probability densities per degree, one row per pair, 90 bins on [0, 90].
  Matrix pdf;
  static constexpr int kBins = 90;
};

/// Angle in degrees between two directions, in [0, 90].
double subspace_angle_deg(const Vector& a, const Vector& b);
AngleStats clv_angles(const CLVResult& clvs);

/// 1-Wasserstein distance between two empirical distributions.
double wasserstein1(std::vector<double> a, std::vector<double> b);

enum class GSClass { NoGS, GSNonDifferentiable, DGS };
const char* to_string(GSClass c);

struct GSVerdict {
  double max_cle = 0.0;
  double lambda_star = 0.0;
  GSClass gs_class = GSClass::NoGS;
};

GSVerdict classify_gs(double max_cle, double lambda_star);

}  // namespace qrc::stability
