#include "qrc/reservoir.hpp"

#include <cmath>
#include <random>

#include "qrc/error.hpp"

namespace qrc::reservoir {

const char* to_string(Variant v) { return v == Variant::QRC ? "qrc" : "rfqrc"; }

Variant variant_from_string(const std::string& name) {
  if (name == "rfqrc") return Variant::RFQRC;
  if (name == "qrc") return Variant::QRC;
  throw Error(ErrorCode::InvalidArgument, "unknown reservoir variant '" + name + "'");
}

void ReservoirConfig::validate() const {
  layout.validate();
  noise.validate();
  require(epsilon > 0.0 && epsilon <= 1.0, "leak rate must lie in (0, 1]");
  require(!beta_grid.empty(), "beta grid must not be empty");
  for (double b : beta_grid) require(b >= 0.0 && std::isfinite(b), "beta must be finite and >= 0");
  if (recurrent()) {
    require(projection.rows() == layout.n_qubits && projection.cols() == reservoir_dim(),
            "projection must be n x N_r");
    for (Eigen::Index i = 0; i < projection.rows(); ++i) {
      const double norm = projection.row(i).norm();
      // A zero projection is allowed: it switches the recurrence off.
      require(norm == 0.0 || std::abs(norm - 1.0) < 1e-9, "projection rows must be unit-norm");
    }
  }
  if (noise.is_channel())
    require(layout.n_qubits <= 10, "channel noise needs the density-matrix path (n <= 10)");
}

Matrix random_projection(int n_qubits, Eigen::Index reservoir_dim, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::Projection);
  std::normal_distribution<double> normal;
  Matrix proj(n_qubits, reservoir_dim);
  for (Eigen::Index i = 0; i < proj.rows(); ++i) {
    for (Eigen::Index j = 0; j < proj.cols(); ++j) proj(i, j) = normal(rng);
    proj.row(i).normalize();
  }
  return proj;
}

Vector clamp_input(const Vector& u_scaled) { return u_scaled.cwiseMax(kInputLow).cwiseMin(kInputHigh); }

Reservoir::Reservoir(ReservoirConfig config)
    : config_(std::move(config)), shots_(make_rng(config_.noise.seed, Stream::Shots)) {
  config_.validate();
  if (config_.noise.is_channel() &&
      qcore::NoisyProductReadout::applicable(config_.layout, config_.recurrent()))
    compiled_.emplace(config_.layout, config_.noise);
}

Vector Reservoir::recurrence_angles(const Vector& r) const {
  if (!config_.recurrent()) return {};
  require(r.size() == config_.reservoir_dim(), "reservoir state has the wrong size");
  return qcore::kPi * (config_.projection * r).array().tanh().matrix();
}

Vector Reservoir::exact_probabilities(const std::vector<double>& slot_angles,
                                      const Vector* rec) const {
  if (config_.noise.is_channel()) {
    if (compiled_ && !rec) return compiled_->probabilities(slot_angles);
    return qcore::run_encoded_noisy(slot_angles, rec, config_.layout, config_.noise);
  }
  return qcore::measure_probabilities(qcore::run_encoded_pure(slot_angles, rec, config_.layout));
}

Vector Reservoir::probabilities(const Vector& r, const Vector& u_scaled) {
  require(u_scaled.size() == config_.layout.input_dim, "input has the wrong dimension");
  const std::vector<double> angles = qcore::encode_angles(clamp_input(u_scaled), config_.layout);
  Vector rec;
  if (config_.recurrent()) rec = recurrence_angles(r);
  Vector p = exact_probabilities(angles, config_.recurrent() ? &rec : nullptr);
  if (config_.noise.kind == qcore::NoiseKind::Sampling)
    p = qcore::sample_shots(p, config_.noise.shots, shots_);
  return p;
}

Vector Reservoir::step(const Vector& r, const Vector& u_scaled) {
  require(r.size() == config_.reservoir_dim(), "reservoir state has the wrong size");
  const double eps = config_.epsilon;
  return (1.0 - eps) * r + eps * probabilities(r, u_scaled);
}

OpenLoopResult open_loop_run(const dynamics::Trajectory& traj, const dynamics::DatasetSplit& split,
                             Reservoir& reservoir, const Vector* r_init) {
  require(split.train.size() >= 1, "empty training range");
  require(split.train.end < traj.n_steps(), "training targets need one step past the range");
  require(split.washout.end <= split.train.begin, "washout must precede training");
  const Eigen::Index n_r = reservoir.config().reservoir_dim();
  Vector r = r_init ? *r_init : Vector::Zero(n_r);
  require(r.size() == n_r, "initial state has the wrong size");

  for (Eigen::Index i = split.washout.begin; i < split.washout.end; ++i)
    r = reservoir.step(r, split.scaler.scale(traj.states.row(i).transpose()));

  OpenLoopResult out;
  out.states.resize(n_r, split.train.size());
  out.targets.resize(traj.dim(), split.train.size());
  for (Eigen::Index i = split.train.begin; i < split.train.end; ++i) {
    r = reservoir.step(r, split.scaler.scale(traj.states.row(i).transpose()));
    out.states.col(i - split.train.begin) = r;
    out.targets.col(i - split.train.begin) = traj.states.row(i + 1).transpose();
  }
  out.final_state = r;
  return out;
}

Matrix train_readout(const Matrix& states, const Matrix& targets, double beta) {
  require(states.cols() == targets.cols() && states.cols() >= 1,
          "states and targets must have matching column counts");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be finite and >= 0");
  const Eigen::Index n_r = states.rows();
  Matrix gram = states * states.transpose();
  gram.diagonal().array() += beta;
  const Matrix rhs = states * targets.transpose();

  auto attempt = [&](const Matrix& a) -> std::optional<Matrix> {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Matrix w = llt.solve(rhs);
    if (!w.allFinite()) return std::nullopt;
    return w;
  };
  if (auto w = attempt(gram)) return *w;
  const double jitter = 1e-12 * gram.trace() / static_cast<double>(n_r);
  gram.diagonal().array() += jitter;
  if (auto w = attempt(gram)) return *w;
  throw Error(ErrorCode::SingularSystem, "ridge system is not positive definite even with jitter");
}

double select_beta(const Matrix& states, const Matrix& targets, const std::vector<double>& grid,
                   double val_fraction) {
  require(!grid.empty(), "beta grid must not be empty");
  require(val_fraction > 0.0 && val_fraction <= 0.5, "validation fraction must lie in (0, 0.5]");
  const Eigen::Index n = states.cols();
  const auto n_val = static_cast<Eigen::Index>(std::floor(val_fraction * static_cast<double>(n)));
  require(n_val >= 1 && n - n_val >= 1, "too few columns for a holdout split");
  const Eigen::Index n_fit = n - n_val;

  double best_beta = 0.0, best_mse = 0.0;
  bool have = false;
  for (double beta : grid) {
    double mse;
    try {
      const Matrix w = train_readout(states.leftCols(n_fit), targets.leftCols(n_fit), beta);
      mse = (w.transpose() * states.rightCols(n_val) - targets.rightCols(n_val)).squaredNorm() /
            static_cast<double>(n_val * targets.rows());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularSystem) throw;
      continue;
    }
    if (!have || mse < best_mse || (mse == best_mse && beta < best_beta)) {
      best_beta = beta;
      best_mse = mse;
      have = true;
    }
  }
  if (!have) throw Error(ErrorCode::SingularSystem, "no beta in the grid gave a solvable system");
  return best_beta;
}

Matrix closed_loop_run(const Vector& r_init, const Matrix& w_out, Reservoir& reservoir,
                       Eigen::Index n_steps, const dynamics::MinMaxScaler& scaler,
                       Vector* final_state) {
  require(n_steps >= 0, "step count must be non-negative");
  require(w_out.rows() == r_init.size(), "readout does not match the reservoir size");
  Matrix out(n_steps, w_out.cols());
  Vector r = r_init;
  for (Eigen::Index k = 0; k < n_steps; ++k) {
    const Vector u_hat = w_out.transpose() * r;
    if (!u_hat.allFinite() || u_hat.cwiseAbs().maxCoeff() > dynamics::kDivergenceBound)
      throw ForecastDiverged(static_cast<std::size_t>(k), "closed-loop prediction left the bound");
    out.row(k) = u_hat.transpose();
    r = reservoir.step(r, scaler.scale(u_hat));
  }
  if (final_state) *final_state = r;
  return out;
}

std::vector<double> esp_contraction_test(Reservoir& reservoir, const Matrix& drive,
                                         const Vector& r1, const Vector& r2) {
  require(r1.size() == r2.size(), "states must have equal size");
  require((r1 - r2).norm() > 0.0, "initial states must differ");
  std::vector<double> ratios;
  Vector a = r1, b = r2;
  double dist = (a - b).norm();
  for (Eigen::Index t = 0; t < drive.rows(); ++t) {
    if (dist < 1e-14) break;
    const Vector u = drive.row(t).transpose();
    a = reservoir.step(a, u);
    b = reservoir.step(b, u);
    const double next = (a - b).norm();
    ratios.push_back(next / dist);
    dist = next;
  }
  return ratios;
}

double vpt(const Matrix& prediction, const Matrix& truth, double dt, double lambda1) {
  require(prediction.rows() == truth.rows() && prediction.cols() == truth.cols(),
          "prediction and truth must be aligned");
  require(dt > 0.0 && lambda1 > 0.0, "dt and lambda1 must be positive");
  const Eigen::Index n = truth.rows();
  if (n == 0) return 0.0;
  const Eigen::RowVectorXd mean = truth.colwise().mean();
  const double spread = std::sqrt((truth.rowwise() - mean).rowwise().squaredNorm().mean());
  for (Eigen::Index t = 0; t < n; ++t) {
    const double err = (prediction.row(t) - truth.row(t)).norm() / spread;
    if (!(err <= kVptThreshold)) return static_cast<double>(t) * dt * lambda1;
  }
  return static_cast<double>(n) * dt * lambda1;
}

}  // namespace qrc::reservoir
