#include "qrc/analysis.hpp"

#include <limits>

#include "qrc/error.hpp"
#include "qrc/tangent.hpp"

namespace qrc::analysis {

stability::LyapunovRun closed_loop_spectrum(reservoir::Reservoir& reservoir, const Vector& r_init,
                                            const Matrix& w_out,
                                            const dynamics::MinMaxScaler& scaler,
                                            const stability::SpectrumOptions& options) {
  require(options.state_dim == reservoir.config().reservoir_dim(),
          "tangent space must be the reservoir space");
  Vector r = r_init;
  auto step = [&](Matrix& basis) {
    const auto jac = tangent::closed_loop_factors(r, w_out, reservoir, scaler);
    basis = jac.apply(basis);
    const Vector u_hat = w_out.transpose() * r;
    if (!u_hat.allFinite() || u_hat.cwiseAbs().maxCoeff() > dynamics::kDivergenceBound)
      throw ForecastDiverged(0, "closed-loop state left the bound during tangent propagation");
    r = reservoir.step(r, scaler.scale(u_hat));
  };
  return stability::lyapunov_spectrum(stability::TangentStep(step), options);
}

Vector conditional_spectrum(const reservoir::ReservoirConfig& config,
                            const dynamics::Trajectory& traj, const dynamics::DatasetSplit& split,
                            int n_exponents, std::uint64_t seed) {
  reservoir::Reservoir res(config);
  Vector r = Vector::Zero(config.reservoir_dim());
  for (Eigen::Index i = split.washout.begin; i < split.washout.end; ++i)
    r = res.step(r, split.scaler.scale(traj.states.row(i).transpose()));

  Eigen::Index index = split.train.begin;
  auto step = [&](Matrix& basis) {
    const Vector u = split.scaler.scale(traj.states.row(index).transpose());
    basis = tangent::conditional_factors(r, u, res).apply(basis);
    if (config.recurrent()) r = res.step(r, u);
    ++index;
  };
  stability::SpectrumOptions options;
  options.n_exponents = n_exponents;
  options.state_dim = config.reservoir_dim();
  options.n_steps = split.train.size();
  options.dt = traj.dt;
  options.seed = seed;
  return stability::lyapunov_spectrum(stability::TangentStep(step), options).result.exponents;
}

std::vector<double> conditional_les(const reservoir::ReservoirConfig& config,
                                    const dynamics::Trajectory& traj,
                                    const dynamics::DatasetSplit& split,
                                    const std::vector<double>& epsilons, int n_exponents,
                                    std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    require(eps > 0.0 && eps <= 1.0, "leak rate must lie in (0, 1]");
    if (eps == 1.0 && !config.recurrent()) {
      out.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    reservoir::ReservoirConfig c = config;
    c.epsilon = eps;
    out.push_back(conditional_spectrum(c, traj, split, n_exponents, seed)(0));
  }
  return out;
}

}  // namespace qrc::analysis
