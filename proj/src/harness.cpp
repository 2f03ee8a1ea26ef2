#include "qrc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <set>
#include <thread>

#include "qrc/analysis.hpp"
#include "qrc/error.hpp"
#include "qrc/serialization.hpp"

namespace qrc::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::Index lt_to_steps(double lt, int lt_steps) {
  return static_cast<Eigen::Index>(std::llround(lt * lt_steps));
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  require(j.is_object(), where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    require(known.count(key) > 0, "unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::Epsilon: return "epsilon";
    case SweepAxis::Shots: return "shots";
    case SweepAxis::NoiseP: return "noise_p";
  }
  return "none";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "none") return SweepAxis::None;
  if (name == "epsilon") return SweepAxis::Epsilon;
  if (name == "shots") return SweepAxis::Shots;
  if (name == "noise_p") return SweepAxis::NoiseP;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep axis '" + name + "'");
}

void ExperimentConfig::validate() const {
  require(!experiment.empty(), "experiment name must not be empty");
  system.spec.validate();
  require(system.dt > 0.0, "dt must be positive");
  require(!system.lambda1 || *system.lambda1 > 0.0, "lambda1 must be positive");
  require(system.spinup_lt >= 0.0 && system.reference_lt > 0.0, "reference lengths must be positive");
  require(split.washout_lt >= 0.0 && split.train_lt > 0.0 && split.test_lt >= 0.0,
          "split lengths must be non-negative with a positive training range");
  require(reservoir.qubits >= 1 && reservoir.qubits <= 20, "qubit count must lie in [1, 20]");
  require(reservoir.epsilon > 0.0 && reservoir.epsilon <= 1.0, "leak rate must lie in (0, 1]");
  require(!reservoir.beta_grid.empty(), "beta grid must not be empty");
  require(reservoir.val_fraction > 0.0 && reservoir.val_fraction <= 0.5,
          "validation fraction must lie in (0, 0.5]");
  require(n_exponents() >= 1 && n_exponents() <= system.spec.dim,
          "exponent count must lie in [1, D]");
  require(stability.skip_lt >= 0.0 && stability.window_lt > 0.0 && stability.clv_backward_lt >= 0.0,
          "stability windows must be positive");
  require(!seeds.empty(), "seed list must not be empty");
  require(workers >= 1, "worker count must be at least 1");
  if (sweep.axis != SweepAxis::None) require(!sweep.values.empty(), "sweep needs values");
  for (double v : sweep.values) {
    if (sweep.axis == SweepAxis::Epsilon) require(v > 0.0 && v <= 1.0, "leak rates must lie in (0, 1]");
    if (sweep.axis == SweepAxis::Shots) require(v >= 1.0 && v == std::floor(v), "shot counts must be integers >= 1");
    if (sweep.axis == SweepAxis::NoiseP) require(v >= 0.0 && v <= 1.0, "noise intensities must lie in [0, 1]");
  }
  for (double e : sweep.epsilons) require(e > 0.0 && e <= 1.0, "leak rates must lie in (0, 1]");
}

json to_json(const ExperimentConfig& c) {
  json system{{"kind", dynamics::to_string(c.system.spec.kind)},
              {"params", c.system.spec.params},
              {"dim", c.system.spec.dim},
              {"dt", c.system.dt},
              {"spinup_lt", c.system.spinup_lt},
              {"reference_lt", c.system.reference_lt},
              {"reference_seed", c.system.reference_seed}};
  if (c.system.lambda1) system["lambda1"] = *c.system.lambda1;
  return {
      {"experiment", c.experiment},
      {"system", system},
      {"split",
       {{"washout_lt", c.split.washout_lt}, {"train_lt", c.split.train_lt}, {"test_lt", c.split.test_lt}}},
      {"reservoir",
       {{"variant", reservoir::to_string(c.reservoir.variant)},
        {"qubits", c.reservoir.qubits},
        {"epsilon", c.reservoir.epsilon},
        {"beta_grid", c.reservoir.beta_grid},
        {"val_fraction", c.reservoir.val_fraction},
        {"angle_scale", c.reservoir.angle_scale},
        {"angle_offset", c.reservoir.angle_offset},
        {"slot_fill", qcore::to_string(c.reservoir.fill)},
        {"noise", qcore::to_string(c.reservoir.noise)},
        {"shots", c.reservoir.shots},
        {"noise_p", c.reservoir.noise_p}}},
      {"stability",
       {{"n_exponents", c.stability.n_exponents},
        {"skip_lt", c.stability.skip_lt},
        {"window_lt", c.stability.window_lt},
        {"clv_backward_lt", c.stability.clv_backward_lt}}},
      {"tasks",
       {{"forecast", c.tasks.forecast}, {"spectrum", c.tasks.spectrum}, {"cle", c.tasks.cle}, {"clv", c.tasks.clv}}},
      {"sweep",
       {{"axis", to_string(c.sweep.axis)}, {"values", c.sweep.values}, {"epsilons", c.sweep.epsilons}}},
      {"seeds", c.seeds},
      {"workers", c.workers}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, {"experiment", "system", "split", "reservoir", "stability", "tasks", "sweep", "seeds", "workers"},
                 "config");
  read(j, "experiment", c.experiment);
  if (j.contains("system")) {
    const json& s = j.at("system");
    reject_unknown(s, {"kind", "params", "dim", "dt", "lambda1", "spinup_lt", "reference_lt", "reference_seed"},
                   "system");
    const auto kind = dynamics::system_kind_from_string(s.value("kind", std::string("lorenz63")));
    if (kind == dynamics::SystemKind::Lorenz96)
      c.system.spec = dynamics::SystemSpec::lorenz96(s.value("dim", 10));
    else
      c.system.spec = dynamics::SystemSpec::lorenz63();
    read(s, "params", c.system.spec.params);
    read(s, "dim", c.system.spec.dim);
    read(s, "dt", c.system.dt);
    if (s.contains("lambda1") && !s.at("lambda1").is_null()) c.system.lambda1 = s.at("lambda1").get<double>();
    read(s, "spinup_lt", c.system.spinup_lt);
    read(s, "reference_lt", c.system.reference_lt);
    read(s, "reference_seed", c.system.reference_seed);
  }
  if (j.contains("split")) {
    const json& s = j.at("split");
    reject_unknown(s, {"washout_lt", "train_lt", "test_lt"}, "split");
    read(s, "washout_lt", c.split.washout_lt);
    read(s, "train_lt", c.split.train_lt);
    read(s, "test_lt", c.split.test_lt);
  }
  if (j.contains("reservoir")) {
    const json& r = j.at("reservoir");
    reject_unknown(r, {"variant", "qubits", "epsilon", "beta_grid", "val_fraction", "angle_scale", "angle_offset",
                       "slot_fill", "noise", "shots", "noise_p"},
                   "reservoir");
    if (r.contains("variant")) c.reservoir.variant = reservoir::variant_from_string(r.at("variant"));
    read(r, "qubits", c.reservoir.qubits);
    read(r, "epsilon", c.reservoir.epsilon);
    read(r, "beta_grid", c.reservoir.beta_grid);
    read(r, "val_fraction", c.reservoir.val_fraction);
    read(r, "angle_scale", c.reservoir.angle_scale);
    read(r, "angle_offset", c.reservoir.angle_offset);
    if (r.contains("slot_fill")) c.reservoir.fill = qcore::slot_fill_from_string(r.at("slot_fill"));
    if (r.contains("noise")) c.reservoir.noise = qcore::noise_kind_from_string(r.at("noise"));
    read(r, "shots", c.reservoir.shots);
    read(r, "noise_p", c.reservoir.noise_p);
  }
  if (j.contains("stability")) {
    const json& s = j.at("stability");
    reject_unknown(s, {"n_exponents", "skip_lt", "window_lt", "clv_backward_lt"}, "stability");
    read(s, "n_exponents", c.stability.n_exponents);
    read(s, "skip_lt", c.stability.skip_lt);
    read(s, "window_lt", c.stability.window_lt);
    read(s, "clv_backward_lt", c.stability.clv_backward_lt);
  }
  if (j.contains("tasks")) {
    const json& t = j.at("tasks");
    reject_unknown(t, {"forecast", "spectrum", "cle", "clv"}, "tasks");
    read(t, "forecast", c.tasks.forecast);
    read(t, "spectrum", c.tasks.spectrum);
    read(t, "cle", c.tasks.cle);
    read(t, "clv", c.tasks.clv);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown(s, {"axis", "values", "epsilons"}, "sweep");
    if (s.contains("axis")) c.sweep.axis = sweep_axis_from_string(s.at("axis"));
    read(s, "values", c.sweep.values);
    read(s, "epsilons", c.sweep.epsilons);
  }
  read(j, "seeds", c.seeds);
  read(j, "workers", c.workers);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
  return config_from_json(j);
}

std::size_t ExperimentReport::n_failed() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.ok ? 0 : 1;
  return n;
}

namespace {

double leading_exponent(const ExperimentConfig& config) {
  if (config.system.lambda1) return *config.system.lambda1;
  if (auto l = config.system.spec.default_lambda1()) return *l;
  // Estimate from a short run when no reference value is known.
  dynamics::TrajectoryOptions o;
  o.dt = config.system.dt;
  o.n_steps = 20000;
  o.n_discard = 5000;
  o.seed = config.system.reference_seed;
  o.lambda1 = 1.0;
  const auto traj = dynamics::generate_trajectory(config.system.spec, o);
  return dynamics::reference_lyapunov(config.system.spec, traj, 1, 1000)(0);
}

}  // namespace

dynamics::Trajectory make_trajectory(const ExperimentConfig& config, std::uint64_t seed) {
  const double lambda1 = leading_exponent(config);
  const int lt = std::max(1, static_cast<int>(std::lround(1.0 / (lambda1 * config.system.dt))));
  dynamics::TrajectoryOptions o;
  o.dt = config.system.dt;
  o.lambda1 = lambda1;
  o.seed = seed;
  o.n_discard = lt_to_steps(config.system.spinup_lt, lt);
  o.n_steps = lt_to_steps(config.split.washout_lt, lt) + lt_to_steps(config.split.train_lt, lt) +
              lt_to_steps(config.split.test_lt, lt) + 1;
  return dynamics::generate_trajectory(config.system.spec, o);
}

reservoir::ReservoirConfig make_reservoir_config(const ExperimentConfig& config, std::uint64_t seed,
                                                 const SweepPoint& point) {
  const auto& rs = config.reservoir;
  reservoir::ReservoirConfig rc;
  rc.layout = qcore::CircuitLayout::random(rs.qubits, config.system.spec.dim, seed, rs.fill,
                                           rs.angle_scale, rs.angle_offset);
  rc.epsilon = point.epsilon;
  rc.variant = rs.variant;
  rc.beta_grid = rs.beta_grid;
  if (rc.recurrent()) rc.projection = reservoir::random_projection(rs.qubits, rc.reservoir_dim(), seed);
  rc.noise.kind = rs.noise;
  rc.noise.shots = rs.shots;
  rc.noise.p = rs.noise_p;
  rc.noise.seed = seed;
  if (config.sweep.axis == SweepAxis::Shots) {
    rc.noise.kind = qcore::NoiseKind::Sampling;
    rc.noise.shots = static_cast<long>(point.value);
  } else if (config.sweep.axis == SweepAxis::NoiseP) {
    require(rs.noise == qcore::NoiseKind::Depolarizing || rs.noise == qcore::NoiseKind::AmplitudeDamping,
            "a noise-intensity sweep needs a channel noise kind");
    rc.noise.p = point.value;
  }
  rc.validate();
  return rc;
}

namespace {

struct LiveRun {
  TrainedRun trained;
  std::unique_ptr<reservoir::Reservoir> reservoir;
};

LiveRun train_live(const ExperimentConfig& config, std::uint64_t seed, const SweepPoint& point) {
  LiveRun live;
  auto& t = live.trained;
  t.traj = make_trajectory(config, seed);
  t.split = dynamics::split_and_scale(t.traj, config.split.washout_lt, config.split.train_lt,
                                      config.split.test_lt);
  live.reservoir = std::make_unique<reservoir::Reservoir>(make_reservoir_config(config, seed, point));
  const auto ol = reservoir::open_loop_run(t.traj, t.split, *live.reservoir);
  const auto& grid = config.reservoir.beta_grid;
  const double beta = grid.size() == 1
                          ? grid.front()
                          : reservoir::select_beta(ol.states, ol.targets, grid, config.reservoir.val_fraction);
  t.model.config = live.reservoir->config();
  t.model.scaler = t.split.scaler;
  t.model.beta = beta;
  t.model.w_out = reservoir::train_readout(ol.states, ol.targets, beta);
  t.model.final_state = ol.final_state;
  const Matrix centered = ol.targets.colwise() - ol.targets.rowwise().mean();
  t.train_nmse = (t.model.w_out.transpose() * ol.states - ol.targets).squaredNorm() / centered.squaredNorm();
  return live;
}

std::vector<std::vector<double>> angle_samples(const stability::AngleStats& stats) {
  std::vector<std::vector<double>> out;
  for (Eigen::Index p = 0; p < stats.angles.rows(); ++p) {
    std::vector<double> row(static_cast<std::size_t>(stats.angles.cols()));
    for (Eigen::Index t = 0; t < stats.angles.cols(); ++t) row[static_cast<std::size_t>(t)] = stats.angles(p, t);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

TrainedRun train_seed(const ExperimentConfig& config, std::uint64_t seed, const SweepPoint& point) {
  return std::move(train_live(config, seed, point).trained);
}

Reference compute_reference(const ExperimentConfig& config) {
  const auto& spec = config.system.spec;
  const double lambda1 = leading_exponent(config);
  const int lt = std::max(1, static_cast<int>(std::lround(1.0 / (lambda1 * config.system.dt))));
  dynamics::TrajectoryOptions o;
  o.dt = config.system.dt;
  o.lambda1 = lambda1;
  o.seed = config.system.reference_seed;
  o.n_discard = lt_to_steps(config.system.spinup_lt, lt);
  const Eigen::Index skip = lt_to_steps(config.stability.skip_lt, lt);
  o.n_steps = skip + lt_to_steps(config.system.reference_lt, lt) + 1;
  const auto traj = dynamics::generate_trajectory(spec, o);

  Reference ref;
  ref.exponents = dynamics::reference_lyapunov(spec, traj, spec.dim, skip);
  Vector sorted = ref.exponents;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  try {
    ref.ky = stability::kaplan_yorke(sorted);
  } catch (const Error&) {
  }
  if (config.tasks.clv) {
    Eigen::Index index = 0;
    stability::SpectrumOptions so;
    so.n_exponents = config.n_exponents();
    so.state_dim = spec.dim;
    so.n_skip = skip;
    so.n_steps = lt_to_steps(config.stability.window_lt, lt);
    so.dt = traj.dt;
    so.seed = config.system.reference_seed;
    so.save_factors = true;
    require(so.n_skip + so.n_steps < traj.n_steps(), "reference run shorter than the CLV window");
    auto run = stability::lyapunov_spectrum(
        [&] { return dynamics::rk4_step_jacobian(spec, traj.states.row(index).transpose(), traj.dt); },
        [&] { ++index; }, so);
    const auto clvs = stability::clv_backward(run.history, lt_to_steps(config.stability.clv_backward_lt, lt),
                                              config.system.reference_seed);
    const auto stats = stability::clv_angles(clvs);
    ref.clv_angles = angle_samples(stats);
    ref.clv_pdf = stats.pdf;
  }
  return ref;
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const SweepPoint& point,
                    const Reference& reference) {
  SeedResult out;
  out.seed = seed;
  out.point = point;
  try {
    LiveRun live = train_live(config, seed, point);
    const auto& t = live.trained;
    auto& res = *live.reservoir;
    out.beta = t.model.beta;
    out.train_nmse = t.train_nmse;
    const double lambda1 = t.traj.lambda1;
    const int lt = t.traj.lt_steps;

    if (config.tasks.forecast && t.split.test.size() > 0) {
      const Matrix truth = t.traj.states.middleRows(t.split.test.begin, t.split.test.size());
      try {
        const Matrix pred =
            reservoir::closed_loop_run(t.model.final_state, t.model.w_out, res, truth.rows(), t.split.scaler);
        out.vpt = reservoir::vpt(pred, truth, t.traj.dt, lambda1);
      } catch (const ForecastDiverged& e) {
        // The error threshold was crossed no later than the blow-up.
        out.vpt = static_cast<double>(e.step()) * t.traj.dt * lambda1;
      }
    }
    if (config.tasks.cle) {
      const double eps = res.config().epsilon;
      out.max_cle = (eps == 1.0 && !res.config().recurrent())
                        ? -std::numeric_limits<double>::infinity()
                        : analysis::conditional_spectrum(res.config(), t.traj, t.split, config.n_exponents(),
                                                         seed)(0);
      if (reference.exponents.size() > 0 && reference.exponents.minCoeff() < 0.0)
        out.gs_class = stability::classify_gs(*out.max_cle, reference.exponents.minCoeff()).gs_class;
    }
    if (config.tasks.spectrum || config.tasks.clv) {
      stability::SpectrumOptions so;
      so.n_exponents = config.n_exponents();
      so.state_dim = res.config().reservoir_dim();
      so.n_skip = lt_to_steps(config.stability.skip_lt, lt);
      so.n_steps = lt_to_steps(config.stability.window_lt, lt);
      so.dt = t.traj.dt;
      so.seed = seed;
      so.save_factors = config.tasks.clv;
      auto run = analysis::closed_loop_spectrum(res, t.model.final_state, t.model.w_out, t.split.scaler, so);
      out.exponents = run.result.exponents;
      out.ky = run.result.ky_dimension;
      if (config.tasks.clv) {
        // Covariant directions are compared in physical space: W_out^T is the
        // linear map from reservoir tangents to output tangents.
        const Matrix projection = t.model.w_out.transpose();
        const auto clvs = stability::clv_backward(
            run.history, lt_to_steps(config.stability.clv_backward_lt, lt), seed, &projection);
        const auto stats = stability::clv_angles(clvs);
        out.clv_angles = angle_samples(stats);
        out.clv_pdf = stats.pdf;
      }
    }
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
  } catch (const std::exception& e) {
    out.error = std::string("unexpected: ") + e.what();
  }
  return out;
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config) {
  std::vector<SweepPoint> points;
  const double base = config.reservoir.epsilon;
  switch (config.sweep.axis) {
    case SweepAxis::None:
      points.push_back({kNaN, base});
      break;
    case SweepAxis::Epsilon:
      for (double v : config.sweep.values) points.push_back({v, v});
      break;
    case SweepAxis::Shots:
    case SweepAxis::NoiseP: {
      const std::vector<double> eps =
          config.sweep.epsilons.empty() ? std::vector<double>{base} : config.sweep.epsilons;
      for (double v : config.sweep.values)
        for (double e : eps) points.push_back({v, e});
      break;
    }
  }
  return points;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config;
  report.reference = compute_reference(config);
  report.points = sweep_points(config);

  struct Job {
    SweepPoint point;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& p : report.points)
    for (auto s : config.seeds) jobs.push_back({p, s});
  report.runs.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++)
      report.runs[i] = run_seed(config, jobs[i].seed, jobs[i].point, report.reference);
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.workers), jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExperimentReport sweep_leak_rate(ExperimentConfig config, const std::vector<double>& epsilons) {
  config.sweep = {SweepAxis::Epsilon, epsilons, {}};
  return run_experiment(config);
}

ExperimentReport sweep_shots(ExperimentConfig config, const std::vector<double>& shot_counts) {
  config.sweep.axis = SweepAxis::Shots;
  config.sweep.values = shot_counts;
  return run_experiment(config);
}

ExperimentReport sweep_channel_noise(ExperimentConfig config, qcore::NoiseKind kind,
                                     const std::vector<double>& intensities) {
  require(kind == qcore::NoiseKind::Depolarizing || kind == qcore::NoiseKind::AmplitudeDamping,
          "channel noise kind expected");
  config.reservoir.noise = kind;
  config.sweep.axis = SweepAxis::NoiseP;
  config.sweep.values = intensities;
  return run_experiment(config);
}

Summary summarize(const std::vector<const SeedResult*>& runs) {
  Summary s;
  std::vector<const SeedResult*> ok;
  for (const auto* r : runs)
    if (r->ok) ok.push_back(r);
  s.n_ok = ok.size();

  auto mean_std = [](const std::vector<double>& xs) -> std::pair<double, double> {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    return {m, xs.size() > 1 ? std::sqrt(v / static_cast<double>(xs.size() - 1)) : 0.0};
  };
  auto collect = [&](auto getter) {
    std::vector<double> xs;
    for (const auto* r : ok)
      if (auto v = getter(*r)) xs.push_back(*v);
    return xs;
  };

  std::vector<const SeedResult*> with_spec;
  for (const auto* r : ok)
    if (r->exponents.size() > 0) with_spec.push_back(r);
  if (!with_spec.empty()) {
    const Eigen::Index k = with_spec.front()->exponents.size();
    s.exponent_mean.resize(k);
    s.exponent_std.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      std::vector<double> xs;
      for (const auto* r : with_spec) xs.push_back(r->exponents(i));
      std::tie(s.exponent_mean(i), s.exponent_std(i)) = mean_std(xs);
    }
  }
  if (auto xs = collect([](const SeedResult& r) { return r.ky; }); !xs.empty()) {
    const auto [m, sd] = mean_std(xs);
    s.ky_mean = m;
    s.ky_std = sd;
  }
  if (auto xs = collect([](const SeedResult& r) { return r.max_cle; }); !xs.empty())
    s.max_cle_mean = mean_std(xs).first;
  if (auto xs = collect([](const SeedResult& r) { return r.vpt; }); !xs.empty()) {
    const auto [m, sd] = mean_std(xs);
    s.vpt_mean = m;
    s.vpt_std = sd;
  }
  return s;
}

}  // namespace qrc::harness
