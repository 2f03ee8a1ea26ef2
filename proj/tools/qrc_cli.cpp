// qrc: experiment front end. Exit status is 0 iff every requested seed
// succeeded, 1 if some failed, 2 for usage or configuration errors.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qrc/error.hpp"
#include "qrc/harness.hpp"
#include "qrc/presets.hpp"
#include "qrc/serialization.hpp"

namespace fs = std::filesystem;
using namespace qrc;
using harness::ExperimentConfig;
using Matrix = Eigen::MatrixXd;

namespace {

struct Common {
  std::string config_path;
  std::string out = "out";
  std::string seeds;
  int workers = 0;
  bool extended = false;
};

// "0-9", "1,4,7" or a mix such as "0-2,8".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw Error(ErrorCode::InvalidArgument, "empty seed range '" + item + "'");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, "bad seed list '" + text + "'");
    }
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "empty seed list");
  return seeds;
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : harness::load_config(c.config_path);
  if (!c.seeds.empty()) cfg.seeds = parse_seeds(c.seeds);
  if (c.workers > 0) cfg.workers = c.workers;
  return cfg;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "experiment JSON")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory (created if missing)");
  app->add_option("--seeds", c.seeds, "seed list, e.g. 0-9 or 0,3,5");
  app->add_option("--workers", c.workers, "concurrent jobs")->check(CLI::PositiveNumber);
  app->add_flag("--extended", c.extended, "allow long-running presets");
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void print_summary(const harness::ExperimentReport& report) {
  const auto& cfg = report.config;
  std::printf("%s: %zu run(s), %zu failed, %.1f s\n", cfg.experiment.c_str(), report.runs.size(),
              report.n_failed(), report.runtime_seconds);
  if (report.reference.exponents.size() > 0) {
    std::printf("  reference:");
    for (Eigen::Index i = 0; i < report.reference.exponents.size(); ++i)
      std::printf(" %.4f", report.reference.exponents(i));
    std::printf("\n");
  }
  for (const auto& p : report.points) {
    std::vector<const harness::SeedResult*> runs;
    for (const auto& r : report.runs)
      if (r.point.epsilon == p.epsilon && (r.point.value == p.value || (std::isnan(p.value) && std::isnan(r.point.value))))
        runs.push_back(&r);
    const auto s = harness::summarize(runs);
    std::printf("  eps %.3g", p.epsilon);
    if (!std::isnan(p.value)) std::printf(" %s %.6g", harness::to_string(cfg.sweep.axis), p.value);
    std::printf(" ok %zu/%zu", s.n_ok, runs.size());
    if (s.exponent_mean.size() > 0) {
      std::printf(" lambda");
      for (Eigen::Index i = 0; i < s.exponent_mean.size(); ++i) std::printf(" %.4f", s.exponent_mean(i));
    }
    if (s.ky_mean) std::printf(" ky %.4f", *s.ky_mean);
    if (s.max_cle_mean) std::printf(" max_cle %.4g", *s.max_cle_mean);
    if (s.vpt_mean) std::printf(" vpt %.2f", *s.vpt_mean);
    std::printf("\n");
  }
  for (const auto& r : report.runs)
    if (!r.ok) std::fprintf(stderr, "  seed %llu failed: %s\n", static_cast<unsigned long long>(r.seed), r.error.c_str());
}

int finish(const harness::ExperimentReport& report, const std::string& out) {
  const auto files = harness::emit_report(report, out);
  print_summary(report);
  std::printf("  wrote %zu file(s) to %s\n", files.size(), out.c_str());
  return report.n_failed() == 0 ? 0 : 1;
}

int run_tasks(const Common& c, harness::Tasks tasks) {
  ExperimentConfig cfg = resolve(c);
  cfg.tasks = tasks;
  return finish(harness::run_experiment(cfg), c.out);
}

int gen_data(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  cfg.validate();
  for (auto seed : cfg.seeds) {
    const auto traj = harness::make_trajectory(cfg, seed);
    const auto stem = fs::path(c.out) / (cfg.experiment + "_trajectory_seed" + std::to_string(seed));
    fs::create_directories(c.out);
    const auto path = stem.string() + ".csv";
    dynamics::write_trajectory_csv(traj, cfg.system.spec, path, stem.string() + ".json");
    std::printf("%s: %lld steps, lambda1 %.4f, %d steps per LT\n", path.c_str(),
                static_cast<long long>(traj.n_steps()), traj.lambda1, traj.lt_steps);
  }
  return 0;
}

harness::SweepPoint base_point(const ExperimentConfig& cfg) {
  return {std::numeric_limits<double>::quiet_NaN(), cfg.reservoir.epsilon};
}

int train(const Common& c) {
  ExperimentConfig cfg = resolve(c);
  cfg.sweep = {};
  cfg.validate();
  int failed = 0;
  std::ostringstream s;
  s << "seed,status,beta,train_nmse,model_dir,error\n";
  for (auto seed : cfg.seeds) {
    const std::string dir = (fs::path(c.out) / ("model_seed" + std::to_string(seed))).string();
    try {
      const auto t = harness::train_seed(cfg, seed, base_point(cfg));
      io::save_model(t.model, dir);
      s << seed << ",ok," << num(t.model.beta) << ',' << num(t.train_nmse) << ',' << dir << ",\n";
      std::printf("seed %llu: beta %g, train NMSE %.3e -> %s\n", static_cast<unsigned long long>(seed),
                  t.model.beta, t.train_nmse, dir.c_str());
    } catch (const Error& e) {
      ++failed;
      s << seed << ",failed,,,," << '"' << e.what() << '"' << '\n';
      std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(seed), e.what());
    }
  }
  io::write_file_atomic((fs::path(c.out) / (cfg.experiment + "_train.csv")).string(), s.str());
  return failed == 0 ? 0 : 1;
}

// Trains (or loads with --model) and writes the closed-loop forecast of the
// test segment next to the truth.
int forecast(const Common& c, const std::string& model_dir) {
  ExperimentConfig cfg = resolve(c);
  cfg.sweep = {};
  cfg.validate();
  if (!model_dir.empty() && cfg.seeds.size() != 1)
    throw Error(ErrorCode::InvalidArgument, "--model needs exactly one seed (the one it was trained on)");
  int failed = 0;
  std::ostringstream summary;
  summary << "seed,status,vpt_lt,error\n";
  for (auto seed : cfg.seeds) {
    try {
      auto t = harness::train_seed(cfg, seed, base_point(cfg));
      if (!model_dir.empty()) t.model = io::load_model(model_dir);
      reservoir::Reservoir res(t.model.config);
      const Matrix truth = t.traj.states.middleRows(t.split.test.begin, t.split.test.size());
      Matrix pred;
      std::string status = "ok";
      try {
        pred = reservoir::closed_loop_run(t.model.final_state, t.model.w_out, res, truth.rows(), t.model.scaler);
      } catch (const ForecastDiverged& e) {
        status = "diverged";
        pred = Matrix::Constant(truth.rows(), truth.cols(), std::numeric_limits<double>::quiet_NaN());
        std::fprintf(stderr, "seed %llu: %s\n", static_cast<unsigned long long>(seed), e.what());
      }
      const double v = status == "ok" ? reservoir::vpt(pred, truth, t.traj.dt, t.traj.lambda1) : 0.0;
      std::ostringstream s;
      s << "step,time_lt";
      for (Eigen::Index j = 0; j < truth.cols(); ++j) s << ",pred_x" << j;
      for (Eigen::Index j = 0; j < truth.cols(); ++j) s << ",true_x" << j;
      s << '\n';
      for (Eigen::Index k = 0; k < truth.rows(); ++k) {
        s << k << ',' << num(static_cast<double>(k + 1) * t.traj.dt * t.traj.lambda1);
        for (Eigen::Index j = 0; j < truth.cols(); ++j) s << ',' << num(pred(k, j));
        for (Eigen::Index j = 0; j < truth.cols(); ++j) s << ',' << num(truth(k, j));
        s << '\n';
      }
      io::write_file_atomic(
          (fs::path(c.out) / (cfg.experiment + "_forecast_seed" + std::to_string(seed) + ".csv")).string(), s.str());
      summary << seed << ',' << status << ',' << num(v) << ",\n";
      std::printf("seed %llu: VPT %.2f LT\n", static_cast<unsigned long long>(seed), v);
    } catch (const Error& e) {
      ++failed;
      summary << seed << ",failed,,\"" << e.what() << "\"\n";
      std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(seed), e.what());
    }
  }
  io::write_file_atomic((fs::path(c.out) / (cfg.experiment + "_vpt.csv")).string(), summary.str());
  return failed == 0 ? 0 : 1;
}

int repro(const Common& c, const std::string& name) {
  std::vector<const harness::Preset*> chosen;
  if (name == "all") {
    for (const auto& p : harness::presets())
      if (!p.extended || c.extended) chosen.push_back(&p);
  } else {
    const auto& p = harness::find_preset(name);
    if (p.extended && !c.extended)
      throw Error(ErrorCode::InvalidArgument, "preset '" + name + "' is long-running; pass --extended");
    chosen.push_back(&p);
  }
  int status = 0;
  for (const auto* p : chosen) {
    ExperimentConfig cfg = p->config;
    if (!c.seeds.empty()) cfg.seeds = parse_seeds(c.seeds);
    if (c.workers > 0) cfg.workers = c.workers;
    const std::string out = chosen.size() == 1 ? c.out : (fs::path(c.out) / p->name).string();
    status = std::max(status, finish(harness::run_experiment(cfg), out));
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum reservoir computing: training, forecasting and stability analysis"};
  app.require_subcommand(1);
  Common common;

  auto* gen = app.add_subcommand("gen-data", "integrate and write trajectories, one CSV per seed");
  auto* trn = app.add_subcommand("train", "train readouts and save model bundles");
  auto* fc = app.add_subcommand("forecast", "closed-loop forecast of the test segment plus VPT");
  auto* ly = app.add_subcommand("lyapunov", "closed-loop Lyapunov spectrum and Kaplan-Yorke dimension");
  auto* cle = app.add_subcommand("cle", "conditional Lyapunov exponents and synchronization class");
  auto* clv = app.add_subcommand("clv", "covariant Lyapunov vector angle statistics");
  auto* sl = app.add_subcommand("sweep-leak", "leak-rate sweep");
  auto* ss = app.add_subcommand("sweep-shots", "finite-sampling sweep over shot counts");
  auto* sn = app.add_subcommand("sweep-noise", "depolarizing or amplitude-damping intensity sweep");
  auto* rp = app.add_subcommand("repro", "run a named preset ('all' for every preset)");
  auto* ls = app.add_subcommand("presets", "list presets");
  auto* show = app.add_subcommand("show-config", "print a preset's configuration JSON");

  for (auto* sub : {gen, trn, fc, ly, cle, clv, sl, ss, sn, rp}) add_common(sub, common);

  std::string model_dir;
  fc->add_option("--model", model_dir, "model bundle written by train")->check(CLI::ExistingDirectory);

  std::vector<double> values, epsilons;
  std::string noise_kind = "depolarizing";
  sl->add_option("--values", values, "leak rates in (0, 1]");
  ss->add_option("--values", values, "shot counts");
  ss->add_option("--epsilons", epsilons, "leak rates crossed with each shot count");
  sn->add_option("--kind", noise_kind, "depolarizing | amplitude_damping");
  sn->add_option("--values", values, "channel intensities in [0, 1]");
  sn->add_option("--epsilons", epsilons, "leak rates crossed with each intensity");

  std::string preset_name;
  rp->add_option("preset", preset_name, "preset name")->required();
  show->add_option("preset", preset_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return gen_data(common);
    if (*trn) return train(common);
    if (*fc) return forecast(common, model_dir);
    if (*ly) return run_tasks(common, {false, true, false, false});
    if (*cle) return run_tasks(common, {false, false, true, false});
    if (*clv) return run_tasks(common, {false, true, false, true});
    if (*sl) {
      ExperimentConfig cfg = resolve(common);
      if (values.empty()) values = cfg.sweep.axis == harness::SweepAxis::Epsilon ? cfg.sweep.values
                                                                               : std::vector<double>{};
      if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no leak rates: pass --values");
      return finish(harness::sweep_leak_rate(cfg, values), common.out);
    }
    if (*ss) {
      ExperimentConfig cfg = resolve(common);
      if (!epsilons.empty()) cfg.sweep.epsilons = epsilons;
      if (values.empty()) values = cfg.sweep.axis == harness::SweepAxis::Shots ? cfg.sweep.values
                                                                             : std::vector<double>{1000, 5000, 10000, 25000, 50000};
      return finish(harness::sweep_shots(cfg, values), common.out);
    }
    if (*sn) {
      ExperimentConfig cfg = resolve(common);
      if (!epsilons.empty()) cfg.sweep.epsilons = epsilons;
      if (values.empty()) values = cfg.sweep.axis == harness::SweepAxis::NoiseP ? cfg.sweep.values
                                                                              : std::vector<double>{0.001, 0.01, 0.05, 0.1};
      return finish(harness::sweep_channel_noise(cfg, qcore::noise_kind_from_string(noise_kind), values), common.out);
    }
    if (*rp) return repro(common, preset_name);
    if (*ls) {
      for (const auto& p : harness::presets())
        std::printf("%-28s %s%s\n", p.name.c_str(), p.description.c_str(), p.extended ? " [--extended]" : "");
      return 0;
    }
    if (*show) {
      std::cout << harness::to_json(harness::find_preset(preset_name).config).dump(2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
