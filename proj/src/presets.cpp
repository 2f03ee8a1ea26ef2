#include "qrc/presets.hpp"

#include <numeric>

#include "qrc/error.hpp"

namespace qrc::harness {

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), std::uint64_t{0});
  return s;
}

ExperimentConfig lorenz63_base() {
  ExperimentConfig c;
  c.experiment = "lorenz63";
  c.system.spec = dynamics::SystemSpec::lorenz63();
  c.system.dt = 0.01;
  c.split = {5.0, 20.0, 10.0};
  c.reservoir.qubits = 7;
  c.reservoir.epsilon = 0.21;
  c.stability.window_lt = 200.0;
  c.seeds = seed_range(10);
  return c;
}

ExperimentConfig lorenz96_base(int dim) {
  ExperimentConfig c;
  c.experiment = "lorenz96_" + std::to_string(dim) + "d";
  c.system.spec = dynamics::SystemSpec::lorenz96(dim);
  c.split = {10.0, 200.0, 10.0};
  c.reservoir.qubits = dim == 10 ? 9 : 13;
  c.reservoir.epsilon = dim == 10 ? 0.15 : 0.12;
  c.stability.window_lt = 100.0;
  c.system.reference_lt = 500.0;
  c.seeds = seed_range(10);
  return c;
}

std::vector<Preset> build() {
  std::vector<Preset> out;

  {
    ExperimentConfig c = lorenz63_base();
    c.experiment = "smoke";
    c.reservoir.qubits = 3;
    c.split = {2.0, 10.0, 3.0};
    c.stability = {0, 1.0, 10.0, 1.0};
    c.system.spinup_lt = 20.0;
    c.system.reference_lt = 20.0;
    c.tasks.clv = true;
    c.seeds = {0, 1};
    out.push_back({"smoke", "3-qubit Lorenz-63 pipeline, seconds to run", false, c});
  }
  {
    ExperimentConfig c = lorenz63_base();
    out.push_back({"lorenz63-spectrum",
                   "Lorenz-63 Lyapunov spectrum and Kaplan-Yorke dimension, 7 qubits, 10 seeds", false, c});
  }
  {
    ExperimentConfig c = lorenz63_base();
    c.experiment = "lorenz63_clv";
    c.tasks = {false, true, false, true};
    c.stability.window_lt = 100.0;
    out.push_back({"lorenz63-clv", "Lorenz-63 covariant Lyapunov vector angle PDFs vs ground truth", false, c});
  }
  {
    ExperimentConfig c = lorenz63_base();
    c.experiment = "lorenz63_leak";
    c.stability.window_lt = 100.0;
    c.seeds = seed_range(5);
    c.sweep = {SweepAxis::Epsilon, {0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, {}};
    out.push_back({"lorenz63-leak-sweep", "Lorenz-63 leak-rate sweep: exponents, max CLE, VPT", false, c});
  }
  {
    ExperimentConfig c = lorenz63_base();
    c.experiment = "lorenz63_qrc_leak";
    c.reservoir.variant = reservoir::Variant::QRC;
    c.stability.window_lt = 100.0;
    c.seeds = seed_range(5);
    c.sweep = {SweepAxis::Epsilon, {0.05, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, {}};
    out.push_back({"lorenz63-qrc-leak-sweep", "Recurrent QRC leak-rate sweep on Lorenz-63", false, c});
  }
  {
    ExperimentConfig c = lorenz63_base();
    c.experiment = "lorenz63_shots";
    c.reservoir.qubits = 8;
    // Shot noise swamps the narrow default encoding: a full radian of swing
    // keeps dp/du well above the per-shot fluctuation.
    c.reservoir.angle_offset = 0.0;
    c.reservoir.angle_scale = 1.0;
    c.stability.window_lt = 100.0;
    c.seeds = seed_range(5);
    c.tasks.cle = false;
    c.sweep = {SweepAxis::Shots, {1000, 5000, 10000, 25000, 50000}, {0.1, 0.2, 0.3, 0.4, 0.5}};
    out.push_back({"lorenz63-shots", "Finite-sampling noise: leading exponent vs shots and leak rate, 8 qubits",
                   false, c});
  }
  for (auto kind : {qcore::NoiseKind::Depolarizing, qcore::NoiseKind::AmplitudeDamping}) {
    ExperimentConfig c = lorenz63_base();
    const bool dep = kind == qcore::NoiseKind::Depolarizing;
    c.experiment = dep ? "lorenz63_depolarizing" : "lorenz63_amplitude_damping";
    c.reservoir.noise = kind;
    c.stability.window_lt = 100.0;
    c.seeds = seed_range(3);
    c.tasks.cle = false;
    c.sweep = {SweepAxis::NoiseP, {0.001, 0.01, 0.05, 0.1}, {0.1, 0.2, 0.3, 0.4, 0.5}};
    out.push_back({dep ? "lorenz63-depolarizing" : "lorenz63-amplitude-damping",
                   dep ? "Depolarizing channels after every gate, 7 qubits"
                       : "Amplitude-damping channels after every gate, 7 qubits",
                   false, c});
  }
  {
    ExperimentConfig c = lorenz96_base(10);
    out.push_back({"lorenz96-10d", "10-D Lorenz-96 spectrum and Kaplan-Yorke dimension, 9 qubits", false, c});
  }
  {
    ExperimentConfig c = lorenz96_base(10);
    c.experiment = "lorenz96_10d_leak";
    c.seeds = seed_range(3);
    c.stability.window_lt = 50.0;
    c.sweep = {SweepAxis::Epsilon, {0.01, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.7, 1.0}, {}};
    out.push_back({"lorenz96-10d-leak-sweep", "10-D Lorenz-96 leak-rate sweep", true, c});
  }
  {
    ExperimentConfig c = lorenz96_base(20);
    c.stability.window_lt = 50.0;
    c.system.reference_lt = 200.0;
    c.tasks.cle = false;
    out.push_back({"lorenz96-20d", "20-D Lorenz-96, 13 qubits (N_r = 8192)", true, c});
  }
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw Error(ErrorCode::InvalidArgument, "unknown preset '" + name + "'");
}

}  // namespace qrc::harness
