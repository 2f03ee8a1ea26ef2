#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "qrc/error.hpp"
#include "qrc/harness.hpp"
#include "qrc/serialization.hpp"

namespace qrc::harness {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

json jnum(double x) {
  // JSON has no infinities; keep them readable as strings.
  if (std::isfinite(x)) return x;
  return num(x);
}

json jnum(const std::optional<double>& x) { return x ? jnum(*x) : json(nullptr); }

json jvec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jnum(v(i)));
  return a;
}

std::string pair_name(std::size_t p, int d_t) {
  int k = 0;
  for (int i = 0; i < d_t; ++i)
    for (int j = i + 1; j < d_t; ++j, ++k)
      if (static_cast<std::size_t>(k) == p) return std::to_string(i + 1) + "-" + std::to_string(j + 1);
  return std::to_string(p);
}

double min_angle(const std::vector<double>& xs) {
  double m = 90.0;
  for (double x : xs) m = std::min(m, x);
  return m;
}

}  // namespace

std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());

  const auto& cfg = report.config;
  const std::string prefix = (fs::path(dir) / cfg.experiment).string() + "_";
  const int k = cfg.n_exponents();
  const bool sweeping = cfg.sweep.axis != SweepAxis::None;
  std::vector<std::string> written;
  auto emit = [&](const std::string& path, const std::string& text) {
    io::write_file_atomic(path, text);
    written.push_back(path);
  };

  // Per-run rows: the ensemble statistics below are recomputable from these.
  {
    std::ostringstream s;
    s << "point_value,epsilon,seed,status,beta,train_nmse";
    for (int i = 1; i <= k; ++i) s << ",lambda_" << i;
    s << ",ky_dimension,max_cle,gs_class,vpt_lt,error\n";
    for (const auto& r : report.runs) {
      s << num(r.point.value) << ',' << num(r.point.epsilon) << ',' << r.seed << ','
        << (r.ok ? "ok" : "failed") << ',' << (r.ok ? num(r.beta) : "") << ','
        << (r.ok ? num(r.train_nmse) : "");
      for (int i = 0; i < k; ++i) s << ',' << (i < r.exponents.size() ? num(r.exponents(i)) : "");
      s << ',' << num(r.ky) << ',' << num(r.max_cle) << ','
        << (r.gs_class ? stability::to_string(*r.gs_class) : "") << ',' << num(r.vpt) << ',';
      std::string err = r.error;
      for (char& c : err)
        if (c == ',' || c == '\n') c = ';';
      s << err << '\n';
    }
    emit(prefix + "seeds.csv", s.str());
  }

  {
    std::ostringstream s;
    s << "exponent_index,value\n";
    for (Eigen::Index i = 0; i < report.reference.exponents.size(); ++i)
      s << i + 1 << ',' << num(report.reference.exponents(i)) << '\n';
    emit(prefix + "reference_spectrum.csv", s.str());
  }

  // Group runs by sweep point, preserving point order.
  std::vector<std::vector<const SeedResult*>> grouped(report.points.size());
  for (std::size_t i = 0; i < report.runs.size(); ++i)
    grouped[i / cfg.seeds.size()].push_back(&report.runs[i]);
  std::vector<Summary> summaries;
  for (const auto& g : grouped) summaries.push_back(summarize(g));

  const Vector& target = report.reference.exponents;
  if (!sweeping && cfg.tasks.spectrum) {
    const Summary& s0 = summaries.front();
    std::ostringstream s;
    s << "exponent_index,target,inferred_mean,inferred_std\n";
    for (int i = 0; i < k; ++i) {
      s << i + 1 << ',' << (i < target.size() ? num(target(i)) : "") << ','
        << (i < s0.exponent_mean.size() ? num(s0.exponent_mean(i)) : "") << ','
        << (i < s0.exponent_std.size() ? num(s0.exponent_std(i)) : "") << '\n';
    }
    emit(prefix + "spectrum.csv", s.str());

    std::ostringstream ky;
    ky << "target,inferred_mean,inferred_std,error_percent\n";
    const auto& t = report.reference.ky;
    ky << num(t) << ',' << num(s0.ky_mean) << ',' << num(s0.ky_std) << ',';
    if (t && s0.ky_mean && *t != 0.0) ky << num(100.0 * std::abs(*s0.ky_mean - *t) / *t);
    ky << '\n';
    emit(prefix + "kaplan_yorke.csv", ky.str());
  }

  if (sweeping) {
    std::ostringstream s;
    s << to_string(cfg.sweep.axis) << ",epsilon,n_ok";
    for (int i = 1; i <= k; ++i) s << ",lambda_" << i << "_mean";
    for (int i = 1; i <= k; ++i) s << ",lambda_" << i << "_std";
    for (int i = 1; i <= k; ++i) s << ",lambda_" << i << "_abs_error";
    s << ",ky_mean,max_cle_mean,vpt_mean\n";
    for (std::size_t p = 0; p < report.points.size(); ++p) {
      const auto& sm = summaries[p];
      s << num(report.points[p].value) << ',' << num(report.points[p].epsilon) << ',' << sm.n_ok;
      const bool have = sm.exponent_mean.size() == k;
      for (int i = 0; i < k; ++i) s << ',' << (have ? num(sm.exponent_mean(i)) : "");
      for (int i = 0; i < k; ++i) s << ',' << (have ? num(sm.exponent_std(i)) : "");
      for (int i = 0; i < k; ++i)
        s << ',' << (have && i < target.size() ? num(std::abs(sm.exponent_mean(i) - target(i))) : "");
      s << ',' << num(sm.ky_mean) << ',' << num(sm.max_cle_mean) << ',' << num(sm.vpt_mean) << '\n';
    }
    emit(prefix + "sweep.csv", s.str());
  }

  if (cfg.tasks.clv && !report.reference.clv_angles.empty()) {
    std::ostringstream pdf;
    pdf << "source,pair,bin_left_deg,density\n";
    auto write_pdf = [&](const std::string& source, const Matrix& m) {
      for (Eigen::Index p = 0; p < m.rows(); ++p)
        for (Eigen::Index b = 0; b < m.cols(); ++b)
          pdf << source << ',' << pair_name(static_cast<std::size_t>(p), k) << ',' << b << ','
              << num(m(p, b)) << '\n';
    };
    write_pdf("reference", report.reference.clv_pdf);
    for (const auto& r : report.runs)
      if (r.ok && r.clv_pdf.size() > 0) write_pdf("seed_" + std::to_string(r.seed), r.clv_pdf);
    emit(prefix + "clv_pdf.csv", pdf.str());

    std::ostringstream sum;
    sum << "seed,pair,wasserstein1_deg,min_angle_deg,reference_min_angle_deg\n";
    for (const auto& r : report.runs) {
      if (!r.ok || r.clv_angles.empty()) continue;
      for (std::size_t p = 0; p < r.clv_angles.size(); ++p)
        sum << r.seed << ',' << pair_name(p, k) << ','
            << num(stability::wasserstein1(r.clv_angles[p], report.reference.clv_angles[p])) << ','
            << num(min_angle(r.clv_angles[p])) << ',' << num(min_angle(report.reference.clv_angles[p]))
            << '\n';
    }
    emit(prefix + "clv_summary.csv", sum.str());
  }

  json points = json::array();
  for (std::size_t p = 0; p < report.points.size(); ++p) {
    const auto& sm = summaries[p];
    points.push_back({{"value", jnum(report.points[p].value)},
                      {"epsilon", report.points[p].epsilon},
                      {"n_ok", sm.n_ok},
                      {"exponent_mean", jvec(sm.exponent_mean)},
                      {"exponent_std", jvec(sm.exponent_std)},
                      {"ky_mean", jnum(sm.ky_mean)},
                      {"ky_std", jnum(sm.ky_std)},
                      {"max_cle_mean", jnum(sm.max_cle_mean)},
                      {"vpt_mean", jnum(sm.vpt_mean)},
                      {"vpt_std", jnum(sm.vpt_std)}});
  }
  json failures = json::array();
  for (const auto& r : report.runs)
    if (!r.ok) failures.push_back({{"seed", r.seed}, {"epsilon", r.point.epsilon}, {"error", r.error}});
  // The worker count is an execution detail; it lives in runtime.json so the
  // summary stays identical across schedules.
  json config_echo = to_json(cfg);
  config_echo.erase("workers");
  const json summary{{"config", config_echo},
                     {"reference", {{"exponents", jvec(report.reference.exponents)},
                                    {"ky_dimension", jnum(report.reference.ky)}}},
                     {"points", points},
                     {"n_runs", report.runs.size()},
                     {"n_failed", report.n_failed()},
                     {"failures", failures}};
  emit((fs::path(dir) / "summary.json").string(), summary.dump(2) + "\n");
  emit((fs::path(dir) / "runtime.json").string(),
       json{{"runtime_seconds", report.runtime_seconds}, {"workers", cfg.workers}}.dump(2) + "\n");
  return written;
}

}  // namespace qrc::harness
