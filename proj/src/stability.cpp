#include "qrc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qrc/error.hpp"
#include "qrc/random.hpp"

namespace qrc::stability {

std::pair<Matrix, Matrix> positive_qr(const Matrix& w) {
  const Eigen::Index n = w.rows(), k = w.cols();
  Eigen::HouseholderQR<Matrix> qr(w);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(std::abs(r(i, i)) >= 1e-300))
      throw Error(ErrorCode::TangentDegenerate,
                  "tangent basis collapsed in direction " + std::to_string(i + 1));
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

LyapunovRun lyapunov_spectrum(const TangentStep& step, const SpectrumOptions& options) {
  const int d_t = options.n_exponents;
  require(d_t >= 1 && d_t <= options.state_dim, "exponent count must lie in [1, state dim]");
  require(options.n_steps >= 1 && options.n_skip >= 0, "need at least one averaging step");
  require(options.dt > 0.0, "dt must be positive");

  Rng rng = make_rng(options.seed, Stream::TangentBasis);
  std::normal_distribution<double> normal;
  Matrix basis(options.state_dim, d_t);
  for (Eigen::Index j = 0; j < basis.cols(); ++j)
    for (Eigen::Index i = 0; i < basis.rows(); ++i) basis(i, j) = normal(rng);
  basis = positive_qr(basis).first;

  LyapunovRun run;
  run.history.finite_time_les.resize(d_t, options.n_steps);
  run.result.convergence.resize(d_t, options.n_steps);
  if (options.save_factors) {
    run.history.q.reserve(static_cast<std::size_t>(options.n_steps));
    run.history.r.reserve(static_cast<std::size_t>(options.n_steps));
  }
  Vector sum = Vector::Zero(d_t);
  for (Eigen::Index k = 0; k < options.n_skip + options.n_steps; ++k) {
    step(basis);
    auto [q, r] = positive_qr(basis);
    basis = q;
    if (k < options.n_skip) continue;
    const Eigen::Index j = k - options.n_skip;
    const Vector local = r.diagonal().array().log() / options.dt;
    run.history.finite_time_les.col(j) = local;
    sum += local;
    run.result.convergence.col(j) = sum / static_cast<double>(j + 1);
    if (options.save_factors) {
      run.history.q.push_back(std::move(q));
      run.history.r.push_back(std::move(r));
    }
  }
  run.result.exponents = sum / static_cast<double>(options.n_steps);
  // Finite-time estimates of nearly equal exponents can swap order; the
  // dimension is taken over the sorted spectrum.
  Vector sorted = run.result.exponents;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  try {
    run.result.ky_dimension = kaplan_yorke(sorted);
  } catch (const Error&) {
    // Too few exponents to close the sum: dimension undefined.
  }
  return run;
}

LyapunovRun lyapunov_spectrum(const std::function<Matrix()>& jacobian,
                              const std::function<void()>& advance,
                              const SpectrumOptions& options) {
  auto step = [&](Matrix& basis) {
    const Matrix j = jacobian();
    require(j.rows() == options.state_dim && j.cols() == options.state_dim,
            "Jacobian shape does not match the state dimension");
    basis = j * basis;
    advance();
  };
  return lyapunov_spectrum(TangentStep(step), options);
}

double kaplan_yorke(const Vector& exponents) {
  require(exponents.size() >= 1, "empty spectrum");
  for (Eigen::Index i = 1; i < exponents.size(); ++i)
    require(exponents(i) <= exponents(i - 1), "spectrum must be sorted in descending order");
  if (exponents(0) < 0.0) return 0.0;
  double partial = 0.0;
  for (Eigen::Index l = 0; l < exponents.size(); ++l) {
    if (partial + exponents(l) <= 0.0) {
      if (l == 0) return 0.0;
      // l exponents keep the sum positive; the next one closes it.
      return static_cast<double>(l) + partial / std::abs(exponents(l));
    }
    partial += exponents(l);
  }
  throw Error(ErrorCode::InvalidArgument,
              "every partial sum is positive; more negative exponents are needed");
}

CLVResult clv_backward(const TangentHistory& history, Eigen::Index backward_skip,
                       std::uint64_t seed, const Matrix* projection) {
  const auto n = static_cast<Eigen::Index>(history.q.size());
  require(n == static_cast<Eigen::Index>(history.r.size()) && n >= 2,
          "history must hold saved Q and R factors");
  require(backward_skip >= 0 && backward_skip < n - 1, "backward transient exceeds the history");
  const Eigen::Index d_t = history.r.front().rows();
  if (projection)
    require(projection->cols() == history.q.front().rows(), "projection width mismatch");

  Rng rng = make_rng(seed, Stream::ClvInit);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Matrix c = Matrix::Zero(d_t, d_t);
  for (Eigen::Index j = 0; j < d_t; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) c(i, j) = unif(rng);
  c.colwise().normalize();

  // J_{k+1} Q_k = Q_{k+1} R_{k+1}, so covariance needs C_k ~ R_{k+1}^{-1} C_{k+1}.
  const Eigen::Index last_kept = n - 1 - backward_skip;
  CLVResult out;
  out.first_step = 0;
  out.vectors.resize(static_cast<std::size_t>(last_kept));
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    const Matrix& r_next = history.r[static_cast<std::size_t>(k + 1)];
    c = r_next.triangularView<Eigen::Upper>().solve(c);
    for (Eigen::Index j = 0; j < d_t; ++j) {
      const double norm = c.col(j).norm();
      if (!(norm > 1e-300) || !std::isfinite(norm))
        throw Error(ErrorCode::TangentDegenerate, "backward iteration lost a covariant direction");
      c.col(j) /= norm;
    }
    if (k >= last_kept) continue;
    Matrix v = history.q[static_cast<std::size_t>(k)] * c;
    if (projection) v = (*projection) * v;
    for (Eigen::Index j = 0; j < d_t; ++j) {
      const double norm = v.col(j).norm();
      if (!(norm > 0.0)) throw Error(ErrorCode::TangentDegenerate, "projected vector vanished");
      v.col(j) /= norm;
    }
    out.vectors[static_cast<std::size_t>(k)] = std::move(v);
  }
  return out;
}

double subspace_angle_deg(const Vector& a, const Vector& b) {
  const double cosine = std::min(1.0, std::abs(a.dot(b)) / (a.norm() * b.norm()));
  return std::acos(cosine) * 180.0 / 3.14159265358979323846;
}

AngleStats clv_angles(const CLVResult& clvs) {
  require(!clvs.vectors.empty(), "no covariant vectors to analyse");
  const Eigen::Index d_t = clvs.vectors.front().cols();
  AngleStats stats;
  for (int i = 0; i < d_t; ++i)
    for (int j = i + 1; j < d_t; ++j) stats.pairs.emplace_back(i, j);
  const auto n_pairs = static_cast<Eigen::Index>(stats.pairs.size());
  const auto n_steps = static_cast<Eigen::Index>(clvs.vectors.size());
  stats.angles.resize(n_pairs, n_steps);
  stats.pdf = Matrix::Zero(n_pairs, AngleStats::kBins);
  for (Eigen::Index t = 0; t < n_steps; ++t) {
    const Matrix& v = clvs.vectors[static_cast<std::size_t>(t)];
    for (Eigen::Index p = 0; p < n_pairs; ++p) {
      const auto [i, j] = stats.pairs[static_cast<std::size_t>(p)];
      const double theta = subspace_angle_deg(v.col(i), v.col(j));
      stats.angles(p, t) = theta;
      const int bin = std::min(AngleStats::kBins - 1, static_cast<int>(theta));
      stats.pdf(p, bin) += 1.0;
    }
  }
  stats.pdf /= static_cast<double>(n_steps);  // bins are one degree wide
  return stats;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "Wasserstein distance needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Integrate |F_a - F_b| over the merged support.
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double x = std::min(a.front(), b.front()), total = 0.0;
  while (ia < a.size() || ib < b.size()) {
    double next;
    if (ib == b.size() || (ia < a.size() && a[ia] <= b[ib]))
      next = a[ia];
    else
      next = b[ib];
    total += std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb) * (next - x);
    x = next;
    while (ia < a.size() && a[ia] == x) ++ia;
    while (ib < b.size() && b[ib] == x) ++ib;
  }
  return total;
}

const char* to_string(GSClass c) {
  switch (c) {
    case GSClass::NoGS: return "no-gs";
    case GSClass::GSNonDifferentiable: return "gs-non-differentiable";
    case GSClass::DGS: return "dgs";
  }
  return "?";
}

GSVerdict classify_gs(double max_cle, double lambda_star) {
  require(lambda_star < 0.0, "the drive needs a negative exponent");
  GSVerdict verdict{max_cle, lambda_star, GSClass::NoGS};
  if (max_cle >= 0.0)
    verdict.gs_class = GSClass::NoGS;
  else if (max_cle < lambda_star)
    verdict.gs_class = GSClass::DGS;
  else
    verdict.gs_class = GSClass::GSNonDifferentiable;
  return verdict;
}

}  // namespace qrc::stability
