// Brute-force references for the unit and acceptance tests. Everything here
// builds full 2^n operators with Kronecker products, so it shares no code
// path with the library's in-place kernels.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline MatC kron(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline MatC ry(double theta) {
  MatC m(2, 2);
  m << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
  return m;
}

// Single-qubit operator g on `q` of n qubits; qubit 0 is the leftmost factor.
inline MatC embed(const MatC& g, int q, int n) {
  MatC out = MatC::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == q ? g : MatC::Identity(2, 2));
  return out;
}

inline MatC cnot(int control, int target, int n) {
  MatC p0 = MatC::Zero(2, 2), p1 = MatC::Zero(2, 2), x(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  x << 0, 1, 1, 0;
  return embed(p0, control, n) + embed(p1, control, n) * embed(x, target, n);
}

struct Gate {
  MatC u;
  std::vector<int> touched;
};

// Gate list of the reservoir circuit: optional Ry layer plus full CNOT
// block, each encoding layer, then Ry(alpha) and the CNOT block.
inline std::vector<Gate> circuit(int n, const std::vector<double>& slot_angles, const std::vector<double>* rec,
                                 const std::vector<double>& alpha) {
  std::vector<Gate> gates;
  auto block = [&] {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) gates.push_back({cnot(i, j, n), {i, j}});
  };
  auto rot_layer = [&](const double* a) {
    for (int q = 0; q < n; ++q) gates.push_back({embed(ry(a[q]), q, n), {q}});
    block();
  };
  if (rec) rot_layer(rec->data());
  for (std::size_t l = 0; l * n < slot_angles.size(); ++l) rot_layer(slot_angles.data() + l * n);
  rot_layer(alpha.data());
  return gates;
}

inline Vec pure_probs(int n, const std::vector<Gate>& gates) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  psi(0) = 1;
  for (const auto& g : gates) psi = g.u * psi;
  return psi.cwiseAbs2();
}

// Kraus channel applied after each gate on every qubit it touched.
inline Vec noisy_probs(int n, const std::vector<Gate>& gates, const std::vector<MatC>& kraus) {
  const Eigen::Index d = Eigen::Index{1} << n;
  MatC rho = MatC::Zero(d, d);
  rho(0, 0) = 1;
  for (const auto& g : gates) {
    rho = g.u * rho * g.u.adjoint();
    for (int q : g.touched) {
      MatC next = MatC::Zero(d, d);
      for (const auto& k : kraus) {
        const MatC kk = embed(k, q, n);
        next += kk * rho * kk.adjoint();
      }
      rho = next;
    }
  }
  return rho.diagonal().real();
}

inline std::vector<MatC> depolarizing(double p) {
  MatC i = MatC::Identity(2, 2), x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, C(0, -1), C(0, 1), 0;
  z << 1, 0, 0, -1;
  return {std::sqrt(1 - 0.75 * p) * i, std::sqrt(p / 4) * x, std::sqrt(p / 4) * y, std::sqrt(p / 4) * z};
}

inline std::vector<MatC> amplitude_damping(double p) {
  MatC k0 = MatC::Zero(2, 2), k1 = MatC::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - p);
  k1(0, 1) = std::sqrt(p);
  return {k0, k1};
}

inline Mat central_difference(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Vec xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    j.col(c) = (f(xp) - f(xm)) / (2 * h);
  }
  return j;
}

// Classical Gram-Schmidt Benettin loop on a sequence of dense Jacobians.
inline Vec benettin(const std::function<Mat(long)>& jac, long steps, int k, double dt) {
  Mat q = Mat::Identity(jac(0).rows(), k);
  Vec sums = Vec::Zero(k);
  for (long s = 0; s < steps; ++s) {
    Mat w = jac(s) * q;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < i; ++j) w.col(i) -= w.col(j).dot(w.col(i)) * w.col(j);
      const double nrm = w.col(i).norm();
      sums(i) += std::log(nrm);
      w.col(i) /= nrm;
    }
    q = w;
  }
  return sums / (static_cast<double>(steps) * dt);
}

// Kaplan-Yorke written out from the definition.
inline double kaplan_yorke(const std::vector<double>& l) {
  double s = 0;
  for (std::size_t j = 0; j < l.size(); ++j) {
    if (s + l[j] < 0) return j == 0 ? 0.0 : static_cast<double>(j) + s / std::abs(l[j]);
    s += l[j];
  }
  return static_cast<double>(l.size());
}

}  // namespace oracle
