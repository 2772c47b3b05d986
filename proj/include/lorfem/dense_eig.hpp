// Small dense symmetric eigensolvers: cyclic Jacobi and generalized pencils
// via Cholesky reduction. Sized for the 1D operator matrices (n <= ~130).
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <vector>

namespace lorfem {

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, ascending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30 * std::max(1.0, a.diagonal().cwiseAbs().maxCoeff())) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Generalized eigenvalues of the SPD pencil (A, B), ascending: Cholesky
/// reduction B = L L^T followed by Jacobi on L^{-1} A L^{-T}.
inline std::vector<double> generalized_eigenvalues_small(
    const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("generalized_eigenvalues: B is not SPD");
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd c =
      l.triangularView<Eigen::Lower>().solve(a).transpose();
  c = l.triangularView<Eigen::Lower>().solve(c);
  c = 0.5 * (c + c.transpose()).eval();
  return jacobi_eigenvalues(c);
}

}  // namespace lorfem
