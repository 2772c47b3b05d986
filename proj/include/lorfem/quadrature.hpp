// Legendre polynomials and Gauss-Lobatto / Gauss-Legendre rules on [-1,1].
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lorfem {

struct LegendreValue {
  double value;
  double deriv;
};

/// Evaluate the degree-p Legendre polynomial P_p and its derivative at x
/// using the three-term recurrence.
inline LegendreValue legendre_eval(int p, double x) {
  if (p < 0) throw std::invalid_argument("legendre_eval: p must be >= 0");
  if (p == 0) return {1.0, 0.0};
  double pm1 = 1.0, pk = x;     // P_0, P_1
  double dm1 = 0.0, dk = 1.0;   // P_0', P_1'
  for (int k = 1; k < p; ++k) {
    double pk1 = ((2 * k + 1) * x * pk - k * pm1) / (k + 1);
    double dk1 = dm1 + (2 * k + 1) * pk;
    pm1 = pk;
    pk = pk1;
    dm1 = dk;
    dk = dk1;
  }
  return {pk, dk};
}

/// Gauss-Lobatto nodal rule of degree p: the p+1 zeros of (1-x^2) P_p'(x),
/// quadrature weights, and the lengths of the p subintervals between nodes.
struct NodalRule {
  int degree = 0;
  std::vector<double> points;                // p+1, ascending, endpoints +-1
  std::vector<double> weights;               // p+1, positive, sum 2
  std::vector<double> subinterval_lengths;   // p, h_i = x_{i+1} - x_i
};

/// Gauss-Legendre rule with q points (exact for degree <= 2q-1).
struct QuadRule {
  std::vector<double> points;
  std::vector<double> weights;
};

inline NodalRule gauss_lobatto_rule(int p) {
  if (p < 1) throw std::invalid_argument("gauss_lobatto_rule: p must be >= 1");
  NodalRule r;
  r.degree = p;
  r.points.resize(p + 1);
  r.points.front() = -1.0;
  r.points.back() = 1.0;
  // Interior nodes: Newton on P_p' with Chebyshev-density initial guesses.
  // P_p'' from the Legendre ODE: (1-x^2) P'' = 2x P' - p(p+1) P.
  for (int i = 1; i < p; ++i) {
    double x = -std::cos(M_PI * i / p);
    for (int it = 0; it < 100; ++it) {
      auto [val, der] = legendre_eval(p, x);
      double f = der;
      double fp = (2.0 * x * der - p * (p + 1.0) * val) / (1.0 - x * x);
      double dx = f / fp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.points[i] = x;
  }
  // Symmetrize mirrored pairs.
  for (int i = 0; 2 * i <= p; ++i) {
    double s = 0.5 * (r.points[i] - r.points[p - i]);
    r.points[i] = s;
    r.points[p - i] = -s;
  }
  if (p % 2 == 0) r.points[p / 2] = 0.0;
  // Lobatto weights: w_i = 2 / (p (p+1) P_p(x_i)^2).
  r.weights.resize(p + 1);
  for (int i = 0; i <= p; ++i) {
    double v = legendre_eval(p, r.points[i]).value;
    r.weights[i] = 2.0 / (p * (p + 1.0) * v * v);
  }
  r.subinterval_lengths.resize(p);
  for (int i = 0; i < p; ++i)
    r.subinterval_lengths[i] = r.points[i + 1] - r.points[i];
  return r;
}

inline QuadRule gauss_legendre_rule(int q) {
  if (q < 1) throw std::invalid_argument("gauss_legendre_rule: q must be >= 1");
  QuadRule r;
  r.points.resize(q);
  r.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    // Roots of P_q, ascending; classical initial guess.
    double x = -std::cos(M_PI * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [val, der] = legendre_eval(q, x);
      double dx = val / der;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.points[i] = x;
  }
  for (int i = 0; 2 * i <= q - 1; ++i) {
    double s = 0.5 * (r.points[i] - r.points[q - 1 - i]);
    r.points[i] = s;
    r.points[q - 1 - i] = -s;
  }
  if (q % 2 == 1) r.points[q / 2] = 0.0;
  for (int i = 0; i < q; ++i) {
    double x = r.points[i];
    double der = legendre_eval(q, x).deriv;
    r.weights[i] = 2.0 / ((1.0 - x * x) * der * der);
  }
  return r;
}

}  // namespace lorfem
