#include <catch2/catch.hpp>
#include <cmath>

#include "lorfem/quadrature.hpp"

using namespace lorfem;

namespace {

double monomial_integral(int k) { return (k % 2 == 0) ? 2.0 / (k + 1) : 0.0; }

}  // namespace

TEST_CASE("legendre_eval matches closed forms") {
  auto [p0, d0] = legendre_eval(0, 0.7);
  CHECK(p0 == 1.0);
  CHECK(d0 == 0.0);

  auto [p1, d1] = legendre_eval(1, 0.7);
  CHECK(p1 == Approx(0.7).epsilon(1e-15));
  CHECK(d1 == Approx(1.0).epsilon(1e-15));

  // P_3 = (5x^3 - 3x)/2 has critical points at x^2 = 1/5.
  double x = 1.0 / std::sqrt(5.0);
  auto [p3, d3] = legendre_eval(3, x);
  CHECK(p3 == Approx(-x).margin(1e-15));
  CHECK(d3 == Approx(0.0).margin(1e-13));
}

TEST_CASE("gauss_lobatto_rule low-degree values") {
  auto r1 = gauss_lobatto_rule(1);
  CHECK(r1.points == std::vector<double>{-1.0, 1.0});
  CHECK(r1.weights[0] == Approx(1.0).margin(1e-15));
  CHECK(r1.weights[1] == Approx(1.0).margin(1e-15));

  auto r2 = gauss_lobatto_rule(2);
  CHECK(r2.points[1] == Approx(0.0).margin(1e-15));
  CHECK(r2.weights[0] == Approx(1.0 / 3.0).margin(1e-15));
  CHECK(r2.weights[1] == Approx(4.0 / 3.0).margin(1e-15));

  auto r3 = gauss_lobatto_rule(3);
  CHECK(r3.points[1] == Approx(-1.0 / std::sqrt(5.0)).margin(1e-14));
  CHECK(r3.points[2] == Approx(1.0 / std::sqrt(5.0)).margin(1e-14));
  CHECK(r3.weights[0] == Approx(1.0 / 6.0).margin(1e-14));
  CHECK(r3.weights[1] == Approx(5.0 / 6.0).margin(1e-14));

  CHECK_THROWS(gauss_lobatto_rule(0));
}

TEST_CASE("gauss_legendre_rule low-degree values") {
  auto q1 = gauss_legendre_rule(1);
  CHECK(q1.points[0] == Approx(0.0).margin(1e-15));
  CHECK(q1.weights[0] == Approx(2.0).margin(1e-15));

  auto q2 = gauss_legendre_rule(2);
  CHECK(q2.points[0] == Approx(-1.0 / std::sqrt(3.0)).margin(1e-15));
  CHECK(q2.points[1] == Approx(1.0 / std::sqrt(3.0)).margin(1e-15));
  CHECK(q2.weights[0] == Approx(1.0).margin(1e-15));

  auto q3 = gauss_legendre_rule(3);
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += q3.weights[k] * std::pow(q3.points[k], 4);
  CHECK(s == Approx(2.0 / 5.0).margin(1e-15));

  CHECK_THROWS(gauss_legendre_rule(0));
}

TEST_CASE("gauss_lobatto_rule invariants up to p = 32") {
  for (int p = 1; p <= 32; ++p) {
    auto r = gauss_lobatto_rule(p);
    REQUIRE(static_cast<int>(r.points.size()) == p + 1);
    CHECK(r.points.front() == -1.0);
    CHECK(r.points.back() == 1.0);

    double ws = 0.0, hs = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      ws += w;
    }
    for (double h : r.subinterval_lengths) hs += h;
    CHECK(ws == Approx(2.0).margin(1e-14));
    CHECK(hs == Approx(2.0).margin(1e-14));

    for (int i = 0; i < p; ++i) CHECK(r.points[i] < r.points[i + 1]);

    // Interior nodes are zeros of (1-x^2) P_p'.
    for (int i = 1; i < p; ++i) {
      double x = r.points[i];
      double res = (1.0 - x * x) * legendre_eval(p, x).deriv;
      CHECK(std::abs(res) <= 1e-12);
    }

    // Symmetry about 0.
    for (int i = 0; i <= p; ++i) {
      CHECK(r.points[i] == Approx(-r.points[p - i]).margin(1e-14));
      CHECK(r.weights[i] == Approx(r.weights[p - i]).margin(1e-14));
    }

    // Exact for monomials of degree <= 2p-1.
    for (int k = 0; k <= 2 * p - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i <= p; ++i) s += r.weights[i] * std::pow(r.points[i], k);
      CHECK(std::abs(s - monomial_integral(k)) <= 1e-13);
    }
  }
}

TEST_CASE("gauss_legendre_rule exactness") {
  for (int q = 1; q <= 20; ++q) {
    auto r = gauss_legendre_rule(q);
    for (int k = 0; k <= 2 * q - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < q; ++i) s += r.weights[i] * std::pow(r.points[i], k);
      CHECK(std::abs(s - monomial_integral(k)) <= 1e-13);
    }
  }
}

TEST_CASE("Lobatto point interlacing") {
  for (int p = 1; p <= 16; ++p) {
    auto coarse = gauss_lobatto_rule(p);
    auto fine = gauss_lobatto_rule(p + 1);
    // Each interior subinterval of the finer rule contains exactly one
    // point of the coarser rule.
    for (int s = 0; s <= p + 0; ++s) {
      int count = 0;
      for (int i = 0; i <= p; ++i) {
        double x = coarse.points[i];
        double lo = fine.points[s], hi = fine.points[s + 1];
        bool last = (s == p);
        if (x >= lo && (last ? x <= hi : x < hi)) ++count;
      }
      CHECK(count == 1);
    }
  }
}
