#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <numbers>

#include "cusplab/kernels.hpp"
#include "doctest.h"

using namespace cusplab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("descent contours: corner distance") {
  auto c1 = build_contours(1.0);
  CHECK(std::isinf(c1.corner));
  for (const auto& piece : c1.v_contour.pieces)
    for (std::size_t k = 0; k + 1 < piece.size(); ++k) {
      auto d = piece[k + 1] - piece[k];
      CHECK(std::abs(std::abs(d.real()) - std::abs(d.imag())) < 1e-12 * std::abs(d));
    }
  CHECK(build_contours(2.0).corner == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(build_contours(0.5).corner == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
  auto c2 = build_contours(2.0);
  bool has_horizontal = false;
  for (const auto& piece : c2.v_contour.pieces)
    for (std::size_t k = 0; k + 1 < piece.size(); ++k)
      if (std::abs((piece[k + 1] - piece[k]).imag()) < 1e-14) has_horizontal = true;
  CHECK(has_horizontal);
}

TEST_CASE("Pearcey p and q at the origin") {
  PearceyPQ v = pearcey_pq(0.0, 0.0);
  // X is mapped onto itself with its orientation by V -> -V, so p is odd in x while
  // the imaginary axis is reversed, making q even: p(0) = 0, q'(0) = 0.
  CHECK(std::abs(v.p[0]) < 1e-13);
  CHECK(std::abs(v.q[1]) < 1e-13);
  // p'(0) = (1/2 pi i) * 2 * (-i) int_0^inf 2 r exp(-r^4/4) dr = -1/sqrt(pi).
  CHECK(v.p[1] == doctest::Approx(-1.0 / std::sqrt(kPi)).epsilon(1e-12));
  // q(0) = -(1/2 pi) int exp(-v^4/4) dv after rotating the imaginary axis onto the real line.
  auto rule = composite_rule(-7.0, 7.0, 40, 16);
  double direct = 0.0;
  for (std::size_t k = 0; k < rule.x.size(); ++k) direct += rule.w[k] * std::exp(-std::pow(rule.x[k], 4) / 4.0);
  const double closed = 2.0 * std::pow(4.0, 0.25) * std::tgamma(1.25);
  CHECK(direct == doctest::Approx(closed).epsilon(1e-13));
  CHECK(std::abs(v.q[0] + direct / (2.0 * kPi)) < 1e-10);
}

TEST_CASE("Pearcey functions satisfy their ODEs and heat equations") {
  for (double t : {-2.0, 0.0, 1.0, 2.0}) {
    PearceyFunctions f(t);
    for (double x = -4.0; x <= 4.0; x += 0.5) {
      PearceyPQ v = f(x);
      double scale = 1.0 + std::abs(v.p[0]) + std::abs(v.q[0]);
      CHECK(std::abs(v.p[3] - t * v.p[1] + x * v.p[0]) < 1e-8 * scale);
      CHECK(std::abs(v.q[3] - t * v.q[1] - x * v.q[0]) < 1e-8 * scale);
    }
  }
  const double h = 1e-3, t = 1.0, x = 0.5;
  PearceyPQ mid = pearcey_pq(t, x), up = pearcey_pq(t + h, x), dn = pearcey_pq(t - h, x);
  CHECK(std::abs((up.p[0] - dn.p[0]) / (2 * h) + mid.p[2] / 2) < 1e-6);
  CHECK(std::abs((up.q[0] - dn.q[0]) / (2 * h) - mid.q[2] / 2) < 1e-6);
}

TEST_CASE("Pearcey kernel: double integral agrees with the p, q form") {
  for (double t : {-2.0, 0.0, 2.0}) {
    std::vector<double> grid = {-3.0, -1.5, 0.0, 1.5, 3.0};
    Eigen::MatrixXd D = PearceyDoubleIntegral(t, t).matrix(grid, grid);
    Eigen::MatrixXd P = pearcey_kernel_matrix(t, t, grid, grid);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) CHECK(std::abs(D(i, j) - P(i, j)) < 1e-8 * (1 + std::abs(D(i, j))));
  }
  for (auto [x, y] : {std::pair{0.0, 0.0}, {1.0, -1.0}, {2.0, 0.5}})
    CHECK(std::abs(pearcey_kernel(0, 0, x, y) - pearcey_kernel_pq_form(0, x, y)) < 1e-8);
}

TEST_CASE("Pearcey kernel: symmetries, diagonal and the heat term") {
  for (double x : {-1.0, 0.3, 2.0})
    for (double y : {-2.0, 0.0, 1.1})
      CHECK(std::abs(pearcey_kernel(0.5, 0.5, x, y) - pearcey_kernel(0.5, 0.5, -x, -y)) < 1e-9);
  double k00 = pearcey_kernel_pq_form(0.0, 0.0, 0.0);
  CHECK(k00 > 0.0);
  // Off-diagonal extrapolation towards the diagonal: symmetric differences cancel the linear term.
  double h = 1e-3;
  double extrap = 0.5 * (pearcey_kernel_pq_form(0.0, 0.0, h) + pearcey_kernel_pq_form(0.0, 0.0, -h));
  CHECK(extrap == doctest::Approx(k00).epsilon(1e-5));

  PearceyDoubleIntegral two_time(-1.0, 1.0);
  double full = two_time(0.0, 0.0);
  double contour_only = two_time.matrix({0.0}, {0.0}, false)(0, 0);
  CHECK(full - contour_only == doctest::Approx(-1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-14));
  CHECK(pearcey_heat_term(1.0, 1.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("Pearcey kernel: time derivative") {
  const double h = 1e-3;
  for (double t : {-1.0, 0.0, 1.0})
    for (auto [x, y] : {std::pair{0.3, -0.7}, {1.2, 0.4}, {-1.5, 1.0}}) {
      double dk = (pearcey_kernel_pq_form(t + h, x, y) - pearcey_kernel_pq_form(t - h, x, y)) / (2 * h);
      PearceyFunctions f(t);
      PearceyPQ px = f(x), py = f(y);
      double rhs = 0.5 * (-px.p[1] * py.q[0] + px.p[0] * py.q[1]);
      CHECK(std::abs(dk - rhs) < 1e-6);
    }
}

TEST_CASE("Pearcey kernel: quadrature and truncation stability") {
  QuadratureSpec base, doubled, longer;
  doubled.nodes_per_panel = 64;
  longer.truncation_radius = base.truncation_radius + 2.0;
  for (auto [x, y] : {std::pair{0.0, 0.0}, {1.0, -1.0}, {2.0, 0.5}}) {
    double v = pearcey_kernel(0.0, 0.0, x, y, base);
    CHECK(std::abs(v - pearcey_kernel(0.0, 0.0, x, y, doubled)) < 1e-9);
    CHECK(std::abs(v - pearcey_kernel(0.0, 0.0, x, y, longer)) < 1e-10);
  }
}

TEST_CASE("Airy kernel") {
  const double ai0 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
  const double dai0 = -1.0 / (std::pow(3.0, 1.0 / 3.0) * std::tgamma(1.0 / 3.0));
  AiryValues a = airy(0.0);
  CHECK(a.ai == doctest::Approx(ai0).epsilon(1e-13));
  CHECK(a.dai == doctest::Approx(dai0).epsilon(1e-13));
  CHECK(airy_kernel(0.0, 0.0) == doctest::Approx(dai0 * dai0).epsilon(1e-12));
  CHECK(airy_kernel(0.4, -1.3) == airy_kernel(-1.3, 0.4));
  CHECK(airy_kernel(5.0, 5.0) < 1e-6);
  for (double x = -8.0; x <= 6.0; x += 0.7) {
    AiryValues v = airy(x);
    CHECK(std::abs(v.ai - boost::math::airy_ai(x)) < 1e-12);
    CHECK(std::abs(v.dai - boost::math::airy_ai_prime(x)) < 1e-11);
  }
}

TEST_CASE("finite-n kernel: density normalizes to one") {
  FiniteNKernel K({8, 1.0, -1.0, 0.5});
  auto rule = composite_rule(-8.0, 8.0, 32, 16);
  std::vector<double> xs(rule.x.begin(), rule.x.end());
  std::vector<double> diag = K.diagonal(1.0 / 3.0, xs);
  double mass = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) mass += rule.w[k] * diag[k];
  CHECK(std::abs(mass / 8.0 - 1.0) < 1e-4);
  CHECK(K.critical().t0 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("finite-n kernel: asymmetric targets normalize") {
  FiniteNKernel K({18, 1.0, 0.0, 1.0 / 9.0});
  CHECK(K.params().upper_count() == 2);
  const double t = K.critical().t0;
  auto rule = composite_rule(-8.0, 14.0, 44, 16);
  std::vector<double> xs(rule.x.begin(), rule.x.end());
  std::vector<double> diag = K.diagonal(t, xs);
  double mass = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) mass += rule.w[k] * diag[k];
  CHECK(std::abs(mass / 18.0 - 1.0) < 1e-4);
}

TEST_CASE("finite-n kernel: validation") {
  CHECK_THROWS(FiniteNKernel({0, 1.0, -1.0, 0.5}));
  CHECK_THROWS(FiniteNKernel({8, -1.0, 1.0, 0.5}));
  FiniteNKernel K({8, 1.0, -1.0, 0.5});
  CHECK_THROWS(K(0.0, 0.5, 0.0, 0.0));
  CHECK_THROWS(K(0.5, 1.0, 0.0, 0.0));
}
