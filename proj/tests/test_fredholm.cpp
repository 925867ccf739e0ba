#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "cusplab/fredholm.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/quadrature.hpp"
#include "doctest.h"

using namespace cusplab;

TEST_CASE("interval unions and grids") {
  CHECK_THROWS(IntervalUnion{{0.0}}.validate());
  CHECK_THROWS(IntervalUnion{{1.0, 0.0}}.validate());
  IntervalUnion E{{-2.0, -1.0, 0.5, 2.0}};
  CHECK(E.measure() == doctest::Approx(2.5));
  NystromGrid g = NystromGrid::build(E, 10);
  CHECK(g.size() == 20);
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(g.weights[k] > 0.0);
    bool inside = (g.nodes[k] > -2.0 && g.nodes[k] < -1.0) || (g.nodes[k] > 0.5 && g.nodes[k] < 2.0);
    CHECK(inside);
    total += g.weights[k];
  }
  CHECK(total == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("gap probability: empty set and small interval series") {
  auto K = pearcey_kernel_fn(0.0);
  GapResult empty = gap_probability(K, IntervalUnion{});
  CHECK(empty.value == 1.0);
  CHECK(empty.log_value == 0.0);

  const double h = 1e-3;
  GapResult small = gap_probability(K, IntervalUnion{{-h, h}});
  // 1 - tr K + (1/2)((tr K)^2 - tr K^2), traces by an independent 8-point rule.
  const GaussRule& g = gauss_legendre(8);
  std::vector<double> x, w;
  for (int i = 0; i < 8; ++i) {
    x.push_back(h * g.nodes[i]);
    w.push_back(h * g.weights[i]);
  }
  double tr = 0.0, tr2 = 0.0;
  for (int i = 0; i < 8; ++i) {
    tr += w[i] * pearcey_kernel_pq_form(0.0, x[i], x[i]);
    for (int j = 0; j < 8; ++j)
      tr2 += w[i] * w[j] * pearcey_kernel_pq_form(0.0, x[i], x[j]) * pearcey_kernel_pq_form(0.0, x[j], x[i]);
  }
  double series = 1.0 - tr + 0.5 * (tr * tr - tr2);
  CHECK(std::abs(small.value - series) < 1e-9);
  CHECK(std::abs(small.value - std::exp(small.log_value)) < 1e-14);
}

TEST_CASE("gap probability: refinement, range and monotonicity") {
  auto K = pearcey_kernel_fn(0.0);
  double previous = 1.0;
  for (double half : {0.5, 1.0, 2.0, 4.0}) {
    GapResult r = gap_probability(K, IntervalUnion{{-half, half}});
    CHECK(r.error_estimate < 1e-8);
    CHECK(r.value > 0.0);
    CHECK(r.value <= 1.0 + r.error_estimate);
    CHECK(r.value <= previous);
    previous = r.value;
  }
  GapResult two = gap_probability(K, IntervalUnion{{-3.0, -1.0, 0.5, 2.5}});
  GapResult one = gap_probability(K, IntervalUnion{{-3.0, -1.0}});
  CHECK(two.value < one.value);
  CHECK(two.error_estimate < 1e-8);
}

TEST_CASE("gap probability: Airy kernel on a half line") {
  GapResult r = airy_gap(-1.0);
  CHECK(r.truncated_at >= 9.0);
  CHECK(airy_kernel(r.truncated_at, r.truncated_at) < 1e-16);
  CHECK(r.value > 0.0);
  CHECK(r.value < 1.0);
  // The same construction at twice the order, with Airy values from an independent library.
  const int m = 80;
  NystromGrid g = NystromGrid::build(IntervalUnion{{-1.0, r.truncated_at}}, m);
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double x = g.nodes[i], y = g.nodes[j];
      double ax = boost::math::airy_ai(x), dx = boost::math::airy_ai_prime(x);
      double k = i == j ? dx * dx - x * ax * ax
                        : (ax * boost::math::airy_ai_prime(y) - dx * boost::math::airy_ai(y)) / (x - y);
      M(i, j) = (i == j ? 1.0 : 0.0) - std::sqrt(g.weights[i] * g.weights[j]) * k;
    }
  CHECK(std::abs(r.value - M.determinant()) < 1e-10);
}

TEST_CASE("multi-time gap probability") {
  auto K2 = pearcey_time_kernel_fn();
  IntervalUnion E{{-1.0, 1.0}};
  GapResult single = gap_probability(pearcey_kernel_fn(0.0), E);
  GapResult one = multitime_gap(K2, {0.0}, {E});
  CHECK(std::abs(one.value - single.value) < 1e-14);
  GapResult duplicated = multitime_gap(K2, {0.0, 0.0}, {E, E});
  CHECK(std::abs(duplicated.value - single.value) < 1e-8);
  CHECK_THROWS(multitime_gap(K2, {0.0, 0.0}, {E, IntervalUnion{{-2.0, 2.0}}}));
  CHECK_THROWS(multitime_gap(K2, {1.0, 0.0}, {E, E}));

  GapResult narrow = multitime_gap(K2, {-1.0, 1.0}, {E, E});
  IntervalUnion W{{-2.0, 2.0}};
  GapResult wide = multitime_gap(K2, {-1.0, 1.0}, {W, W});
  CHECK(narrow.value > 0.0);
  CHECK(narrow.value < 1.0);
  CHECK(wide.value < narrow.value);
  // Two times exclude at least as much as either one.
  CHECK(narrow.value <= gap_probability(pearcey_kernel_fn(-1.0), E).value + 1e-10);
  CHECK(narrow.value <= gap_probability(pearcey_kernel_fn(1.0), E).value + 1e-10);
}

TEST_CASE("resolvent quantities") {
  IntervalUnion E{{-1.0, 1.0}};
  ResolventData d = resolvent_quantities(0.0, E);
  CHECK(d.identity_residual() < 1e-10);
  CHECK(std::abs(d.log_det - gap_probability(pearcey_kernel_fn(0.0), E).log_value) < 1e-10);
  double u = 0.0;
  PearceyFunctions f(0.0);
  for (std::size_t k = 0; k < d.grid.size(); ++k) u += d.grid.weights[k] * d.p_hat[k] * f(d.grid.nodes[k]).q[0];
  CHECK(d.u == doctest::Approx(u).epsilon(1e-13));

  // On a short interval p_hat - p = int_E K(a, y) p(y) dy + O(|E|^2), and likewise for q_hat.
  for (double width : {1e-4, 1e-5}) {
    IntervalUnion tiny{{0.3, 0.3 + width}};
    ResolventData s = resolvent_quantities(0.0, tiny);
    double mid = 0.3 + 0.5 * width;
    PearceyPQ vm = f(mid);
    for (std::size_t k = 0; k < 2; ++k) {
      double a = tiny.endpoints[k];
      PearceyPQ v = f(a);
      double dp = width * pearcey_kernel_pq_form(0.0, a, mid) * vm.p[0];
      double dq = width * pearcey_kernel_pq_form(0.0, mid, a) * vm.q[0];
      CHECK(std::abs(s.p_hat_end[k] - v.p[0] - dp) < 10 * width * width);
      CHECK(std::abs(s.q_hat_end[k] - v.q[0] - dq) < 10 * width * width);
      if (width <= 1e-5) {
        CHECK(std::abs(s.p_hat_end[k] - v.p[0]) < 1e-6);
        CHECK(std::abs(s.q_hat_end[k] - v.q[0]) < 1e-6);
      }
    }
  }
}

// The chain d_E^2 log det = d_E u = sum_k (-1)^k p_hat q_hat holds in its second equality;
// the first one holds with a minus sign (d/da_j log det(I - K_E) = (-1)^(j-1) R(a_j, a_j)).
TEST_CASE("second E-derivative of log det matches the endpoint sum up to sign") {
  const double h = 1e-3;
  const int m = 40;
  for (auto [t, E] : {std::pair{0.0, IntervalUnion{{-1.0, 1.0}}}, {1.0, IntervalUnion{{0.0, 2.0}}},
                      {0.0, IntervalUnion{{-2.0, -0.5, 0.2, 1.5}}}}) {
    auto K = pearcey_kernel_fn(t);
    auto logdet = [&](double shift) { return log_fredholm_det(K, NystromGrid::build(E.shifted(shift), m)); };
    double lhs = (logdet(h) - 2.0 * logdet(0.0) + logdet(-h)) / (h * h);
    ResolventData d = resolvent_quantities(t, E, m);
    double rhs = endpoint_sum(d);
    CHECK(std::abs(lhs + rhs) < 1e-5 * std::abs(rhs));
    double du = (resolvent_quantities(t, E.shifted(h), m).u - resolvent_quantities(t, E.shifted(-h), m).u) / (2 * h);
    CHECK(std::abs(du - rhs) < 1e-5 * std::abs(rhs));
  }
}

// Moving a single endpoint: d/da_j log det(I - K_E) = (-1)^(j-1) R(a_j, a_j) with a_1 the
// leftmost endpoint and R the resolvent kernel, evaluated here by the Nystrom extension.
TEST_CASE("per-endpoint derivative of log det") {
  const double h = 1e-4;
  const int m = 40;
  for (auto [t, E] : {std::pair{0.0, IntervalUnion{{-1.0, 1.0}}}, {1.0, IntervalUnion{{-2.0, -0.5, 0.2, 1.5}}}}) {
    auto K = pearcey_kernel_fn(t);
    NystromGrid grid = NystromGrid::build(E, m);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(grid.size(), grid.size()) - K(grid.nodes, grid.nodes) *
                                                                                 Eigen::VectorXd::Map(grid.weights.data(), grid.size()).asDiagonal();
    auto lu = A.partialPivLu();
    for (std::size_t j = 0; j < E.endpoints.size(); ++j) {
      const double a = E.endpoints[j];
      IntervalUnion up = E, dn = E;
      up.endpoints[j] += h;
      dn.endpoints[j] -= h;
      const double lhs = (log_fredholm_det(K, NystromGrid::build(up, m)) - log_fredholm_det(K, NystromGrid::build(dn, m))) / (2 * h);
      Eigen::VectorXd col = K(grid.nodes, {a}).col(0);
      Eigen::VectorXd rho = lu.solve(col);
      Eigen::RowVectorXd row = K({a}, grid.nodes).row(0);
      double R = K({a}, {a})(0, 0);
      for (std::size_t k = 0; k < grid.size(); ++k) R += row(k) * grid.weights[k] * rho(k);
      const double sign = j % 2 == 0 ? 1.0 : -1.0;  // (-1)^(j-1) for 1-based j
      CHECK(std::abs(lhs - sign * R) < 1e-6 * std::abs(R));
    }
  }
}
