#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cusplab/spectral_curve.hpp"

using namespace cusplab;

namespace {

// Cusp time from the vanishing of the discriminant of the support quartic,
// written in terms of rho = (alpha - beta)^2, located by bisection in t.
double cusp_time_by_bisection(double a, double b, double p) {
  auto h = [&](double t) {
    double rho = (a - b) * (a - b) * 2.0 * t / (1.0 - t);
    return std::pow(rho - 1.0, 3) - 27.0 * p * (1.0 - p) * rho;
  };
  double lo = 1e-9, hi = 1.0 - 1e-9;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Sign changes of the quartic on a fine grid.
std::vector<double> sign_changes(const Poly& p, double lo, double hi, int n) {
  std::vector<double> out;
  double prev = p(lo);
  for (int i = 1; i <= n; ++i) {
    double z = lo + (hi - lo) * i / n;
    double v = p(z);
    if ((v < 0) != (prev < 0)) out.push_back(z);
    prev = v;
  }
  return out;
}

}  // namespace

TEST_CASE("cusp constants, symmetric case") {
  CriticalData c = find_cusp(1.0, -1.0, 0.5);
  CHECK(c.q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.t0 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(c.x0) < 1e-15);
  CHECK(c.c0 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(c.mu == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(c.A) < 1e-15);
  CHECK(std::abs(c.u0) < 1e-15);
  CHECK(std::abs(c.z0) < 1e-15);
}

TEST_CASE("cusp constants, q = 2") {
  CriticalData c = find_cusp(1.0, 0.0, 1.0 / 9.0);
  CHECK(c.q == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.r == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(c.t0 == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(c.x0 == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(c.c0 == doctest::Approx(std::sqrt(3.0) / 5.0).epsilon(1e-14));
  CHECK(c.mu == doctest::Approx(std::pow(1.5, 0.25)).epsilon(1e-14));
  CHECK(c.u0 == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(c.z0 == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(c.A == doctest::Approx(std::sqrt(2.0) / 10.0).epsilon(1e-14));
  CHECK(c.alpha == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::abs(c.beta) < 1e-15);
}

TEST_CASE("cusp time agrees with discriminant bisection") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> up(0.05, 0.95), tgt(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    double p = up(rng), a = tgt(rng), b = tgt(rng);
    if (a < b) std::swap(a, b);
    if (a - b < 0.1) continue;
    CriticalData c = find_cusp(a, b, p);
    CHECK(std::abs(c.t0 - cusp_time_by_bisection(a, b, p)) < 1e-10);
  }
}

TEST_CASE("rejects bad input") {
  CHECK_THROWS(find_cusp(1.0, 1.0, 0.5));
  CHECK_THROWS(find_cusp(1.0, 0.0, 0.0));
  CHECK_THROWS(find_cusp(1.0, 0.0, 1.0));
  CHECK_THROWS(TargetConfig::two_target(1.0, 1.0, 0.5, 0.3));
  TargetConfig bad{{0.0, 1.0}, {0.5, 0.6}, 0.3};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("stieltjes solution at the symmetric cusp and far away") {
  TargetConfig cfg = TargetConfig::two_target(1.0, -1.0, 0.5, 1.0 / 3.0);
  DensitySample s = solve_stieltjes(cfg, {0.0, 0.0});
  CHECK(s.density == 0.0);
  DensitySample far = solve_stieltjes(cfg, {10.0, 0.0});
  CHECK(far.density == 0.0);
  // Moments of the limiting law: m1 = 0, m2 = 2, m3 = 0.
  CHECK(std::abs(far.g.real() - (10.0 - 0.1 - 2e-3)) < 2e-4);
  // Residual of the algebraic equation.
  for (double z : {-1.7, -0.4, 0.3, 1.2}) {
    DensitySample d = solve_stieltjes(cfg, {z, 0.0});
    std::complex<double> res = d.g - z + 0.5 / (d.g - 1.0) + 0.5 / (d.g + 1.0);
    CHECK(std::abs(res) < 1e-12);
    CHECK(d.density >= 0.0);
  }
}

TEST_CASE("stieltjes solution in the upper half plane behaves like a resolvent") {
  TargetConfig cfg = TargetConfig::two_target(1.0, 0.0, 1.0 / 9.0, 0.6);
  for (double x : {-1.0, 0.5, 1.7, 3.0}) {
    DensitySample d = solve_stieltjes(cfg, {x, 0.3});
    CHECK(d.g.imag() > 0.3);
    DensitySample low = solve_stieltjes(cfg, {x, -0.3});
    CHECK(std::abs(low.g - std::conj(d.g)) < 1e-14);
  }
}

TEST_CASE("support endpoints match sign changes of the quartic") {
  for (double t : {0.3, 0.75}) {
    TargetConfig cfg = TargetConfig::two_target(1.0, 0.0, 1.0 / 9.0, t);
    auto bt = cfg.matrix_targets();
    Poly disc = two_target_discriminant(bt[1], bt[0], 1.0 / 9.0);
    SupportSet s = support_endpoints(bt[1], bt[0], 1.0 / 9.0);
    auto brute = sign_changes(disc, -10.0, 10.0, 400000);
    REQUIRE(s.endpoints.size() == brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) CHECK(std::abs(s.endpoints[i] - brute[i]) < 1e-4);
    CHECK(s.intervals.size() == brute.size() / 2);
    SupportSet g = support_set(cfg);
    REQUIRE(g.endpoints.size() == s.endpoints.size());
    for (std::size_t i = 0; i < g.endpoints.size(); ++i) CHECK(std::abs(g.endpoints[i] - s.endpoints[i]) < 1e-10);
  }
}

TEST_CASE("critical support has a double root at the cusp") {
  SupportSet s = support_endpoints(std::sqrt(3.0), 0.0, 1.0 / 9.0);
  REQUIRE(s.endpoints.size() == 4);
  int hits = 0;
  for (double e : s.endpoints) hits += std::abs(e - std::sqrt(3.0)) < 1e-8;
  CHECK(hits == 2);
  REQUIRE(s.intervals.size() == 2);
  CHECK(s.intervals[0].second == s.intervals[1].first);
}

TEST_CASE("density carries unit mass") {
  for (double t : {0.2, 1.0 / 3.0, 0.6}) {
    TargetConfig cfg = TargetConfig::two_target(1.0, -1.0, 0.5, t);
    CHECK(std::abs(total_mass(cfg) - 1.0) < 1e-6);
  }
  TargetConfig three{{-2.0, 0.0, 2.0}, {0.25, 0.5, 0.25}, 0.5};
  CHECK(std::abs(total_mass(three) - 1.0) < 1e-6);
}

TEST_CASE("branch points") {
  auto one = branch_points({0.0}, {1.0}, 1.0);
  REQUIRE(one.size() == 2);
  CHECK(std::abs(one[0] + 1.0) < 1e-14);
  CHECK(std::abs(one[1] - 1.0) < 1e-14);
  auto two = branch_points({-1.0, 1.0}, {0.5, 0.5}, 400.0);
  REQUIRE(two.size() == 4);
  for (auto z : two) {
    CHECK(z.imag() == 0.0);
    CHECK(std::abs(std::abs(z.real()) - 1.0) < 0.05);
  }
}

TEST_CASE("merge tracking") {
  auto sym = track_merges({-1.0, 1.0}, {0.5, 0.5}, 0.2, 5.0, 40);
  REQUIRE(sym.size() == 1);
  CHECK(std::abs(sym[0].z) < 1e-10);
  CHECK(std::abs(sym[0].T - 1.0) < 1e-10);
  CHECK(std::abs(time_from_rescaled(sym[0].T) - 1.0 / 3.0) < 1e-10);

  // Oracle: the merge is the minimum of sum eps/(w-a)^2 between adjacent targets.
  std::vector<double> a{-2.0, 0.0, 2.0}, e{1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto f = [&](double w) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += e[i] / ((w - a[i]) * (w - a[i]));
    return s;
  };
  auto golden = [&](double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 200; ++i) {
      double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
      (f(m1) < f(m2) ? hi : lo) = (f(m1) < f(m2) ? m2 : m1);
    }
    return 0.5 * (lo + hi);
  };
  auto three = track_merges(a, e, 0.05, 10.0, 50);
  REQUIRE(three.size() == 2);
  std::sort(three.begin(), three.end(), [](auto& x, auto& y) { return x.z < y.z; });
  double w1 = golden(-1.99, -0.01), w2 = golden(0.01, 1.99);
  CHECK(std::abs(three[0].z - w1) < 1e-7);
  CHECK(std::abs(three[1].z - w2) < 1e-7);
  CHECK(std::abs(three[0].T - f(w1)) < 1e-10);
}
