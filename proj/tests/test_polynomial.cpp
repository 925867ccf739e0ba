#include <doctest.h>

#include <cmath>

#include "cusplab/polynomial.hpp"
#include "cusplab/quadrature.hpp"

using namespace cusplab;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 32}) {
    const GaussRule& g = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += g.weights[k] * std::pow(g.nodes[k], deg);
      double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("composite rule integrates a smooth function") {
  RealRule r = composite_rule(0.0, 2.0, 4, 16);
  double s = 0.0;
  for (std::size_t k = 0; k < r.x.size(); ++k) s += r.w[k] * std::exp(-r.x[k]);
  CHECK(s == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("simple roots are found and classified") {
  Poly p = Poly::linear(-1, 1) * Poly::linear(2, 1) * Poly({1, 0, 1});  // (x-1)(x+2)(x^2+1)
  auto roots = solve_polynomial(p);
  REQUIRE(roots.size() == 4);
  auto real = real_roots(p);
  REQUIRE(real.size() == 2);
  CHECK(real[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(real[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exact multiple roots are snapped") {
  double w = std::sqrt(3.0);
  Poly p = Poly::linear(-w, 1) * Poly::linear(-w, 1) * Poly::linear(1.0, 1.0);
  auto real = real_roots(p);
  REQUIRE(real.size() == 3);
  CHECK(real[1] == doctest::Approx(w).epsilon(1e-14));
  CHECK(real[2] == doctest::Approx(w).epsilon(1e-14));

  Poly triple = Poly::linear(-0.5, 1) * Poly::linear(-0.5, 1) * Poly::linear(-0.5, 1);
  auto t = real_roots(triple);
  REQUIRE(t.size() == 3);
  for (double v : t) CHECK(v == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("close but distinct roots are resolved") {
  double d = 1e-6;
  Poly p = Poly::linear(-(1 + d), 1) * Poly::linear(-(1 - d), 1) * Poly::linear(3, 1);
  auto real = real_roots(p);
  REQUIRE(real.size() == 3);
  CHECK(std::abs(real[1] - (1 - d)) < 1e-9);
  CHECK(std::abs(real[2] - (1 + d)) < 1e-9);

  Poly c = Poly({1 + d * d, -2, 1}) * Poly::linear(3, 1);  // (x-1)^2 + d^2
  auto all = solve_polynomial(c);
  int complex_count = 0;
  for (auto& r : all)
    if (!r.real) {
      ++complex_count;
      CHECK(std::abs(std::abs(r.value.imag()) - d) < 1e-9);
    }
  CHECK(complex_count == 2);
}
