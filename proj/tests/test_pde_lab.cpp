#include <cmath>

#include "cusplab/fredholm.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/pde_lab.hpp"
#include "doctest.h"

using namespace cusplab;

TEST_CASE("Q surface tabulation") {
  QSurface s = q_surface({0.0, 0.0}, 0.0, 1.0, 0.05, 0.05);
  CHECK(s.t_grid.size() == 5);
  CHECK(s.centre_grid.size() == 5);
  CHECK(s.halfwidth_grid.size() == 3);
  for (double v : s.values) CHECK(v < 0.0);
  GapResult direct = gap_probability(pearcey_kernel_fn(0.0), IntervalUnion{{-1.0, 1.0}});
  CHECK(std::abs(s(2, 2, 1) - direct.log_value) < 1e-12);
  // Wider sets have smaller gap probabilities.
  for (std::size_t it = 0; it < 5; ++it)
    for (std::size_t ic = 0; ic < 5; ++ic) {
      CHECK(s(it, ic, 0) > s(it, ic, 1));
      CHECK(s(it, ic, 1) > s(it, ic, 2));
    }
  // At t = 0 the kernel is invariant under x -> -x, so Q is even in the centre.
  for (std::size_t iw = 0; iw < 3; ++iw) {
    CHECK(std::abs(s(2, 0, iw) - s(2, 4, iw)) < 1e-10);
    CHECK(std::abs(s(2, 1, iw) - s(2, 3, iw)) < 1e-10);
  }
  QSurface tiny = q_surface({0.0, 0.0}, 0.3, 2e-4, 0.05, 1e-4);
  for (double v : tiny.values) CHECK(std::abs(v) < 1e-3);
  CHECK_THROWS(q_surface({0.0, 0.0}, 0.0, 0.01, 0.05, 0.05));
}

TEST_CASE("Pearcey PDE residual contracts at second order") {
  for (double t : {-0.5, 0.5}) {
    ResidualReport coarse = pearcey_pde_residual(q_surface({t, t}, 0.0, 1.0, 0.05, 0.05));
    ResidualReport fine = pearcey_pde_residual(q_surface({t, t}, 0.0, 1.0, 0.025, 0.025));
    CHECK(coarse.points.size() == 1);
    double ratio = coarse.max_abs / fine.max_abs;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
  }
  QSurface coarse = q_surface({-0.05, 0.05}, 0.2, 1.0, 0.05, 0.05);
  QSurface fine = q_surface({-0.05, 0.05}, 0.2, 1.0, 0.025, 0.025);
  ResidualReport rc = pearcey_pde_residual(coarse), rf = pearcey_pde_residual(fine);
  CHECK(rc.points.size() == 3);
  double ratio = rc.max_abs / rf.max_abs;
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
  // Negative controls: a corrupted surface and the opposite bracket sign do not contract.
  double corrupted = pearcey_pde_residual(coarse.scaled(1.01)).max_abs / pearcey_pde_residual(fine.scaled(1.01)).max_abs;
  CHECK(corrupted < 2.0);
  double flipped = pearcey_pde_residual(coarse, -1.0).max_abs / pearcey_pde_residual(fine, -1.0).max_abs;
  CHECK(flipped < 2.0);
  std::string csv = rc.to_csv();
  CHECK(csv.rfind("t,y1,y2,residual\n", 0) == 0);
  CHECK(csv.find("# max_abs=") != std::string::npos);
}

TEST_CASE("small-interval estimates") {
  SmallIntervalTable a = small_interval_checks(0.0, 0.0, {1e-2, 5e-3, 2.5e-3});
  CHECK(std::abs(a.coefficient_E - a.closed_E) < 1e-3 * std::abs(a.closed_E));
  double previous = INFINITY;
  for (const auto& row : a.rows) {
    double err = std::abs(row.dE_u / row.h - a.closed_E);
    CHECK(err < previous);
    previous = err;
  }
  // Both the closed form and the extracted coefficient vanish at t = x = 0 by symmetry.
  CHECK(std::abs(a.coefficient_t) < 1e-5);
  CHECK(std::abs(a.closed_t) < 1e-12);

  // The extracted time coefficient carries the sign opposite to the stated estimate.
  SmallIntervalTable b = small_interval_checks(1.0, 0.5, {1e-2, 5e-3, 2.5e-3});
  CHECK(std::abs(b.coefficient_E - b.closed_E) < 1e-3 * std::abs(b.closed_E));
  CHECK(std::abs(b.coefficient_t + b.closed_t) < 1e-3 * std::abs(b.closed_t));
  CHECK(std::abs(b.coefficient_t - b.closed_t) > std::abs(b.closed_t));

  SmallIntervalTable c = small_interval_checks(0.0, 0.3, {1e-4, 5e-5});
  for (const auto& row : c.rows) CHECK(std::abs(row.dE_u) < 1e-3);
}

TEST_CASE("Wronskian coefficient") {
  double w0 = wronskian_coefficient(0.0, 0.0);
  CHECK(std::abs(w0) > 1e-6);
  CHECK(std::abs(wronskian_coefficient(0.01, 0.0) - w0) < 0.1 * std::abs(w0));
  const double h = 1e-2;
  double small = small_interval_wronskian(0.0, 0.0, h);
  CHECK(small == doctest::Approx(0.5 * h * h * w0).epsilon(0.1));
}
