#pragma once

#include <complex>
#include <string>
#include <vector>

#include "cusplab/quadrature.hpp"
#include "cusplab/spectral_curve.hpp"

namespace cusplab {

struct QuadratureSpec {
  double truncation_radius = 6.0;
  int panels = 8;
  int nodes_per_panel = 32;

  void validate() const;
};

// An oriented contour made of one or more polylines. Infinite rays are stored
// truncated; the first and last nodes of a piece are the truncation points.
struct ContourPath {
  std::string label;
  std::vector<std::vector<std::complex<double>>> pieces;

  // Composite Gauss-Legendre rule with spec.panels panels on every segment.
  ComplexRule rule(const QuadratureSpec& spec) const;
};

// Critical data for two targets b = 0 < a = 1 whose fraction gives the ratio q.
CriticalData critical_data_for_ratio(double q);

// Distance parameter of the corners where the v-contour leaves its diagonals.
// Infinite when q = 1.
double corner_offset(double q);

struct DescentContours {
  CriticalData critical;
  double corner = 0.0;
  ContourPath u_contour;  // vertical line through u0, traversed upward
  ContourPath v_contour;  // X through u0, horizontal continuations when q != 1
};

// Steepest-descent contours of the action around its quartic saddle u0.
DescentContours build_contours(double q, const QuadratureSpec& spec = {});

}  // namespace cusplab
