#include "cusplab/contours.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cusplab {

namespace {
using cplx = std::complex<double>;
const cplx I(0.0, 1.0);
}  // namespace

void QuadratureSpec::validate() const {
  if (!(truncation_radius >= 4.0)) throw std::invalid_argument("QuadratureSpec: truncation radius must be at least 4");
  if (panels < 1 || nodes_per_panel < 1 || panels * nodes_per_panel < 64)
    throw std::invalid_argument("QuadratureSpec: need panels * nodes_per_panel >= 64");
}

ComplexRule ContourPath::rule(const QuadratureSpec& spec) const {
  ComplexRule out;
  for (const auto& piece : pieces)
    for (std::size_t k = 0; k + 1 < piece.size(); ++k)
      out.append(segment_rule(piece[k], piece[k + 1], spec.panels, spec.nodes_per_panel));
  return out;
}

CriticalData critical_data_for_ratio(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("q must be positive and finite");
  return find_cusp(1.0, 0.0, 1.0 / (1.0 + q * q * q));
}

double corner_offset(double q) {
  if (q == 1.0) return std::numeric_limits<double>::infinity();
  double r = std::sqrt(q * q - q + 1.0);
  return q / (r * std::abs(q - 1.0));
}

DescentContours build_contours(double q, const QuadratureSpec& spec) {
  spec.validate();
  DescentContours out;
  out.critical = critical_data_for_ratio(q);
  out.corner = corner_offset(q);
  const double L = spec.truncation_radius;
  const cplx u0 = out.critical.u0;

  out.u_contour.label = "u-line";
  out.u_contour.pieces.push_back({u0 - I * L, u0 + I * L});

  out.v_contour.label = "v-X";
  const bool right_cut = q > 1.0, left_cut = q < 1.0;
  auto wedge = [&](double side, bool cut) {
    // side = +1: in from the upper right, out to the lower right.
    // side = -1: in from the lower left, out to the upper left.
    std::vector<cplx> piece;
    cplx up = u0 + (side > 0 ? 1.0 : -1.0) * out.corner * cplx(1.0, side);
    cplx down = u0 + (side > 0 ? 1.0 : -1.0) * out.corner * cplx(1.0, -side);
    if (cut) {
      piece = {up + side * L, up, u0, down, down + side * L};
    } else {
      cplx a = u0 + side * L * cplx(1.0, side), b = u0 + side * L * cplx(1.0, -side);
      piece = {a, u0, b};
    }
    if (side < 0) std::reverse(piece.begin(), piece.end());
    return piece;
  };
  out.v_contour.pieces.push_back(wedge(+1.0, right_cut));
  out.v_contour.pieces.push_back(wedge(-1.0, left_cut));
  return out;
}

}  // namespace cusplab
