#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cusplab/contours.hpp"

namespace cusplab {

// Q(t, E) = log P(no Pearcey particle in E = (y1, y2) at time t), tabulated in the
// coordinates centre c = (y1 + y2)/2 and half-width w = (y2 - y1)/2. In these coordinates
// the divergence over the endpoints is d/dc and the Euler operator is c d/dc + w d/dw.
struct QSurface {
  std::vector<double> t_grid, centre_grid, halfwidth_grid;
  double h_t = 0, h_y = 0;
  std::vector<double> values;  // index (it * centres + ic) * halfwidths + iw

  double operator()(std::size_t it, std::size_t ic, std::size_t iw) const;
  double& at(std::size_t it, std::size_t ic, std::size_t iw);
  // Copy with every value multiplied by `factor`; used as a negative control.
  QSurface scaled(double factor) const;
};

// The grid covers t_range padded by two steps on each side, five centres around E_center
// and three half-widths around E_halfwidth, which is what the residual stencils need.
// Fredholm failures are rethrown with the node coordinates.
QSurface q_surface(std::pair<double, double> t_range, double E_center, double E_halfwidth, double h_t, double h_y,
                   int m = 40, const QuadratureSpec& spec = {});

struct ResidualPoint {
  double t = 0, y1 = 0, y2 = 0, residual = 0;
};

struct ResidualReport {
  std::vector<ResidualPoint> points;
  double max_abs = 0;
  double h_t = 0, h_y = 0;

  // `t,y1,y2,residual` rows and a trailing `# max_abs=... h_t=... h_y=...` line.
  std::string to_csv() const;
};

// Q_ttt + (1/8)(eps_E - 2t d/dt - 2) d_E^2 Q - (1/2) {d_E^2 Q, d_E Q_t}_{d_E} at every
// stencil-valid node, {f, g}_X = X(f) g - f X(g). Second-order centred differences; the
// third t-derivative uses the five-point stencil. `bracket_sign` = -1 flips the Wronskian
// term (regression fixture for the sign convention).
ResidualReport pearcey_pde_residual(const QSurface& surface, double bracket_sign = 1.0);

// Terms of the small-interval expansion for E = [x, x + h].
struct SmallIntervalRow {
  double h = 0;
  double dE_u = 0;  // (d/dx + d/dy) u by central differences in the shift
  double dt_u = 0;  // du/dt by central differences in t
};

struct SmallIntervalTable {
  double t = 0, x = 0;
  std::vector<SmallIntervalRow> rows;
  // First-order coefficients dE_u / h and dt_u / h extrapolated to h = 0 from the last two rows.
  double coefficient_E = 0, coefficient_t = 0;
  // Closed forms from the Pearcey functions at x: (pq)'(x) and (p''q - pq'')(x) / 2.
  double closed_E = 0, closed_t = 0;
};

SmallIntervalTable small_interval_checks(double t, double x, const std::vector<double>& h_list, int m = 20,
                                         const QuadratureSpec& spec = {});

// 2pq(pq)'' - 3(p'q')'(p'q'' - p''q') at (t, x).
double wronskian_coefficient(double t, double x, const QuadratureSpec& spec = {});

// {d_E u_t, d_E^2 u}_{d_E} for E = [x, x + h], by finite differences of u in the shift and in t.
double small_interval_wronskian(double t, double x, double h, int m = 20, const QuadratureSpec& spec = {});

}  // namespace cusplab
