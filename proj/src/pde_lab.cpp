#include "cusplab/pde_lab.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "cusplab/fredholm.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/parallel.hpp"

namespace cusplab {

double QSurface::operator()(std::size_t it, std::size_t ic, std::size_t iw) const {
  return values.at((it * centre_grid.size() + ic) * halfwidth_grid.size() + iw);
}

double& QSurface::at(std::size_t it, std::size_t ic, std::size_t iw) {
  return values.at((it * centre_grid.size() + ic) * halfwidth_grid.size() + iw);
}

QSurface QSurface::scaled(double factor) const {
  QSurface out = *this;
  for (double& v : out.values) v *= factor;
  return out;
}

QSurface q_surface(std::pair<double, double> t_range, double E_center, double E_halfwidth, double h_t, double h_y,
                   int m, const QuadratureSpec& spec) {
  if (!(h_t > 0.0) || !(h_y > 0.0)) throw std::invalid_argument("q_surface: steps must be positive");
  if (!(t_range.second >= t_range.first)) throw std::invalid_argument("q_surface: empty time range");
  if (!(E_halfwidth > h_y)) throw std::invalid_argument("q_surface: half-width must exceed the step");
  QSurface s;
  s.h_t = h_t;
  s.h_y = h_y;
  const long steps = std::lround((t_range.second - t_range.first) / h_t);
  for (long k = -2; k <= steps + 2; ++k) s.t_grid.push_back(t_range.first + k * h_t);
  for (int k = -2; k <= 2; ++k) s.centre_grid.push_back(E_center + k * h_y);
  for (int k = -1; k <= 1; ++k) s.halfwidth_grid.push_back(E_halfwidth + k * h_y);
  const std::size_t nc = s.centre_grid.size(), nw = s.halfwidth_grid.size();
  s.values.assign(s.t_grid.size() * nc * nw, 0.0);
  parallel_for(s.values.size(), [&](std::size_t idx) {
    const std::size_t it = idx / (nc * nw), ic = (idx / nw) % nc, iw = idx % nw;
    const double t = s.t_grid[it], c = s.centre_grid[ic], w = s.halfwidth_grid[iw];
    try {
      GapResult g = gap_probability(pearcey_kernel_fn(t, spec), IntervalUnion{{c - w, c + w}}, m);
      if (!(g.value > 1e-10)) throw std::runtime_error("gap probability below 1e-10");
      s.values[idx] = g.log_value;
    } catch (const std::exception& e) {
      char where[160];
      std::snprintf(where, sizeof where, "q_surface at t=%.17g, E=(%.17g, %.17g): ", t, c - w, c + w);
      throw std::runtime_error(where + std::string(e.what()));
    }
  });
  return s;
}

std::string ResidualReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,y1,y2,residual\n";
  for (const auto& p : points) out << p.t << ',' << p.y1 << ',' << p.y2 << ',' << p.residual << '\n';
  out << "# max_abs=" << max_abs << " h_t=" << h_t << " h_y=" << h_y << '\n';
  return out.str();
}

ResidualReport pearcey_pde_residual(const QSurface& s, double bracket_sign) {
  const std::size_t nt = s.t_grid.size(), nc = s.centre_grid.size(), nw = s.halfwidth_grid.size();
  if (nt < 5 || nc < 5 || nw < 3) throw std::invalid_argument("pearcey_pde_residual: stencil out of range");
  const double ht = s.h_t, hy = s.h_y;
  ResidualReport report;
  report.h_t = ht;
  report.h_y = hy;
  for (std::size_t it = 2; it + 2 < nt; ++it)
    for (std::size_t ic = 2; ic + 2 < nc; ++ic)
      for (std::size_t iw = 1; iw + 1 < nw; ++iw) {
        auto Q = [&](int dt, int dc, int dw) { return s(it + dt, ic + dc, iw + dw); };
        auto Qcc = [&](int dt, int dw) { return (Q(dt, 1, dw) - 2.0 * Q(dt, 0, dw) + Q(dt, -1, dw)) / (hy * hy); };
        const double t = s.t_grid[it], c = s.centre_grid[ic], w = s.halfwidth_grid[iw];
        const double q_ttt = (Q(2, 0, 0) - 2.0 * Q(1, 0, 0) + 2.0 * Q(-1, 0, 0) - Q(-2, 0, 0)) / (2.0 * ht * ht * ht);
        const double q_cc = Qcc(0, 0);
        const double q_ccc = (Q(0, 2, 0) - 2.0 * Q(0, 1, 0) + 2.0 * Q(0, -1, 0) - Q(0, -2, 0)) / (2.0 * hy * hy * hy);
        const double q_ct = (Q(1, 1, 0) - Q(1, -1, 0) - Q(-1, 1, 0) + Q(-1, -1, 0)) / (4.0 * ht * hy);
        const double q_cct = (Qcc(1, 0) - Qcc(-1, 0)) / (2.0 * ht);
        const double q_ccw = (Qcc(0, 1) - Qcc(0, -1)) / (2.0 * hy);
        const double euler = c * q_ccc + w * q_ccw;
        const double bracket = q_ccc * q_ct - q_cc * q_cct;
        const double r = q_ttt + 0.125 * (euler - 2.0 * t * q_cct - 2.0 * q_cc) - 0.5 * bracket_sign * bracket;
        report.points.push_back({t, c - w, c + w, r});
        report.max_abs = std::max(report.max_abs, std::abs(r));
      }
  return report;
}

namespace {

double small_u(double t, double x, double h, double shift, int m, const QuadratureSpec& spec) {
  return resolvent_quantities(t, IntervalUnion{{x + shift, x + h + shift}}, m, spec).u;
}

}  // namespace

SmallIntervalTable small_interval_checks(double t, double x, const std::vector<double>& h_list, int m,
                                         const QuadratureSpec& spec) {
  if (h_list.size() < 2) throw std::invalid_argument("small_interval_checks: need at least two widths");
  const double delta = 1e-3;
  SmallIntervalTable table;
  table.t = t;
  table.x = x;
  for (double h : h_list) {
    if (!(h > 0.0)) throw std::invalid_argument("small_interval_checks: widths must be positive");
    SmallIntervalRow row;
    row.h = h;
    row.dE_u = (small_u(t, x, h, delta, m, spec) - small_u(t, x, h, -delta, m, spec)) / (2.0 * delta);
    row.dt_u = (small_u(t + delta, x, h, 0.0, m, spec) - small_u(t - delta, x, h, 0.0, m, spec)) / (2.0 * delta);
    table.rows.push_back(row);
  }
  const SmallIntervalRow& a = table.rows[table.rows.size() - 2];
  const SmallIntervalRow& b = table.rows.back();
  auto extrapolate = [&](double ca, double cb) { return (a.h * cb - b.h * ca) / (a.h - b.h); };
  table.coefficient_E = extrapolate(a.dE_u / a.h, b.dE_u / b.h);
  table.coefficient_t = extrapolate(a.dt_u / a.h, b.dt_u / b.h);
  PearceyPQ v = pearcey_pq(t, x, spec);
  table.closed_E = v.p[1] * v.q[0] + v.p[0] * v.q[1];
  table.closed_t = 0.5 * (v.p[2] * v.q[0] - v.p[0] * v.q[2]);
  return table;
}

double wronskian_coefficient(double t, double x, const QuadratureSpec& spec) {
  PearceyPQ v = pearcey_pq(t, x, spec);
  const double* p = v.p;
  const double* q = v.q;
  const double pq = p[0] * q[0];
  const double pq2 = p[2] * q[0] + 2.0 * p[1] * q[1] + p[0] * q[2];
  const double dpq1 = p[2] * q[1] + p[1] * q[2];  // (p'q')'
  return 2.0 * pq * pq2 - 3.0 * dpq1 * (p[1] * q[2] - p[2] * q[1]);
}

double small_interval_wronskian(double t, double x, double h, int m, const QuadratureSpec& spec) {
  const double d = 1e-2, dt = 1e-2;
  double u[5], up[3], dn[3];
  for (int k = -2; k <= 2; ++k) u[k + 2] = small_u(t, x, h, k * d, m, spec);
  for (int k = -1; k <= 1; ++k) {
    up[k + 1] = small_u(t + dt, x, h, k * d, m, spec);
    dn[k + 1] = small_u(t - dt, x, h, k * d, m, spec);
  }
  const double g = (u[3] - 2.0 * u[2] + u[1]) / (d * d);
  const double g1 = (u[4] - 2.0 * u[3] + 2.0 * u[1] - u[0]) / (2.0 * d * d * d);
  const double f = ((up[2] - up[0]) - (dn[2] - dn[0])) / (4.0 * d * dt);
  const double f1 = ((up[2] - 2.0 * up[1] + up[0]) - (dn[2] - 2.0 * dn[1] + dn[0])) / (2.0 * dt * d * d);
  return f1 * g - f * g1;
}

}  // namespace cusplab
