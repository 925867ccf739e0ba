#include "cusplab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cusplab {

using cplx = std::complex<double>;

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// d^k/du^k of log(u - a) for k >= 1.
cplx log_derivative(cplx u, double a, int k) {
  double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * factorial(k - 1) / std::pow(u - a, k);
}

}  // namespace

std::vector<cplx> action_F(cplx u, const CriticalData& crit, int order) {
  if (order < 0 || order > 5) throw std::invalid_argument("action_F: order must be in [0, 5]");
  const double p = crit.p;
  std::vector<cplx> out(order + 1);
  out[0] = 0.5 * u * u - u * crit.z0 + p * std::log(u - crit.alpha) + (1.0 - p) * std::log(u - crit.beta);
  for (int k = 1; k <= order; ++k) {
    cplx v = p * log_derivative(u, crit.alpha, k) + (1.0 - p) * log_derivative(u, crit.beta, k);
    if (k == 1) v += u - crit.z0;
    if (k == 2) v += 1.0;
    out[k] = v;
  }
  return out;
}

Rational Rational::make(long num, long den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long g = std::gcd(num, den);
  if (g == 0) g = 1;
  return {num / g, den / g};
}

ScalingExponents critical_exponents(int l) {
  if (l < 1) throw std::invalid_argument("critical_exponents: l must be at least 1");
  return {l, Rational::make(1, l + 2), Rational::make(l + 1, l + 2), Rational::make(l, l + 2)};
}

double ActionDerivatives::criticality_defect(int l) const {
  if (l < 1 || l + 2 >= static_cast<int>(y_derivs.size()))
    throw std::invalid_argument("criticality_defect: order not available");
  double worst = 0.0;
  for (int k = 1; k <= l + 1; ++k) worst = std::max(worst, std::abs(y_derivs[k]));
  return worst / std::abs(y_derivs[l + 2]);
}

ActionDerivatives target_action_derivatives(const TargetConfig& targets, double x, double y, double t) {
  TargetConfig check = targets;
  check.time = t;
  check.validate();
  const double w = t * (1.0 - t);
  const double rt2 = std::sqrt(2.0);
  // h = 1/c(t), s = t h = sqrt(2t/(1-t)) scales the targets.
  const double h = rt2 / std::sqrt(w);
  const double h1 = -0.5 * rt2 * std::pow(w, -1.5) * (1.0 - 2.0 * t);
  const double h2 = rt2 * (0.75 * std::pow(w, -2.5) * (1.0 - 2.0 * t) * (1.0 - 2.0 * t) + std::pow(w, -1.5));
  const double ratio = t / (1.0 - t), ratio1 = 1.0 / ((1.0 - t) * (1.0 - t)), ratio2 = 2.0 / std::pow(1.0 - t, 3);
  const double s = rt2 * std::sqrt(ratio);
  const double s1 = rt2 * 0.5 * ratio1 / std::sqrt(ratio);
  const double s2 = rt2 * (-0.25 * ratio1 * ratio1 * std::pow(ratio, -1.5) + 0.5 * ratio2 / std::sqrt(ratio));

  ActionDerivatives d;
  d.x = x;
  d.y = y;
  d.t = t;
  d.y_derivs.assign(7, 0.0);
  d.y_derivs[1] = y - x * h;
  d.y_derivs[2] = 1.0;
  d.S_x = -y * h;
  d.S_xy = -h;
  d.S_tx = -y * h1;
  d.S_txy = -h1;
  d.S_ty = -x * h1;
  d.S_tty = -x * h2;
  for (std::size_t i = 0; i < targets.targets.size(); ++i) {
    const double eps = targets.fractions[i], a = targets.targets[i];
    const double g = y - a * s;
    for (int k = 1; k <= 6; ++k) d.y_derivs[k] += eps * log_derivative(cplx(y), a * s, k).real();
    d.S_ty += eps * a * s1 / (g * g);
    d.S_tyy += -2.0 * eps * a * s1 / (g * g * g);
    d.S_tty += eps * (a * s2 / (g * g) + 2.0 * a * a * s1 * s1 / (g * g * g));
  }
  return d;
}

namespace {

using Fn1 = std::function<double(double)>;

double central(const Fn1& f, int k, double at, double h) {
  switch (k) {
    case 1: return (f(at + h) - f(at - h)) / (2.0 * h);
    case 2: return (f(at + h) - 2.0 * f(at) + f(at - h)) / (h * h);
    case 3: return (f(at + 2 * h) - 2.0 * f(at + h) + 2.0 * f(at - h) - f(at - 2 * h)) / (2.0 * h * h * h);
    case 4:
      return (f(at + 2 * h) - 4.0 * f(at + h) + 6.0 * f(at) - 4.0 * f(at - h) + f(at - 2 * h)) / (h * h * h * h);
    default: throw std::invalid_argument("numeric derivative order must be 1..4");
  }
}

// Richardson-extrapolated central difference; the step grows with the order to keep
// rounding in check.
double derivative(const Fn1& f, int k, double at, double h) {
  const double step = h * (k <= 2 ? 1.0 : (k == 3 ? 4.0 : 10.0));
  return (4.0 * central(f, k, at, step) - central(f, k, at, 2.0 * step)) / 3.0;
}

}  // namespace

ActionDerivatives numeric_action_derivatives(const std::function<double(double, double, double)>& S, double x,
                                             double y, double t, double h) {
  ActionDerivatives d;
  d.x = x;
  d.y = y;
  d.t = t;
  d.y_derivs.assign(5, 0.0);
  Fn1 in_y = [&](double v) { return S(x, v, t); };
  for (int k = 1; k <= 4; ++k) d.y_derivs[k] = derivative(in_y, k, y, h);

  auto y_partial = [&](int k, double xv, double tv) {
    return derivative([&](double v) { return S(xv, v, tv); }, k, y, h);
  };
  d.S_x = derivative([&](double v) { return S(v, y, t); }, 1, x, h);
  d.S_xx = derivative([&](double v) { return S(v, y, t); }, 2, x, h);
  d.S_tx = derivative([&](double tv) { return derivative([&](double v) { return S(v, y, tv); }, 1, x, h); }, 1, t, h);
  d.S_xy = derivative([&](double v) { return y_partial(1, v, t); }, 1, x, h);
  d.S_xyy = derivative([&](double v) { return y_partial(2, v, t); }, 1, x, h);
  d.S_xxy = derivative([&](double v) { return y_partial(1, v, t); }, 2, x, h);
  d.S_ty = derivative([&](double tv) { return y_partial(1, x, tv); }, 1, t, h);
  d.S_tyy = derivative([&](double tv) { return y_partial(2, x, tv); }, 1, t, h);
  d.S_tty = derivative([&](double tv) { return y_partial(1, x, tv); }, 2, t, h);
  d.S_txy = derivative(
      [&](double tv) { return derivative([&](double v) { return y_partial(1, v, tv); }, 1, x, h); }, 1, t, h);
  return d;
}

ScalingCoefficients solve_scaling(const ActionDerivatives& d, int l, double tau) {
  const int k = l + 2;
  if (l < 1 || k >= static_cast<int>(d.y_derivs.size()))
    throw std::invalid_argument("solve_scaling: derivative of order l + 2 not available");
  const double lead = d.y_derivs[k];
  if (lead == 0.0 || !std::isfinite(lead)) throw std::invalid_argument("solve_scaling: degenerate leading derivative");
  if (d.S_xy == 0.0) throw std::invalid_argument("solve_scaling: S_xy vanishes");

  ScalingCoefficients c;
  const double power = -factorial(k - 1) / lead;  // alpha_y^k
  if (power > 0.0) {
    c.alpha_y = std::pow(power, 1.0 / k);
  } else if (k % 2 == 1) {
    c.alpha_y = -std::pow(-power, 1.0 / k);
  } else {
    c.alpha_y = std::pow(-power, 1.0 / k);
    c.orientation = -1;
  }
  const double mixed = d.S_tyy - d.S_ty * d.S_xyy / d.S_xy;
  if (mixed == 0.0) throw std::invalid_argument("solve_scaling: time coupling vanishes");
  c.alpha_t = 1.0 / (c.alpha_y * c.alpha_y * mixed);
  c.alpha_x = -c.alpha_t * tau * d.S_ty / d.S_xy;
  c.beta_x = -1.0 / (c.alpha_y * d.S_xy);
  return c;
}

std::vector<double> scaling_residuals(const ActionDerivatives& d, int l, double tau, const ScalingCoefficients& c) {
  const int k = l + 2;
  const double ay2 = c.alpha_y * c.alpha_y;
  return {c.alpha_x * d.S_xy + c.alpha_t * tau * d.S_ty,
          std::pow(c.alpha_y, k) * d.y_derivs.at(k) / factorial(k) + c.orientation / static_cast<double>(k),
          0.5 * ay2 * (c.alpha_t * tau * d.S_tyy + c.alpha_x * d.S_xyy) - 0.5 * tau,
          c.beta_x * c.alpha_y * d.S_xy + 1.0};
}

SpaceTime rescale_map(const CriticalData& crit, int n, double tau, double xi) {
  if (n < 1) throw std::invalid_argument("rescale_map: n must be positive");
  const double rn = std::sqrt(static_cast<double>(n));
  const double scale = crit.c0 * crit.mu;
  return {crit.t0 + 2.0 * scale * scale * tau / rn,
          crit.c0 * (crit.z0 * rn + crit.A * tau + crit.mu * xi / std::sqrt(rn))};
}

std::pair<double, double> inverse_rescale_map(const CriticalData& crit, int n, double t, double x) {
  if (n < 1) throw std::invalid_argument("inverse_rescale_map: n must be positive");
  const double rn = std::sqrt(static_cast<double>(n));
  const double scale = crit.c0 * crit.mu;
  const double tau = (t - crit.t0) * rn / (2.0 * scale * scale);
  const double xi = (x / crit.c0 - crit.z0 * rn - crit.A * tau) * std::sqrt(rn) / crit.mu;
  return {tau, xi};
}

double conjugation_log(const CriticalData& crit, int n, double tau, double xi) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double u0 = crit.u0, mu = crit.mu;
  return -u0 * mu * xi * std::sqrt(rn) - 0.5 * rn * tau * u0 * u0 * mu * mu -
         0.5 * crit.t0 * u0 * u0 * std::pow(mu, 4) * tau * tau;
}

double conjugation_factor(const CriticalData& crit, int n, double tau, double xi) {
  return std::exp(conjugation_log(crit, n, tau, xi));
}

RescaledKernel::RescaledKernel(const FiniteNParams& params, const QuadratureSpec& spec) : kernel_(params, spec) {}

Eigen::MatrixXd RescaledKernel::evaluate(double tau_k, double tau_l, const std::vector<double>& xis,
                                         const std::vector<double>& etas, bool conjugate) const {
  const CriticalData& crit = kernel_.critical();
  const int n = kernel_.params().n;
  const double jacobian = std::log(crit.c0 * crit.mu) - 0.25 * std::log(static_cast<double>(n));
  const double tk = rescale_map(crit, n, tau_k, 0.0).t, tl = rescale_map(crit, n, tau_l, 0.0).t;
  std::vector<double> xs, ys, row_log, col_log;
  for (double xi : xis) {
    xs.push_back(rescale_map(crit, n, tau_k, xi).x);
    row_log.push_back(jacobian + (conjugate ? conjugation_log(crit, n, tau_k, xi) : 0.0));
  }
  for (double eta : etas) {
    ys.push_back(rescale_map(crit, n, tau_l, eta).x);
    col_log.push_back(conjugate ? -conjugation_log(crit, n, tau_l, eta) : 0.0);
  }
  return kernel_.matrix(tk, tl, xs, ys, row_log, col_log);
}

Eigen::MatrixXd RescaledKernel::matrix(double tau_k, double tau_l, const std::vector<double>& xis,
                                       const std::vector<double>& etas) const {
  return evaluate(tau_k, tau_l, xis, etas, true);
}

Eigen::MatrixXd RescaledKernel::raw_matrix(double tau_k, double tau_l, const std::vector<double>& xis,
                                           const std::vector<double>& etas) const {
  return evaluate(tau_k, tau_l, xis, etas, false);
}

double fit_loglog_slope(const std::vector<ConvergenceRow>& rows, std::size_t last) {
  if (last < 2 || rows.size() < last) throw std::invalid_argument("fit_loglog_slope: not enough rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(last);
  for (std::size_t k = rows.size() - last; k < rows.size(); ++k) {
    double lx = std::log(static_cast<double>(rows[k].n)), ly = std::log(rows[k].max_abs_error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ConvergenceStudy convergence_study(double a, double b, double p, const std::vector<int>& n_list,
                                   const ProbeGrid& probe, const QuadratureSpec& spec) {
  if (n_list.empty()) throw std::invalid_argument("convergence_study: empty n list");
  ConvergenceStudy study;
  for (int n : n_list) {
    RescaledKernel K({n, a, b, p}, spec);
    double worst = 0.0;
    for (auto [tk, tl] : probe.time_pairs) {
      Eigen::MatrixXd approx = K.matrix(tk, tl, probe.xi, probe.eta);
      Eigen::MatrixXd exact = pearcey_kernel_matrix(tk, tl, probe.xi, probe.eta, spec);
      worst = std::max(worst, (approx - exact).cwiseAbs().maxCoeff());
    }
    study.rows.push_back({n, worst});
  }
  const std::size_t tail = std::min<std::size_t>(3, study.rows.size());
  if (tail >= 2) {
    study.fitted_slope = fit_loglog_slope(study.rows, tail);
    study.decreasing_tail = true;
    for (std::size_t k = study.rows.size() - tail + 1; k < study.rows.size(); ++k)
      if (!(study.rows[k].max_abs_error < study.rows[k - 1].max_abs_error)) study.decreasing_tail = false;
  }
  return study;
}

RemainderCheck remainder_bound_check(double q, double delta, double n) {
  if (!(q > 0.0) || !(n >= 1.0) || !(delta >= 0.0)) throw std::invalid_argument("remainder_bound_check: bad arguments");
  const CriticalData crit = critical_data_for_ratio(q);
  const double quarter = std::pow(n, 0.25);
  const double d = delta / quarter;
  if (d >= std::min(1.0, q) / crit.r)
    throw std::invalid_argument("remainder_bound_check: u0 + delta / n^{1/4} reaches a logarithmic singularity");
  const cplx u0 = crit.u0;
  const std::vector<cplx> at0 = action_F(u0, crit, 4);
  const cplx shifted = action_F(u0 + d, crit, 0)[0];
  RemainderCheck out;
  out.lhs = n * std::abs(shifted - at0[0] - at0[4] * std::pow(d, 4) / 24.0);
  out.rhs = 64.0 * std::pow(delta, 5) / (5.0 * quarter) * std::pow(q + 1.0 / q, 5);
  out.ok = out.lhs <= out.rhs;
  out.in_domain = delta <= std::pow(n, 0.05) * (1.0 + 1e-12) && d <= std::min(1.0, q) / (2.0 * crit.r) * (1.0 + 1e-12);
  return out;
}

namespace {

// Inserts u0 into a polyline that passes through it without having it as a node.
std::vector<cplx> with_vertex(std::vector<cplx> piece, cplx u0) {
  for (const cplx& z : piece)
    if (std::abs(z - u0) < 1e-12) return piece;
  for (std::size_t k = 0; k + 1 < piece.size(); ++k) {
    cplx d = piece[k + 1] - piece[k], e = u0 - piece[k];
    double s = (std::conj(d) * e).real() / std::norm(d);
    if (s > 0.0 && s < 1.0 && std::abs(e - s * d) < 1e-12 * (1.0 + std::abs(d))) {
      piece.insert(piece.begin() + static_cast<std::ptrdiff_t>(k) + 1, u0);
      return piece;
    }
  }
  throw std::invalid_argument("contour_descent_check: contour does not pass through u0");
}

}  // namespace

DescentReport contour_descent_check(const DescentContours& contours, int samples_per_segment) {
  if (samples_per_segment < 1) throw std::invalid_argument("contour_descent_check: samples must be positive");
  const CriticalData& crit = contours.critical;
  const cplx u0 = crit.u0;
  DescentReport report;
  auto walk = [&](const ContourPath& path, double sign) {
    for (const auto& raw : path.pieces) {
      std::vector<cplx> piece = with_vertex(raw, u0);
      std::size_t centre = 0;
      for (std::size_t k = 0; k < piece.size(); ++k)
        if (std::abs(piece[k] - u0) < 1e-12) centre = k;
      for (int dir : {-1, +1}) {
        cplx prev_z = u0;
        double prev = sign * action_F(u0, crit, 0)[0].real();
        for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(centre);; k += dir) {
          std::ptrdiff_t next = k + dir;
          if (next < 0 || next >= static_cast<std::ptrdiff_t>(piece.size())) break;
          cplx from = piece[k], to = piece[next];
          for (int s = 1; s <= samples_per_segment; ++s) {
            cplx z = from + (to - from) * (static_cast<double>(s) / samples_per_segment);
            double value = sign * action_F(z, crit, 0)[0].real();
            ++report.samples_checked;
            if (!(value < prev)) {
              report.ok = false;
              report.violations.push_back({path.label, prev_z, z, value - prev});
            }
            prev = value;
            prev_z = z;
          }
        }
      }
    }
  };
  walk(contours.u_contour, 1.0);
  walk(contours.v_contour, -1.0);
  return report;
}

DescentReport contour_descent_check(double q, int samples_per_segment, const QuadratureSpec& spec) {
  return contour_descent_check(build_contours(q, spec), samples_per_segment);
}

}  // namespace cusplab
