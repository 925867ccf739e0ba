#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cusplab/contours.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/spectral_curve.hpp"

namespace cusplab {

// F(u) = u^2/2 - u z0 + p log(u - alpha) + (1 - p) log(u - beta) and its first `order`
// derivatives (order <= 5), principal logarithms.
std::vector<std::complex<double>> action_F(std::complex<double> u, const CriticalData& crit, int order);

struct Rational {
  long num = 0, den = 1;
  static Rational make(long num, long den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

struct ScalingExponents {
  int l = 0;
  Rational gamma_y, gamma_x, gamma_t;
};

// gamma_y = 1/(l+2), gamma_x = (l+1)/(l+2), gamma_t = l/(l+2).
ScalingExponents critical_exponents(int l);

// Partial derivatives of an action S(x, y; t) at a base point; y is the integration variable.
struct ActionDerivatives {
  double x = 0, y = 0, t = 0;
  std::vector<double> y_derivs;  // y_derivs[k] = d^k S / dy^k for k = 1..6 (index 0 unused)
  double S_x = 0, S_xx = 0, S_xy = 0, S_xyy = 0, S_xxy = 0;
  double S_ty = 0, S_tyy = 0, S_tx = 0, S_txy = 0, S_tty = 0;

  double S_y() const { return y_derivs.at(1); }
  double S_yy() const { return y_derivs.at(2); }
  double S_yyy() const { return y_derivs.at(3); }
  double S_yyyy() const { return y_derivs.at(4); }
  // Largest |d^k S/dy^k| for k = 1..l+1, relative to |d^{l+2} S/dy^{l+2}|.
  double criticality_defect(int l) const;
};

// S(x, y; t) = y^2/2 - x y / c(t) + sum_i f_i log(y - a_i sqrt(2t/(1-t))), c(t) = sqrt(t(1-t)/2),
// the action of n Brownian bridges with fractions f_i ending at a_i sqrt(n).
ActionDerivatives target_action_derivatives(const TargetConfig& targets, double x, double y, double t);

// The same partials by central differences of a real action; used to cross-check the
// closed forms and for actions given as black boxes.
ActionDerivatives numeric_action_derivatives(const std::function<double(double, double, double)>& S, double x,
                                             double y, double t, double h = 1e-3);

// Coefficients of t = t_c + alpha_t tau / N^{l/(l+2)},
// x = x_c + alpha_x / N^{l/(l+2)} + beta_x X / N^{(l+1)/(l+2)}, y = y_c + alpha_y Y / N^{1/(l+2)}.
struct ScalingCoefficients {
  double alpha_t = 0, alpha_x = 0, beta_x = 0, alpha_y = 0;
  // +1 when alpha_y^{l+2} d^{l+2}S / (l+2)! = -1/(l+2) has a positive real solution; -1 when only
  // |alpha_y| is returned and the leading term carries the opposite sign (roles of the u and
  // v contours exchanged).
  int orientation = 1;
};

// Solves alpha_x S_xy + alpha_t tau S_ty = 0,
// alpha_y^{l+2} d^{l+2}S / (l+2)! = -1/(l+2),
// (alpha_y^2 / 2)(alpha_t tau S_tyy + alpha_x S_xyy) = tau / 2,
// beta_x alpha_y S_xy = -1.
ScalingCoefficients solve_scaling(const ActionDerivatives& d, int l, double tau);

// Residuals of the four conditions above (the second one up to orientation).
std::vector<double> scaling_residuals(const ActionDerivatives& d, int l, double tau, const ScalingCoefficients& c);

// Time and position of the finite-n process corresponding to Pearcey coordinates (tau, xi).
struct SpaceTime {
  double t = 0, x = 0;
};
SpaceTime rescale_map(const CriticalData& crit, int n, double tau, double xi);
std::pair<double, double> inverse_rescale_map(const CriticalData& crit, int n, double t, double x);

// log D(xi, tau) = -u0 mu xi n^{1/4} - sqrt(n) tau u0^2 mu^2 / 2 - t0 u0^2 mu^4 tau^2 / 2.
double conjugation_log(const CriticalData& crit, int n, double tau, double xi);
double conjugation_factor(const CriticalData& crit, int n, double tau, double xi);

// c0 mu n^{-1/4} D(xi, tau_k) K_n(t_k, t_l; x, y) D(eta, tau_l)^{-1} in Pearcey coordinates.
class RescaledKernel {
 public:
  explicit RescaledKernel(const FiniteNParams& params, const QuadratureSpec& spec = {});
  Eigen::MatrixXd matrix(double tau_k, double tau_l, const std::vector<double>& xis,
                         const std::vector<double>& etas) const;
  // Without the conjugation; determinants must agree with matrix().
  Eigen::MatrixXd raw_matrix(double tau_k, double tau_l, const std::vector<double>& xis,
                             const std::vector<double>& etas) const;
  const CriticalData& critical() const { return kernel_.critical(); }
  const FiniteNKernel& kernel() const { return kernel_; }

 private:
  FiniteNKernel kernel_;
  Eigen::MatrixXd evaluate(double tau_k, double tau_l, const std::vector<double>& xis,
                           const std::vector<double>& etas, bool conjugate) const;
};

struct ProbeGrid {
  std::vector<std::pair<double, double>> time_pairs = {{0.0, 0.0}};
  std::vector<double> xi = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> eta = {-1.0, -0.5, 0.0, 0.5, 1.0};
};

struct ConvergenceRow {
  int n = 0;
  double max_abs_error = 0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double fitted_slope = 0;        // least squares of log error against log n, last three rows
  bool decreasing_tail = false;   // errors strictly decrease across the last three rows
};

ConvergenceStudy convergence_study(double a, double b, double p, const std::vector<int>& n_list,
                                   const ProbeGrid& probe = {}, const QuadratureSpec& spec = {});
double fit_loglog_slope(const std::vector<ConvergenceRow>& rows, std::size_t last);

struct RemainderCheck {
  double lhs = 0, rhs = 0;
  bool ok = false;
  bool in_domain = false;  // delta <= n^{1/20} and delta / n^{1/4} <= min(1, q) / (2r)
};
// Outside the stated domain the inequality is still evaluated and in_domain is false; a
// shift reaching the nearest target throws.
// n |F(u0 + d) - F(u0) - F''''(u0) d^4 / 4!| against 64 delta^5 (q + 1/q)^5 / (5 n^{1/4}),
// with d = delta / n^{1/4}.
RemainderCheck remainder_bound_check(double q, double delta, double n);

struct DescentViolation {
  std::string contour;
  std::complex<double> from, to;
  double increase = 0;
};
struct DescentReport {
  bool ok = true;
  int samples_checked = 0;
  std::vector<DescentViolation> violations;
};
// Re F must decrease strictly away from u0 along the u contour, and -Re F along the v contour.
DescentReport contour_descent_check(const DescentContours& contours, int samples_per_segment);
DescentReport contour_descent_check(double q, int samples_per_segment, const QuadratureSpec& spec = {});

}  // namespace cusplab
