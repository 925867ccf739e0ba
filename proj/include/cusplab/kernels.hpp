#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cusplab/contours.hpp"
#include "cusplab/spectral_curve.hpp"

namespace cusplab {

// Pearcey functions p, q and their first three x-derivatives at fixed time.
struct PearceyPQ {
  double p[4] = {0, 0, 0, 0};
  double q[4] = {0, 0, 0, 0};
};

// p(x) = (1/2 pi i) int_X exp(V^4/4 - t V^2/2 + V x) dV over the X contour,
// q(x) = (i/2 pi) int_{-i inf}^{i inf} exp(-U^4/4 + t U^2/2 - U x) dU.
class PearceyFunctions {
 public:
  explicit PearceyFunctions(double t, const QuadratureSpec& spec = {}, double x_bound = 20.0);
  PearceyPQ operator()(double x) const;
  double time() const { return t_; }

 private:
  double t_;
  ComplexRule v_rule_, u_rule_;
  std::vector<std::complex<double>> v_base_, u_base_;
};

PearceyPQ pearcey_pq(double t, double x, const QuadratureSpec& spec = {});

// Equal-time kernel (p q'' - p' q' + p'' q - t p q) / (y - x) with x-arguments on p
// and y-arguments on q. This orientation makes (d/dx + d/dy) K = p(x) q(y), matching
// the double integral; the diagonal uses one extra derivative.
double pearcey_kernel_pq_form(double t, double x, double y, const QuadratureSpec& spec = {});
double pearcey_kernel_from_pq(double t, double x, const PearceyPQ& at_x, double y, const PearceyPQ& at_y);

// Double contour integral for K_{s,t}(x, y), including the heat-kernel term when s < t.
class PearceyDoubleIntegral {
 public:
  PearceyDoubleIntegral(double s, double t, const QuadratureSpec& spec = {});
  Eigen::MatrixXd matrix(const std::vector<double>& xs, const std::vector<double>& ys,
                         bool include_heat_term = true) const;
  double operator()(double x, double y) const;

 private:
  double s_, t_;
  ComplexRule v_rule_, u_rule_;
  Eigen::MatrixXcd cauchy_;  // 1 / (U_b - V_a)
};

double pearcey_kernel(double s, double t, double x, double y, const QuadratureSpec& spec = {});

// The term subtracted from the double integral when s < t: the transition density
// of a standard Brownian motion over time t - s; zero when s >= t.
double pearcey_heat_term(double s, double t, double x, double y);

// Kernel matrix K(xs_i, ys_j) at times (s, t); the p, q form is used when s == t.
Eigen::MatrixXd pearcey_kernel_matrix(double s, double t, const std::vector<double>& xs,
                                      const std::vector<double>& ys, const QuadratureSpec& spec = {});

struct AiryValues {
  double ai = 0.0;
  double dai = 0.0;
};
AiryValues airy(double x);
double airy_kernel(double x, double y);

// n non-intersecting Brownian bridges; round(p n) of them end at a sqrt(n),
// the rest at b sqrt(n).
struct FiniteNParams {
  int n = 0;
  double a = 1.0, b = -1.0, p = 0.5;

  int upper_count() const;
  double effective_p() const { return static_cast<double>(upper_count()) / n; }
  void validate() const;
};

class FiniteNKernel {
 public:
  explicit FiniteNKernel(const FiniteNParams& params, const QuadratureSpec& spec = {});

  // Cusp data for the realised fraction upper_count() / n.
  const CriticalData& critical() const { return crit_; }
  const FiniteNParams& params() const { return params_; }

  // exp(row_log[i] + col_log[j]) * H_n(xs[i], ys[j]; tk, tl); the factors are
  // applied before exponentiation so that large conjugations stay finite.
  Eigen::MatrixXd matrix(double tk, double tl, const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::vector<double>& row_log = {}, const std::vector<double>& col_log = {}) const;
  double operator()(double tk, double tl, double x, double y) const;
  // Equal-time density profile K(x, x), evaluated in blocks of nearby points.
  std::vector<double> diagonal(double t, const std::vector<double>& xs, std::size_t block = 24) const;

 private:
  FiniteNParams params_;
  QuadratureSpec spec_;
  CriticalData crit_;
  double sigma_;  // U = sigma * u
  double kappa_;  // u - u0 = omega / kappa
};

double finite_n_kernel(const FiniteNParams& params, double tk, double tl, double x, double y,
                       const QuadratureSpec& spec = {});

}  // namespace cusplab
