#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "cusplab/contours.hpp"

namespace cusplab {

// E = (y1, y2) u (y3, y4) u ... given by its sorted endpoints.
struct IntervalUnion {
  std::vector<double> endpoints;

  void validate() const;
  bool empty() const { return endpoints.empty(); }
  std::size_t count() const { return endpoints.size() / 2; }
  double measure() const;
  IntervalUnion shifted(double h) const;
};

// Gauss-Legendre nodes, m per interval.
struct NystromGrid {
  std::vector<double> nodes, weights;

  static NystromGrid build(const IntervalUnion& E, int m);
  std::size_t size() const { return nodes.size(); }
};

struct GapResult {
  double value = 1.0;
  double log_value = 0.0;
  double error_estimate = 0.0;  // |det at m nodes - det at 2m nodes|
  double truncated_at = 0.0;    // upper cut of a semi-infinite set, 0 when unused
};

// K(xs_i, ys_j).
using KernelMatrixFn = std::function<Eigen::MatrixXd(const std::vector<double>&, const std::vector<double>&)>;
// K_{s,t}(xs_i, ys_j), including the heat term for s < t.
using TimeKernelMatrixFn =
    std::function<Eigen::MatrixXd(double, double, const std::vector<double>&, const std::vector<double>&)>;

// log det(I - K on E) by symmetrized Nystrom with a fixed grid.
double log_fredholm_det(const KernelMatrixFn& kernel, const NystromGrid& grid);

// det(I - K restricted to E), computed with m and 2m nodes per interval; the 2m value is
// returned. Throws std::runtime_error when the determinant is not positive or the two
// orders disagree by more than 1e-6.
GapResult gap_probability(const KernelMatrixFn& kernel, const IntervalUnion& E, int m = 40);

// Gap probability of the Airy kernel on (s, inf), cut where the kernel diagonal drops
// below 1e-16 and at least at s + 10.
GapResult airy_gap(double s, int m = 40);

KernelMatrixFn pearcey_kernel_fn(double t, const QuadratureSpec& spec = {});
KernelMatrixFn airy_kernel_fn();
TimeKernelMatrixFn pearcey_time_kernel_fn(const QuadratureSpec& spec = {});

// Block determinant for times[0] <= times[1] <= ...; block (i, j) is K_{t_i, t_j} between
// E_i and E_j. Equal times with i < j are the limit s -> t from below, so the heat term
// becomes the identity; those sets must coincide.
GapResult multitime_gap(const TimeKernelMatrixFn& kernel, const std::vector<double>& times,
                        const std::vector<IntervalUnion>& sets, int m = 40);

struct ResolventData {
  NystromGrid grid;
  std::vector<double> p_hat, q_hat;          // on the grid
  std::vector<double> p_hat_end, q_hat_end;  // at the endpoints of E
  double u = 0.0;                            // <p_hat, q chi_E>
  Eigen::MatrixXd R;                         // resolvent kernel on the grid
  double log_det = 0.0;
  double condition = 0.0;                    // 1-norm condition estimate of I - K W
  // max |(I - K W)(I + R W) - I|
  double identity_residual() const;
  Eigen::MatrixXd kernel;  // K on the grid
};

// p_hat = (I - K_E)^{-1} p, q_hat = (I - K_E^T)^{-1} q and u for the equal-time Pearcey kernel.
ResolventData resolvent_quantities(double t, const IntervalUnion& E, int m = 40, const QuadratureSpec& spec = {});

// sum_k (-1)^k p_hat(a_k) q_hat(a_k) with a_1 the leftmost endpoint.
double endpoint_sum(const ResolventData& data);

}  // namespace cusplab
