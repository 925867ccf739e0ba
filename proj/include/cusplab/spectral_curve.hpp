#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "cusplab/polynomial.hpp"

namespace cusplab {

// Brownian endpoints b_1 < ... < b_k reached by fractions eps_i of the paths,
// observed at time t in (0, 1).
struct TargetConfig {
  std::vector<double> targets;
  std::vector<double> fractions;
  double time = 0.5;

  // Two endpoints: fraction p of the paths go to a, the rest to b.
  static TargetConfig two_target(double a, double b, double p, double t);

  void validate() const;
  // Targets in the matrix variable, b_i * sqrt(2t / (1 - t)).
  std::vector<double> matrix_targets() const;
  // Brownian position of matrix variable z: z * sqrt(t (1 - t) / 2).
  double brownian_scale() const;
};

struct DensitySample {
  std::complex<double> z;
  std::complex<double> g;
  double density = 0.0;
};

struct SupportSet {
  std::vector<double> endpoints;  // sorted, repeated at double roots
  std::vector<std::pair<double, double>> intervals;
};

// Closed-form cusp constants for two targets a > b with fraction p at a.
struct CriticalData {
  double a = 0, b = 0, p = 0;
  double q = 0, r = 0;
  double t0 = 0, x0 = 0, c0 = 0, mu = 0, A = 0;
  double alpha = 0, beta = 0;  // matrix-variable targets at t0
  double z0 = 0;               // cusp location in the matrix variable
  double u0 = 0;               // triple root of the cubic at z0
};

struct MergeEvent {
  double T = 0;                  // rescaled time 2t / (1 - t)
  double z = 0;                  // location of the double root
  std::pair<int, int> indices;   // positions among the sorted real roots just above T
};

// Polynomial in g whose roots solve g - z + sum eps_i / (g - btilde_i) = 0, for real z.
Poly stieltjes_polynomial(const TargetConfig& config, double z);

DensitySample solve_stieltjes(const TargetConfig& config, std::complex<double> z);
std::vector<DensitySample> density_sweep(const TargetConfig& config, const std::vector<double>& zs);

// Discriminant (in g) of the two-target cubic, as a quartic in z.
Poly two_target_discriminant(double alpha, double beta, double p);
SupportSet support_endpoints(double alpha, double beta, double p);
// Support of the limiting density for any number of targets.
SupportSet support_set(const TargetConfig& config);
// Integral of the density over its support.
double total_mass(const TargetConfig& config);

CriticalData find_cusp(double a, double b, double p);

// Roots w of T = sum eps_i / (w - a_i)^2, sorted by real part.
std::vector<std::complex<double>> branch_points(const std::vector<double>& targets,
                                                const std::vector<double>& fractions, double T);
std::vector<MergeEvent> track_merges(const std::vector<double>& targets,
                                     const std::vector<double>& fractions, double T_min,
                                     double T_max, int steps);

inline double rescaled_time(double t) { return 2.0 * t / (1.0 - t); }
inline double time_from_rescaled(double T) { return T / (2.0 + T); }

}  // namespace cusplab
