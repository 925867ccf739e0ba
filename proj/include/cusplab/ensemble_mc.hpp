#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "cusplab/spectral_curve.hpp"

namespace cusplab {

// Generator for the substream keyed by (seed, a, b); independent of the order in which
// substreams are created.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Number of eigenvalues at each target for n particles: round(eps_i n) for every target
// but the first, which takes the remainder.
std::vector<int> target_counts(const TargetConfig& config, int n);

struct SpectrumSample {
  int n = 0;
  std::vector<double> eigenvalues;  // ascending, matrix variable
  std::uint64_t seed = 0, index = 0;
  TargetConfig config;
};

// Eigenvalues of A_t + H, A_t = diag of config.matrix_targets() with target_counts
// multiplicities and H Hermitian Gaussian with density proportional to exp(-(n/2) Tr H^2):
// diagonal entries of variance 1/n, off-diagonal real and imaginary parts of variance 1/(2n).
SpectrumSample sample_spectrum(int n, const TargetConfig& config, std::uint64_t seed, std::uint64_t index = 0);
// Samples with indices 0..count-1, generated in parallel.
std::vector<SpectrumSample> sample_spectra(int n, const TargetConfig& config, std::uint64_t seed, int count);

// Limiting density in the matrix variable, from the spectral curve.
std::function<double(double)> limiting_density(const TargetConfig& config);

// Two-sided Kolmogorov-Smirnov distance between the pooled eigenvalues and the CDF of
// `density` integrated over [lo, hi]. Requires at least 50 samples.
double density_compare(const std::vector<SpectrumSample>& samples, const std::function<double(double)>& density,
                       double lo, double hi, int panels = 4000);
// Same with the limiting density of the samples' configuration, integrated over its support.
double density_compare(const std::vector<SpectrumSample>& samples);

double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct PathBundle {
  int n = 0;
  std::vector<double> times;               // k / steps for k = 1..steps-1
  std::vector<std::vector<double>> paths;  // paths[i][k]: i-th lowest particle at times[k]
  std::uint64_t seed = 0;
  TargetConfig config;

  // Positions at times[k] divided by sqrt(n t (1 - t) / 2), i.e. in the matrix variable.
  std::vector<double> matrix_positions(std::size_t k) const;
};

// n non-intersecting Brownian motions (transition density exp(-(x-y)^2/t)/sqrt(pi t)) from the
// origin, target_counts(config, n)[i] of them ending at config.targets[i] sqrt(n) at time 1.
// Built as eigenvalues of t B + W(t) - t W(1), W a Hermitian Brownian motion and B the diagonal
// target matrix; each matrix entry has its own substream. config.time is ignored.
PathBundle sample_bridge_paths(int n, const TargetConfig& config, int steps, std::uint64_t seed);

// Fraction of paths whose position at the last stored time is closest to the top target.
double upper_endpoint_fraction(const PathBundle& bundle);

struct CuspRow {
  double t = 0;
  double lower = 0, upper = 0;  // edges of the gap between the two groups, Brownian units / sqrt(n)
};

struct CuspFit {
  double t0 = 0, x0 = 0;
  std::vector<CuspRow> rows;
  double exponent = 0;  // slope of log(upper - lower) against log(t - t0)
};

// Two targets a > b = 0 with fraction p at a. At each time t0 + offsets[k] the gap between
// the top particle of the lower group and the bottom particle of the upper group is sampled
// `samples` times; the edges are the 97.5% quantile of the former and the 2.5% quantile of the
// latter.
CuspFit cusp_exponent_fit(double a, double p, int n, int samples, const std::vector<double>& offsets,
                          std::uint64_t seed);

}  // namespace cusplab
