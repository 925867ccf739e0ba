#include "cusplab/ensemble_mc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cusplab/parallel.hpp"
#include "cusplab/quadrature.hpp"

namespace cusplab {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(a), hi(a), lo(b), hi(b)};
  return std::mt19937_64(seq);
}

std::vector<int> target_counts(const TargetConfig& config, int n) {
  config.validate();
  if (n < 1) throw std::invalid_argument("target_counts: n must be positive");
  std::vector<int> counts(config.targets.size(), 0);
  int rest = n;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    counts[i] = static_cast<int>(std::lround(config.fractions[i] * n));
    rest -= counts[i];
  }
  if (rest < 0) throw std::invalid_argument("target_counts: rounded counts exceed n");
  counts[0] = rest;
  return counts;
}

namespace {

std::vector<double> diagonal_targets(const std::vector<double>& values, const std::vector<int>& counts) {
  std::vector<double> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.insert(out.end(), counts[i], values[i]);
  return out;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(M, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

SpectrumSample sample_spectrum(int n, const TargetConfig& config, std::uint64_t seed, std::uint64_t index) {
  if (n < 2) throw std::invalid_argument("sample_spectrum: n must be at least 2");
  std::vector<double> diag = diagonal_targets(config.matrix_targets(), target_counts(config, n));
  std::mt19937_64 gen = substream(seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd_diag = 1.0 / std::sqrt(static_cast<double>(n));
  const double sd_off = 1.0 / std::sqrt(2.0 * n);
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, i) = diag[i] + sd_diag * normal(gen);
    for (int j = i + 1; j < n; ++j) {
      double re = sd_off * normal(gen);
      double im = sd_off * normal(gen);
      M(i, j) = {re, im};
      M(j, i) = {re, -im};
    }
  }
  SpectrumSample s;
  s.n = n;
  s.seed = seed;
  s.index = index;
  s.config = config;
  s.eigenvalues = hermitian_eigenvalues(M);
  return s;
}

std::vector<SpectrumSample> sample_spectra(int n, const TargetConfig& config, std::uint64_t seed, int count) {
  if (count < 0) throw std::invalid_argument("sample_spectra: negative count");
  std::vector<SpectrumSample> out(count);
  parallel_for(out.size(), [&](std::size_t k) { out[k] = sample_spectrum(n, config, seed, k); });
  return out;
}

std::function<double(double)> limiting_density(const TargetConfig& config) {
  config.validate();
  return [config](double z) { return solve_stieltjes(config, z).density; };
}

namespace {

// Piecewise-linear CDF through the panel boundaries of a composite rule.
struct TabulatedCdf {
  std::vector<double> x, F;

  void add_interval(const std::function<double(double)>& density, double lo, double hi, int panels) {
    const int nodes = 8;
    RealRule rule = composite_rule(lo, hi, panels, nodes);
    double acc = F.empty() ? 0.0 : F.back();
    x.push_back(lo);
    F.push_back(acc);
    const double width = (hi - lo) / panels;
    for (int k = 0; k < panels; ++k) {
      for (int j = 0; j < nodes; ++j) acc += rule.w[k * nodes + j] * density(rule.x[k * nodes + j]);
      x.push_back(lo + (k + 1) * width);
      F.push_back(acc);
    }
  }

  double operator()(double v) const {
    if (v <= x.front()) return 0.0;
    if (v >= x.back()) return F.back();
    auto it = std::upper_bound(x.begin(), x.end(), v);
    std::size_t k = static_cast<std::size_t>(it - x.begin());
    double s = (v - x[k - 1]) / (x[k] - x[k - 1]);
    return F[k - 1] + s * (F[k] - F[k - 1]);
  }
};

double ks_against(const std::vector<SpectrumSample>& samples, const TabulatedCdf& cdf) {
  if (samples.size() < 50) throw std::invalid_argument("density_compare: need at least 50 samples");
  std::vector<double> pooled;
  for (const auto& s : samples) pooled.insert(pooled.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  std::sort(pooled.begin(), pooled.end());
  const double m = static_cast<double>(pooled.size());
  double d = 0.0;
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    double F = cdf(pooled[k]);
    d = std::max({d, std::abs((k + 1) / m - F), std::abs(k / m - F)});
  }
  return d;
}

}  // namespace

double density_compare(const std::vector<SpectrumSample>& samples, const std::function<double(double)>& density,
                       double lo, double hi, int panels) {
  if (!(hi > lo) || panels < 1) throw std::invalid_argument("density_compare: bad integration range");
  TabulatedCdf cdf;
  cdf.add_interval(density, lo, hi, panels);
  return ks_against(samples, cdf);
}

double density_compare(const std::vector<SpectrumSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("density_compare: no samples");
  const TargetConfig& config = samples.front().config;
  SupportSet support = support_set(config);
  auto density = limiting_density(config);
  TabulatedCdf cdf;
  double total = 0.0;
  for (auto [lo, hi] : support.intervals) total += hi - lo;
  for (auto [lo, hi] : support.intervals)
    cdf.add_interval(density, lo, hi, std::max(50, static_cast<int>(4000 * (hi - lo) / total)));
  return ks_against(samples, cdf);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

std::vector<double> PathBundle::matrix_positions(std::size_t k) const {
  const double t = times.at(k);
  const double scale = std::sqrt(n * t * (1.0 - t) / 2.0);
  std::vector<double> out;
  for (const auto& path : paths) out.push_back(path[k] / scale);
  return out;
}

PathBundle sample_bridge_paths(int n, const TargetConfig& config, int steps, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_bridge_paths: n must be positive");
  if (steps < 10) throw std::invalid_argument("sample_bridge_paths: steps must be at least 10");
  const std::vector<double> ends = diagonal_targets(config.targets, target_counts(config, n));
  const double rn = std::sqrt(static_cast<double>(n));
  const double dt = 1.0 / steps;

  // Standard Brownian bridges (variance t(1-t)) for the n real diagonal entries and the
  // n(n-1) real and imaginary parts above the diagonal, one substream each.
  const std::size_t entries = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  std::vector<double> bridges(entries * (steps - 1));
  parallel_for(entries, [&](std::size_t e) {
    std::mt19937_64 gen = substream(seed, e);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    std::vector<double> w(steps + 1, 0.0);
    for (int k = 1; k <= steps; ++k) w[k] = w[k - 1] + normal(gen);
    for (int k = 1; k < steps; ++k) bridges[e * (steps - 1) + (k - 1)] = w[k] - k * dt * w[steps];
  });

  PathBundle bundle;
  bundle.n = n;
  bundle.seed = seed;
  bundle.config = config;
  for (int k = 1; k < steps; ++k) bundle.times.push_back(k * dt);
  bundle.paths.assign(n, std::vector<double>(steps - 1));
  // Entry (i, j), i < j, uses bridge index i n + j for the real part and j n + i for the imaginary part.
  const double sd_diag = std::sqrt(0.5), sd_off = 0.5;
  parallel_for(static_cast<std::size_t>(steps - 1), [&](std::size_t k) {
    const double t = bundle.times[k];
    auto bridge = [&](std::size_t e) { return bridges[e * (steps - 1) + k]; };
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i) {
      M(i, i) = t * ends[i] * rn + sd_diag * bridge(static_cast<std::size_t>(i) * n + i);
      for (int j = i + 1; j < n; ++j) {
        double re = sd_off * bridge(static_cast<std::size_t>(i) * n + j);
        double im = sd_off * bridge(static_cast<std::size_t>(j) * n + i);
        M(i, j) = {re, im};
        M(j, i) = {re, -im};
      }
    }
    std::vector<double> ev = hermitian_eigenvalues(M);
    for (int i = 0; i < n; ++i) {
      if (i > 0 && !(ev[i] > ev[i - 1]))
        throw std::runtime_error("sample_bridge_paths: paths not strictly ordered at t=" + std::to_string(t));
      bundle.paths[i][k] = ev[i];
    }
  });
  return bundle;
}

double upper_endpoint_fraction(const PathBundle& bundle) {
  if (bundle.paths.empty() || bundle.times.empty()) throw std::invalid_argument("upper_endpoint_fraction: empty bundle");
  const std::size_t last = bundle.times.size() - 1;
  const double rn = std::sqrt(static_cast<double>(bundle.n));
  const auto& targets = bundle.config.targets;
  int upper = 0;
  for (const auto& path : bundle.paths) {
    double x = path[last] / rn;
    std::size_t best = 0;
    for (std::size_t i = 1; i < targets.size(); ++i)
      if (std::abs(x - targets[i]) < std::abs(x - targets[best])) best = i;
    if (best + 1 == targets.size()) ++upper;
  }
  return static_cast<double>(upper) / bundle.paths.size();
}

namespace {

double quantile(std::vector<double> v, double level) {
  std::sort(v.begin(), v.end());
  double pos = level * (v.size() - 1);
  std::size_t k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= v.size()) return v.back();
  return v[k] + (pos - k) * (v[k + 1] - v[k]);
}

}  // namespace

CuspFit cusp_exponent_fit(double a, double p, int n, int samples, const std::vector<double>& offsets,
                          std::uint64_t seed) {
  if (offsets.size() < 2) throw std::invalid_argument("cusp_exponent_fit: need at least two times");
  CriticalData crit = find_cusp(a, 0.0, p);
  CuspFit fit;
  fit.t0 = crit.t0;
  fit.x0 = crit.x0;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    if (!(offsets[k] > 0.0) || !(crit.t0 + offsets[k] < 1.0))
      throw std::invalid_argument("cusp_exponent_fit: offsets must lie in (0, 1 - t0)");
    const double t = crit.t0 + offsets[k];
    TargetConfig config = TargetConfig::two_target(a, 0.0, p, t);
    const int lower_count = target_counts(config, n)[0];
    if (lower_count < 1 || lower_count >= n) throw std::invalid_argument("cusp_exponent_fit: both groups must be occupied");
    std::vector<SpectrumSample> draws = sample_spectra(n, config, seed + k, samples);
    std::vector<double> top_of_lower, bottom_of_upper;
    const double scale = config.brownian_scale();
    for (const auto& s : draws) {
      top_of_lower.push_back(s.eigenvalues[lower_count - 1] * scale);
      bottom_of_upper.push_back(s.eigenvalues[lower_count] * scale);
    }
    CuspRow row{t, quantile(top_of_lower, 0.975), quantile(bottom_of_upper, 0.025)};
    fit.rows.push_back(row);
    if (!(row.upper > row.lower))
      throw std::runtime_error("cusp_exponent_fit: no gap between the groups at t = " + std::to_string(t) +
                               "; increase n or the offset");
    lx.push_back(std::log(offsets[k]));
    ly.push_back(std::log(row.upper - row.lower));
  }
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

}  // namespace cusplab
