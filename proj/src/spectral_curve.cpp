#include "cusplab/spectral_curve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cusplab {

namespace {

using cplx = std::complex<double>;

Poly product_except(const std::vector<double>& roots, std::size_t skip, int power) {
  Poly out = Poly::constant(1.0);
  for (std::size_t j = 0; j < roots.size(); ++j) {
    if (j == skip) continue;
    Poly f = Poly::linear(-roots[j], 1.0);
    for (int k = 0; k < power; ++k) out = out * f;
  }
  return out;
}

// Roots of a monic polynomial with complex coefficients (ascending order).
std::vector<cplx> complex_roots(const std::vector<cplx>& c) {
  int d = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) m(i, d - 1) = -c[i] / c[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + d);
  auto eval = [&](cplx z) {
    cplx p = 0.0, dp = 0.0;
    for (int k = d; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[k];
    }
    return std::pair{p, dp};
  };
  for (cplx& z : out) {
    for (int it = 0; it < 40; ++it) {
      auto [p, dp] = eval(z);
      if (dp == cplx(0.0)) break;
      cplx step = p / dp;
      z -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
  }
  return out;
}

void check_fraction(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("fraction p must lie in (0, 1)");
}

double slope_of_inverse(const std::vector<double>& bt, const std::vector<double>& eps, double g) {
  double s = 1.0;
  for (std::size_t i = 0; i < bt.size(); ++i) s -= eps[i] / ((g - bt[i]) * (g - bt[i]));
  return s;
}

}  // namespace

TargetConfig TargetConfig::two_target(double a, double b, double p, double t) {
  check_fraction(p);
  if (a == b) throw std::invalid_argument("two_target: targets must differ");
  TargetConfig c;
  if (a > b) {
    c.targets = {b, a};
    c.fractions = {1.0 - p, p};
  } else {
    c.targets = {a, b};
    c.fractions = {p, 1.0 - p};
  }
  c.time = t;
  return c;
}

void TargetConfig::validate() const {
  if (targets.empty() || targets.size() != fractions.size())
    throw std::invalid_argument("TargetConfig: targets and fractions must be non-empty and of equal length");
  for (std::size_t i = 1; i < targets.size(); ++i)
    if (!(targets[i] > targets[i - 1]))
      throw std::invalid_argument("TargetConfig: targets must be strictly increasing");
  double sum = 0.0;
  for (double e : fractions) {
    if (!(e > 0.0)) throw std::invalid_argument("TargetConfig: fractions must be positive");
    sum += e;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("TargetConfig: fractions must sum to 1");
  if (!(time > 0.0 && time < 1.0)) throw std::invalid_argument("TargetConfig: time must lie in (0, 1)");
}

std::vector<double> TargetConfig::matrix_targets() const {
  double s = std::sqrt(2.0 * time / (1.0 - time));
  std::vector<double> out(targets);
  for (double& v : out) v *= s;
  return out;
}

double TargetConfig::brownian_scale() const { return std::sqrt(time * (1.0 - time) / 2.0); }

Poly stieltjes_polynomial(const TargetConfig& config, double z) {
  std::vector<double> bt = config.matrix_targets();
  Poly p = Poly::linear(-z, 1.0) * product_except(bt, bt.size(), 1);
  for (std::size_t i = 0; i < bt.size(); ++i) p = p + config.fractions[i] * product_except(bt, i, 1);
  return p;
}

DensitySample solve_stieltjes(const TargetConfig& config, cplx z) {
  config.validate();
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("solve_stieltjes: z must be finite");
  DensitySample out;
  out.z = z;
  if (z.imag() < 0.0) {
    DensitySample up = solve_stieltjes(config, std::conj(z));
    out.g = std::conj(up.g);
    out.density = up.density;
    return out;
  }
  std::vector<double> bt = config.matrix_targets();
  if (z.imag() > 0.0) {
    Poly base = product_except(bt, bt.size(), 1);
    std::vector<cplx> c(base.degree() + 2, 0.0);
    for (int k = 0; k <= base.degree(); ++k) {
      c[k + 1] += base[k];
      c[k] -= z * base[k];
    }
    for (std::size_t i = 0; i < bt.size(); ++i) {
      Poly term = config.fractions[i] * product_except(bt, i, 1);
      for (int k = 0; k <= term.degree(); ++k) c[k] += term[k];
    }
    std::vector<cplx> roots = complex_roots(c);
    out.g = *std::max_element(roots.begin(), roots.end(),
                              [](cplx x, cplx y) { return x.imag() < y.imag(); });
    out.density = std::abs(out.g.imag()) / M_PI;
    return out;
  }
  std::vector<PolyRoot> roots = solve_polynomial(stieltjes_polynomial(config, z.real()));
  const PolyRoot* best = nullptr;
  for (const PolyRoot& r : roots)
    if (!r.real && (!best || std::abs(r.value.imag()) > std::abs(best->value.imag()))) best = &r;
  if (best) {
    out.g = {best->value.real(), std::abs(best->value.imag())};
    out.density = out.g.imag() / M_PI;
    return out;
  }
  double best_slope = -std::numeric_limits<double>::infinity();
  for (const PolyRoot& r : roots) {
    double s = slope_of_inverse(bt, config.fractions, r.value.real());
    if (s > best_slope) {
      best_slope = s;
      out.g = {r.value.real(), 0.0};
    }
  }
  out.density = 0.0;
  return out;
}

std::vector<DensitySample> density_sweep(const TargetConfig& config, const std::vector<double>& zs) {
  std::vector<DensitySample> out;
  out.reserve(zs.size());
  for (double z : zs) out.push_back(solve_stieltjes(config, {z, 0.0}));
  return out;
}

Poly two_target_discriminant(double alpha, double beta, double p) {
  check_fraction(p);
  Poly a = Poly::constant(1.0);
  Poly b = Poly::linear(-(alpha + beta), -1.0);
  Poly c = Poly::linear(alpha * beta + 1.0, alpha + beta);
  Poly d = Poly::linear(-((1.0 - p) * alpha + p * beta), -alpha * beta);
  return 18.0 * (a * b * c * d) - 4.0 * (b * b * b * d) + b * b * c * c - 4.0 * (a * c * c * c) -
         27.0 * (a * a * d * d);
}

namespace {

SupportSet intervals_from_endpoints(std::vector<double> endpoints, const std::function<bool(double)>& inside) {
  SupportSet s;
  std::sort(endpoints.begin(), endpoints.end());
  s.endpoints = endpoints;
  std::vector<double> distinct;
  for (double e : endpoints)
    if (distinct.empty() || e != distinct.back()) distinct.push_back(e);
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    double mid = 0.5 * (distinct[i] + distinct[i + 1]);
    if (inside(mid)) s.intervals.emplace_back(distinct[i], distinct[i + 1]);
  }
  return s;
}

}  // namespace

SupportSet support_endpoints(double alpha, double beta, double p) {
  if (alpha == beta) throw std::invalid_argument("support_endpoints: targets must differ");
  Poly disc = two_target_discriminant(alpha, beta, p);
  return intervals_from_endpoints(real_roots(disc), [&](double z) { return disc(z) < 0.0; });
}

SupportSet support_set(const TargetConfig& config) {
  config.validate();
  std::vector<double> bt = config.matrix_targets();
  Poly crit = product_except(bt, bt.size(), 2);
  for (std::size_t i = 0; i < bt.size(); ++i) crit = crit - config.fractions[i] * product_except(bt, i, 2);
  std::vector<double> ends;
  for (double g : real_roots(crit)) {
    double x = g;
    for (std::size_t i = 0; i < bt.size(); ++i) x += config.fractions[i] / (g - bt[i]);
    ends.push_back(x);
  }
  return intervals_from_endpoints(ends, [&](double z) { return solve_stieltjes(config, {z, 0.0}).density > 0.0; });
}

double total_mass(const TargetConfig& config) {
  SupportSet s = support_set(config);
  boost::math::quadrature::tanh_sinh<double> integrator;
  double mass = 0.0;
  for (auto [lo, hi] : s.intervals) {
    auto f = [&](double z) { return solve_stieltjes(config, {z, 0.0}).density; };
    mass += integrator.integrate(f, lo, hi, 1e-11);
  }
  return mass;
}

CriticalData find_cusp(double a, double b, double p) {
  check_fraction(p);
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("find_cusp: targets must be finite");
  if (!(a > b)) throw std::invalid_argument("find_cusp: the upper target a must exceed b");
  CriticalData c;
  c.a = a;
  c.b = b;
  c.p = p;
  c.q = std::cbrt((1.0 - p) / p);
  const double q = c.q;
  c.r = std::sqrt(q * q - q + 1.0);
  const double r = c.r, d = a - b;
  double ratio = r * d / (q + 1.0);
  c.t0 = 1.0 / (1.0 + 2.0 * ratio * ratio);
  c.c0 = c.t0 * ratio;
  c.alpha = a / ratio;
  c.beta = b / ratio;
  c.z0 = c.beta + (2.0 * q - 1.0) / r;
  c.u0 = c.beta + q / r;
  c.x0 = c.z0 * c.c0;
  c.mu = std::pow(r * r / q, 0.25);
  c.A = (std::sqrt(q) * (a - c.x0) + (b - c.x0) / std::sqrt(q)) / d;
  return c;
}

std::vector<cplx> branch_points(const std::vector<double>& targets, const std::vector<double>& fractions,
                                double T) {
  if (!(T > 0.0)) throw std::invalid_argument("branch_points: T must be positive");
  TargetConfig probe{targets, fractions, 0.5};
  probe.validate();
  Poly poly = T * product_except(targets, targets.size(), 2);
  for (std::size_t i = 0; i < targets.size(); ++i) poly = poly - fractions[i] * product_except(targets, i, 2);
  std::vector<cplx> out;
  for (const PolyRoot& r : solve_polynomial(poly))
    for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
  return out;
}

namespace {

std::vector<double> real_branch_points(const std::vector<double>& targets, const std::vector<double>& fractions,
                                       double T) {
  std::vector<double> out;
  for (cplx z : branch_points(targets, fractions, T))
    if (z.imag() == 0.0) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

double merge_location(const std::vector<double>& targets, const std::vector<double>& fractions, double w) {
  // The double root minimises sum eps_i / (w - a_i)^2 between its neighbouring targets.
  for (int it = 0; it < 100; ++it) {
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      double s = w - targets[i];
      d1 += -2.0 * fractions[i] / (s * s * s);
      d2 += 6.0 * fractions[i] / (s * s * s * s);
    }
    double step = d1 / d2;
    w -= step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

void emit_merges(const std::vector<double>& targets, const std::vector<double>& fractions, double lo, double hi,
                 std::size_t count, std::vector<MergeEvent>& events) {
  std::vector<double> above = real_branch_points(targets, fractions, hi);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i + 1 < above.size(); ++i) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return above[i + 1] - above[i] < above[j + 1] - above[j];
  });
  std::vector<bool> used(above.size(), false);
  std::size_t emitted = 0;
  for (std::size_t i : order) {
    if (emitted == count) break;
    if (used[i] || used[i + 1]) continue;
    used[i] = used[i + 1] = true;
    double w = merge_location(targets, fractions, 0.5 * (above[i] + above[i + 1]));
    events.push_back({0.5 * (lo + hi), w, {static_cast<int>(i), static_cast<int>(i + 1)}});
    ++emitted;
  }
}

void locate_merges(const std::vector<double>& targets, const std::vector<double>& fractions, double lo, double hi,
                   std::vector<MergeEvent>& events) {
  std::size_t n_lo = real_branch_points(targets, fractions, lo).size();
  std::size_t n_hi = real_branch_points(targets, fractions, hi).size();
  if (n_lo == n_hi) return;
  if (hi - lo <= 4e-16 * hi) {
    // Merges that coincide to machine precision, as in symmetric configurations.
    std::size_t diff = n_hi > n_lo ? n_hi - n_lo : n_lo - n_hi;
    emit_merges(targets, fractions, lo, hi, diff / 2, events);
    return;
  }
  double mid = 0.5 * (lo + hi);
  if (n_hi == n_lo + 2) {
    std::size_t n_mid = real_branch_points(targets, fractions, mid).size();
    if (n_mid == n_hi) return locate_merges(targets, fractions, lo, mid, events);
    if (n_mid == n_lo) return locate_merges(targets, fractions, mid, hi, events);
  }
  // Ambiguous pairing across the step: halve it and retry on both halves.
  locate_merges(targets, fractions, lo, mid, events);
  locate_merges(targets, fractions, mid, hi, events);
}

}  // namespace

std::vector<MergeEvent> track_merges(const std::vector<double>& targets, const std::vector<double>& fractions,
                                     double T_min, double T_max, int steps) {
  if (!(T_min > 0.0 && T_max > T_min) || steps < 1)
    throw std::invalid_argument("track_merges: need 0 < T_min < T_max and steps >= 1");
  std::vector<MergeEvent> events;
  double h = (T_max - T_min) / steps;
  for (int j = 0; j < steps; ++j)
    locate_merges(targets, fractions, T_min + j * h, T_min + (j + 1) * h, events);
  std::sort(events.begin(), events.end(), [](const MergeEvent& x, const MergeEvent& y) { return x.T < y.T; });
  return events;
}

}  // namespace cusplab
