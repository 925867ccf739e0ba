#include "cusplab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace cusplab {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

RealRule composite_rule(double a, double b, int panels, int nodes_per_panel) {
  if (panels < 1) throw std::invalid_argument("composite_rule: panels must be positive");
  const GaussRule& g = gauss_legendre(nodes_per_panel);
  RealRule out;
  out.x.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
  out.w.reserve(out.x.capacity());
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    for (int k = 0; k < nodes_per_panel; ++k) {
      out.x.push_back(lo + 0.5 * h * (g.nodes[k] + 1.0));
      out.w.push_back(0.5 * h * g.weights[k]);
    }
  }
  return out;
}

void ComplexRule::append(const ComplexRule& other) {
  z.insert(z.end(), other.z.begin(), other.z.end());
  w.insert(w.end(), other.w.begin(), other.w.end());
}

ComplexRule segment_rule(std::complex<double> z0, std::complex<double> z1,
                         int panels, int nodes_per_panel) {
  RealRule r = composite_rule(0.0, 1.0, panels, nodes_per_panel);
  ComplexRule out;
  std::complex<double> dz = z1 - z0;
  out.z.reserve(r.x.size());
  out.w.reserve(r.x.size());
  for (std::size_t k = 0; k < r.x.size(); ++k) {
    out.z.push_back(z0 + r.x[k] * dz);
    out.w.push_back(r.w[k] * dz);
  }
  return out;
}

}  // namespace cusplab
