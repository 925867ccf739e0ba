#include "cusplab/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cusplab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
using cplx = std::complex<double>;

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

std::vector<cplx> companion_roots(const Poly& p) {
  int d = p.degree();
  std::vector<cplx> out;
  if (d < 1) return out;
  double lead = p[d];
  if (d == 1) {
    out.push_back(-p[0] / lead);
    return out;
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) c(i, d - 1) = -p[i] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("polynomial roots: eigen solver failed");
  for (int i = 0; i < d; ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

cplx newton_polish(const Poly& p, const Poly& dp, cplx z) {
  double best = std::abs(p(z));
  for (int iter = 0; iter < 60 && best > 0.0; ++iter) {
    cplx d = dp(z);
    if (d == cplx(0.0)) break;
    cplx step = p(z) / d;
    cplx trial = z - step;
    double r = std::abs(p(trial));
    if (!(r < best)) break;
    z = trial;
    best = r;
    if (std::abs(step) <= 4 * kEps * std::abs(z)) break;
  }
  return z;
}

double newton_real(const Poly& p, double x, double radius) {
  Poly dp = p.derivative();
  double x0 = x;
  for (int iter = 0; iter < 80; ++iter) {
    double d = dp(x);
    if (d == 0.0) break;
    double step = p(x) / d;
    x -= step;
    if (std::abs(x - x0) > radius) return x0;
    if (std::abs(step) <= 2 * kEps * (1.0 + std::abs(x))) break;
  }
  return x;
}

// Coefficients may carry cancellation from their own construction, so the
// rounding floor is taken relative to the largest coefficient.
Poly noise_poly(const Poly& p) {
  double big = 0.0;
  for (double v : p.coeffs()) big = std::max(big, std::abs(v));
  return Poly(std::vector<double>(p.coeffs().size(), big));
}

}  // namespace

Poly::Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

void Poly::trim() {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  if (c_.empty()) c_.push_back(0.0);
}

double Poly::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

cplx Poly::operator()(cplx z) const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Poly Poly::derivative(int order) const {
  std::vector<double> c(c_);
  for (int o = 0; o < order; ++o) {
    if (c.size() <= 1) return Poly({0.0});
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    c = std::move(d);
  }
  return Poly(c);
}

Poly Poly::shifted(double x0) const {
  int d = degree();
  std::vector<double> out(d + 1, 0.0);
  for (int j = 0; j <= d; ++j) {
    double s = 0.0;
    for (int i = d; i >= j; --i) s = s * x0 + c_[i] * binomial(i, j);
    out[j] = s;
  }
  return Poly(out);
}

double Poly::magnitude(double x) const {
  double acc = 0.0, ax = std::abs(x);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * ax + std::abs(*it);
  return acc;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[static_cast<int>(i)] + b[static_cast<int>(i)];
  return Poly(c);
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Poly(c);
}

Poly operator*(double s, const Poly& a) {
  std::vector<double> c(a.c_);
  for (double& v : c) v *= s;
  return Poly(c);
}

std::vector<PolyRoot> solve_polynomial(const Poly& p) {
  int d = p.degree();
  std::vector<PolyRoot> out;
  if (d < 1) return out;
  Poly dp = p.derivative();
  std::vector<cplx> raw = companion_roots(p);
  for (cplx& z : raw) z = newton_polish(p, dp, z);

  // Group roots that sit within a loose radius of each other.
  std::vector<int> parent(raw.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      double scale = 1.0 + std::max(std::abs(raw[i]), std::abs(raw[j]));
      if (std::abs(raw[i] - raw[j]) < 1e-3 * scale) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
    }
  std::vector<std::vector<int>> clusters(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) clusters[find(static_cast<int>(i))].push_back(static_cast<int>(i));

  Poly ap = noise_poly(p);
  for (const auto& members : clusters) {
    if (members.empty()) continue;
    int m = static_cast<int>(members.size());
    cplx center = 0.0;
    double radius = 0.0;
    for (int i : members) center += raw[i];
    center /= static_cast<double>(m);
    for (int i : members) radius = std::max(radius, std::abs(raw[i] - center));

    if (m == 1) {
      cplx z = raw[members[0]];
      double slope = std::abs(dp(z));
      double noise = 8 * kEps * ap.magnitude(std::abs(z)) / std::max(slope, 1e-300);
      bool is_real = std::abs(z.imag()) <= noise + 4 * kEps * std::abs(z.real());
      if (is_real) z = {newton_real(p, z.real(), 1e-6 * (1.0 + std::abs(z))), 0.0};
      out.push_back({z, 1, is_real});
      continue;
    }
    double scale = 1.0 + std::abs(center);
    if (std::abs(center.imag()) > 1e-3 * scale) {
      for (int i : members) out.push_back({raw[i], 1, false});
      continue;
    }
    // Centre on the nearby simple root of the (m-1)th derivative and resolve the
    // cluster from the Taylor coefficients there, zeroing those below roundoff.
    double w = newton_real(p.derivative(m - 1), center.real(), 10 * radius + 1e-6 * scale);
    Poly s = p.shifted(w);
    Poly noise = ap.shifted(std::abs(w));
    std::vector<double> c(s.coeffs());
    int zeros = 0;
    while (zeros < m && std::abs(c[zeros]) <= 64 * kEps * noise[zeros]) ++zeros;
    if (zeros > 0) out.push_back({cplx(w, 0.0), zeros, true});
    if (zeros == m) continue;
    Poly reduced(std::vector<double>(c.begin() + zeros, c.end()));
    std::vector<cplx> local = companion_roots(reduced);
    std::sort(local.begin(), local.end(), [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
    for (int k = 0; k < m - zeros; ++k) {
      cplx h = local[k];
      bool is_real = std::abs(h.imag()) <= 1e-10 * std::abs(h) + 1e-14 * scale;
      if (is_real) {
        out.push_back({cplx(w + newton_real(reduced, h.real(), std::abs(h)), 0.0), 1, true});
      } else {
        out.push_back({cplx(w, 0.0) + newton_polish(reduced, reduced.derivative(), h), 1, false});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PolyRoot& x, const PolyRoot& y) {
    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
    return x.value.imag() < y.value.imag();
  });
  return out;
}

std::vector<double> real_roots(const Poly& p) {
  std::vector<double> out;
  for (const PolyRoot& r : solve_polynomial(p))
    if (r.real)
      for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value.real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cusplab
