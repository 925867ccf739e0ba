#include "cusplab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cusplab {

namespace {

using cplx = std::complex<double>;
const cplx I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

int panels_for(double length, double unit, const QuadratureSpec& spec) {
  return std::max(spec.panels, static_cast<int>(std::ceil(length / unit)));
}

ComplexRule polyline_rule(const std::vector<cplx>& nodes, double unit, const QuadratureSpec& spec) {
  ComplexRule out;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    double len = std::abs(nodes[k + 1] - nodes[k]);
    out.append(segment_rule(nodes[k], nodes[k + 1], panels_for(len, unit, spec), spec.nodes_per_panel));
  }
  return out;
}

// Sum_{a,b} exp(fv(V_a, x_i)) wV_a exp(fu(U_b, y_j)) wU_b / (U_b - V_a), returned
// as a complex matrix scaled by exp(-row_shift_i - col_shift_j).
template <class FV, class FU>
Eigen::MatrixXcd separable_sum(const ComplexRule& v, const ComplexRule& u, const Eigen::MatrixXcd& cauchy,
                               const std::vector<double>& xs, const std::vector<double>& ys, FV fv, FU fu,
                               std::vector<double>& row_shift, std::vector<double>& col_shift) {
  const Eigen::Index nv = static_cast<Eigen::Index>(v.size()), nu = static_cast<Eigen::Index>(u.size());
  const Eigen::Index nx = static_cast<Eigen::Index>(xs.size()), ny = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXcd A(nx, nv), B(nu, ny);
  row_shift.assign(xs.size(), 0.0);
  col_shift.assign(ys.size(), 0.0);
  std::vector<cplx> e(std::max(nv, nu));
  for (Eigen::Index i = 0; i < nx; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < nv; ++a) {
      e[a] = fv(v.z[a], xs[i]);
      m = std::max(m, e[a].real());
    }
    row_shift[i] = m;
    for (Eigen::Index a = 0; a < nv; ++a) A(i, a) = v.w[a] * std::exp(e[a] - m);
  }
  for (Eigen::Index j = 0; j < ny; ++j) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index b = 0; b < nu; ++b) {
      e[b] = fu(u.z[b], ys[j]);
      m = std::max(m, e[b].real());
    }
    col_shift[j] = m;
    for (Eigen::Index b = 0; b < nu; ++b) B(b, j) = u.w[b] * std::exp(e[b] - m);
  }
  if (nx * nv * nu + nx * nu * ny <= nv * nu * ny + nx * nv * ny) {
    Eigen::MatrixXcd AC = A * cauchy;
    return AC * B;
  }
  Eigen::MatrixXcd CB = cauchy * B;
  return A * CB;
}

Eigen::MatrixXcd cauchy_matrix(const ComplexRule& v, const ComplexRule& u) {
  Eigen::MatrixXcd c(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(u.size()));
  for (Eigen::Index a = 0; a < c.rows(); ++a)
    for (Eigen::Index b = 0; b < c.cols(); ++b) c(a, b) = 1.0 / (u.z[b] - v.z[a]);
  return c;
}

// Radius beyond which exp(r^4/4 - |t| r^2/2 - x_bound r) decays by e^-60 against e^0.
double pearcey_radius(double L, double t, double x_bound) {
  double r = L;
  while (r * r * r * r / 4.0 - std::abs(t) * r * r / 2.0 - x_bound * r < 60.0) r += 0.25;
  return r;
}

}  // namespace

PearceyFunctions::PearceyFunctions(double t, const QuadratureSpec& spec, double x_bound) : t_(t) {
  spec.validate();
  if (!std::isfinite(t)) throw std::invalid_argument("PearceyFunctions: t must be finite");
  const double R = pearcey_radius(spec.truncation_radius, t, x_bound);
  const int panels = panels_for(R, spec.truncation_radius / spec.panels, spec);
  const cplx e1 = std::polar(1.0, kPi / 4), e2 = std::polar(1.0, -kPi / 4);
  // X: in from +inf e^{i pi/4} and from -inf e^{i pi/4}, out to +inf e^{-i pi/4} and -inf e^{-i pi/4}.
  v_rule_.append(segment_rule(R * e1, 0.0, panels, spec.nodes_per_panel));
  v_rule_.append(segment_rule(0.0, R * e2, panels, spec.nodes_per_panel));
  v_rule_.append(segment_rule(-R * e1, 0.0, panels, spec.nodes_per_panel));
  v_rule_.append(segment_rule(0.0, -R * e2, panels, spec.nodes_per_panel));
  u_rule_.append(segment_rule(-I * R, 0.0, panels, spec.nodes_per_panel));
  u_rule_.append(segment_rule(0.0, I * R, panels, spec.nodes_per_panel));
  for (cplx V : v_rule_.z) v_base_.push_back(V * V * V * V / 4.0 - t * V * V / 2.0);
  for (cplx U : u_rule_.z) u_base_.push_back(-U * U * U * U / 4.0 + t * U * U / 2.0);
}

PearceyPQ PearceyFunctions::operator()(double x) const {
  cplx p[4] = {}, q[4] = {};
  for (std::size_t k = 0; k < v_rule_.size(); ++k) {
    cplx V = v_rule_.z[k];
    cplx f = v_rule_.w[k] * std::exp(v_base_[k] + V * x);
    for (int j = 0; j < 4; ++j, f *= V) p[j] += f;
  }
  for (std::size_t k = 0; k < u_rule_.size(); ++k) {
    cplx U = u_rule_.z[k];
    cplx f = u_rule_.w[k] * std::exp(u_base_[k] - U * x);
    for (int j = 0; j < 4; ++j, f *= -U) q[j] += f;
  }
  PearceyPQ out;
  for (int j = 0; j < 4; ++j) {
    out.p[j] = (p[j] / (2.0 * kPi * I)).real();
    out.q[j] = (q[j] * I / (2.0 * kPi)).real();
  }
  return out;
}

PearceyPQ pearcey_pq(double t, double x, const QuadratureSpec& spec) {
  return PearceyFunctions(t, spec, std::max(20.0, std::abs(x)))(x);
}

double pearcey_kernel_from_pq(double t, double x, const PearceyPQ& px, double y, const PearceyPQ& py) {
  // N(x, y) / (y - x); on the diagonal this is -dN/dx.
  if (x == y) return -(px.p[1] * px.q[2] - px.p[2] * px.q[1] + px.p[3] * px.q[0] - t * px.p[1] * px.q[0]);
  double num = px.p[0] * py.q[2] - px.p[1] * py.q[1] + px.p[2] * py.q[0] - t * px.p[0] * py.q[0];
  return num / (y - x);
}

double pearcey_kernel_pq_form(double t, double x, double y, const QuadratureSpec& spec) {
  PearceyFunctions f(t, spec, std::max({20.0, std::abs(x), std::abs(y)}));
  return pearcey_kernel_from_pq(t, x, f(x), y, f(y));
}

PearceyDoubleIntegral::PearceyDoubleIntegral(double s, double t, const QuadratureSpec& spec) : s_(s), t_(t) {
  spec.validate();
  const double L = spec.truncation_radius;
  const double R = pearcey_radius(L, std::max(std::abs(s), std::abs(t)), 20.0);
  const int panels = panels_for(R, L / spec.panels, spec);
  const cplx e1 = std::polar(1.0, kPi / 4), e2 = std::polar(1.0, -kPi / 4);
  // The two wedges of X are moved off the origin so that they stay clear of the U line.
  const double c = 1.0;
  v_rule_.append(segment_rule(c + R * e1, c, panels, spec.nodes_per_panel));
  v_rule_.append(segment_rule(c, c + R * e2, panels, spec.nodes_per_panel));
  v_rule_.append(segment_rule(-c - R * e1, -c, panels, spec.nodes_per_panel));
  v_rule_.append(segment_rule(-c, -c - R * e2, panels, spec.nodes_per_panel));
  u_rule_.append(segment_rule(-I * R, 0.0, panels, spec.nodes_per_panel));
  u_rule_.append(segment_rule(0.0, I * R, panels, spec.nodes_per_panel));
  cauchy_ = cauchy_matrix(v_rule_, u_rule_);
}

double pearcey_heat_term(double s, double t, double x, double y) {
  if (!(s < t)) return 0.0;
  double d = t - s;
  return std::exp(-(x - y) * (x - y) / (2.0 * d)) / std::sqrt(2.0 * kPi * d);
}

Eigen::MatrixXd PearceyDoubleIntegral::matrix(const std::vector<double>& xs, const std::vector<double>& ys,
                                              bool include_heat_term) const {
  const double s = s_, t = t_;
  std::vector<double> rs, cs;
  Eigen::MatrixXcd S = separable_sum(
      v_rule_, u_rule_, cauchy_, xs, ys,
      [s](cplx V, double x) { return V * V * V * V / 4.0 - s * V * V / 2.0 + V * x; },
      [t](cplx U, double y) { return -U * U * U * U / 4.0 + t * U * U / 2.0 - U * y; }, rs, cs);
  Eigen::MatrixXd K(S.rows(), S.cols());
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      K(i, j) = -S(i, j).real() * std::exp(rs[i] + cs[j]) / (4.0 * kPi * kPi);
      if (include_heat_term) K(i, j) -= pearcey_heat_term(s, t, xs[i], ys[j]);
    }
  return K;
}

double PearceyDoubleIntegral::operator()(double x, double y) const { return matrix({x}, {y})(0, 0); }

double pearcey_kernel(double s, double t, double x, double y, const QuadratureSpec& spec) {
  return PearceyDoubleIntegral(s, t, spec)(x, y);
}

Eigen::MatrixXd pearcey_kernel_matrix(double s, double t, const std::vector<double>& xs,
                                      const std::vector<double>& ys, const QuadratureSpec& spec) {
  if (s != t) return PearceyDoubleIntegral(s, t, spec).matrix(xs, ys);
  double bound = 20.0;
  for (double v : xs) bound = std::max(bound, std::abs(v));
  for (double v : ys) bound = std::max(bound, std::abs(v));
  PearceyFunctions f(t, spec, bound);
  std::vector<PearceyPQ> px, py;
  for (double x : xs) px.push_back(f(x));
  for (double y : ys) py.push_back(f(y));
  Eigen::MatrixXd K(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) K(i, j) = pearcey_kernel_from_pq(t, xs[i], px[i], ys[j], py[j]);
  return K;
}

AiryValues airy(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("airy: x must be finite");
  // Ai(x) = (1/2 pi i) int exp(t^3/3 - x t) dt from inf e^{-i pi/3} to inf e^{i pi/3}.
  const double c = x > 0.25 ? std::sqrt(x) : 0.5;
  const cplx dir = std::polar(1.0, kPi / 3);
  auto expo = [x](cplx t) { return t * t * t / 3.0 - x * t; };
  double ref = expo(c).real(), R = 0.0;
  for (double r = 0.25;; r += 0.25) {
    double v = expo(c + r * dir).real();
    ref = std::max(ref, v);
    if (v < ref - 50.0 && r > 2.0) {
      R = r;
      break;
    }
  }
  int panels = std::max(8, static_cast<int>(std::ceil(R / 0.4)));
  ComplexRule rule = segment_rule(c + R * std::conj(dir), c, panels, 24);
  rule.append(segment_rule(c, c + R * dir, panels, 24));
  cplx ai = 0.0, dai = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    cplx f = rule.w[k] * std::exp(expo(rule.z[k]));
    ai += f;
    dai -= rule.z[k] * f;
  }
  return {(ai / (2.0 * kPi * I)).real(), (dai / (2.0 * kPi * I)).real()};
}

double airy_kernel(double x, double y) {
  AiryValues ax = airy(x);
  if (x == y) return ax.dai * ax.dai - x * ax.ai * ax.ai;
  AiryValues ay = airy(y);
  return (ax.ai * ay.dai - ax.dai * ay.ai) / (x - y);
}

int FiniteNParams::upper_count() const { return static_cast<int>(std::lround(p * n)); }

void FiniteNParams::validate() const {
  if (n < 2) throw std::invalid_argument("FiniteNParams: n must be at least 2");
  if (!(a > b)) throw std::invalid_argument("FiniteNParams: need a > b");
  int n1 = upper_count();
  if (n1 < 1 || n1 >= n) throw std::invalid_argument("FiniteNParams: both targets need at least one path");
}

FiniteNKernel::FiniteNKernel(const FiniteNParams& params, const QuadratureSpec& spec)
    : params_(params), spec_(spec) {
  params_.validate();
  spec_.validate();
  crit_ = find_cusp(params_.a, params_.b, params_.effective_p());
  sigma_ = std::sqrt(static_cast<double>(params_.n)) * crit_.c0 / crit_.t0;
  kappa_ = crit_.mu * std::pow(static_cast<double>(params_.n), 0.25);
}

namespace {

struct ContourChoice {
  ComplexRule v_rule, u_rule;
  double level = std::numeric_limits<double>::infinity();  // log of the largest integrand factors
};

}  // namespace

Eigen::MatrixXd FiniteNKernel::matrix(double tk, double tl, const std::vector<double>& xs,
                                      const std::vector<double>& ys, const std::vector<double>& row_log,
                                      const std::vector<double>& col_log) const {
  if (!(tk > 0.0 && tk < 1.0 && tl > 0.0 && tl < 1.0))
    throw std::invalid_argument("FiniteNKernel: times must lie in (0, 1)");
  if (xs.empty() || ys.empty()) return Eigen::MatrixXd(xs.size(), ys.size());
  const int n1 = params_.upper_count(), n2 = params_.n - n1;
  const double alpha = crit_.alpha, beta = crit_.beta, u0 = crit_.u0, sig = sigma_;
  const double L = spec_.truncation_radius, kap = kappa_;

  auto potential = [=](cplx w, double t, double pos) {
    return t * sig * sig * w * w / (1.0 - t) - 2.0 * pos * sig * w / (1.0 - t) +
           static_cast<double>(n2) * std::log(w - beta) + static_cast<double>(n1) * std::log(w - alpha);
  };
  auto fv = [=](cplx v, double x) { return -potential(v, tk, x); };
  auto fu = [=](cplx u, double y) { return potential(u, tl, y); };
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  auto v_level = [&](cplx v) { return std::max(fv(v, *xmin).real(), fv(v, *xmax).real()); };
  auto u_level = [&](cplx u) { return std::max(fu(u, *ymin).real(), fu(u, *ymax).real()); };

  // Walk outward from start along dir until the integrand has dropped by e^-60
  // below the largest value met so far (seeded with ref).
  auto reach = [&](auto level, cplx start, cplx dir, double ref, double step, double min_len, double& top) {
    for (double len = step;; len += step) {
      double v = level(start + len * dir);
      ref = std::max(ref, v);
      if (len >= min_len && v < ref - 60.0) {
        top = ref;
        return len;
      }
      if (len > 1e4 * (1.0 + std::abs(start))) throw std::runtime_error("FiniteNKernel: integrand does not decay");
    }
  };
  auto vertical_line = [&](double c, double step, double min_len, double unit, double& top) {
    double len = reach(u_level, cplx(c), I, u_level(c), step, min_len, top);
    return polyline_rule({c - I * len, cplx(c), c + I * len}, unit, spec_);
  };

  // Contours adapted to the cusp: U line through u0, V wedges around the poles.
  ContourChoice cusp;
  {
    double u_top = 0.0;
    cusp.u_rule = vertical_line(u0, 0.25 / kap, L / kap, 0.75 / kap, u_top);
    const double q = crit_.q, s = corner_offset(q);
    const double diag = L / (kap * std::sqrt(2.0));
    const double x_right = q > 1.0 ? std::min(s, diag) : diag;
    const double x_left = q < 1.0 ? std::min(s, diag) : diag;
    const double d_right = std::min(1.0 / kap, 0.4 * (alpha - u0));
    const double d_left = std::min(1.0 / kap, 0.4 * (u0 - beta));
    double v_top = -std::numeric_limits<double>::infinity();
    for (int side : {+1, -1}) {
      double xc = side > 0 ? x_right : x_left;
      cplx vertex = u0 + side * (side > 0 ? d_right : d_left);
      cplx up = u0 + side * xc + I * xc, down = u0 + side * xc - I * xc;
      double ref = -std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 32; ++k) ref = std::max(ref, v_level(vertex + (up - vertex) * (k / 32.0)));
      double top = ref;
      double h_len = reach(v_level, up, cplx(side), ref, 0.25 / kap, L / kap, top);
      v_top = std::max(v_top, top);
      std::vector<cplx> nodes = {up + side * h_len, up, vertex, down, down + side * h_len};
      if (side < 0) nodes = {down + side * h_len, down, vertex, up, up + side * h_len};
      cusp.v_rule.append(polyline_rule(nodes, 0.75 / kap, spec_));
    }
    cusp.level = u_top + v_top;
  }

  // Contours for arbitrary positions: since V only needs to encircle the poles,
  // use circles, and any vertical U line that avoids them; the double integral
  // does not depend on which side of a circle the line passes, because the
  // residue picked up on crossing integrates an entire function around a loop.
  ContourChoice general;
  {
    const double span = alpha - beta;
    const double lo = beta - 1.5 * span, hi = alpha + 1.5 * span;
    const int n_grid = 41, n_rad = 28, n_samp = 48;
    struct Circle {
      double m, R, cost;
    };
    std::vector<Circle> circles;
    for (int i = 0; i < n_grid; ++i)
      for (int j = 0; j < n_rad; ++j) {
        double m = lo + (hi - lo) * i / (n_grid - 1);
        double R = 0.04 * span * std::pow(75.0, j / (n_rad - 1.0));
        double cost = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_samp; ++k) cost = std::max(cost, v_level(m + std::polar(R, 2 * kPi * (k + 0.5) / n_samp)));
        circles.push_back({m, R, cost});
      }
    auto contains = [](const Circle& c, double pole) { return std::abs(c.m - pole) <= 0.8 * c.R; };
    auto excludes = [](const Circle& c, double pole) { return std::abs(c.m - pole) >= 1.25 * c.R; };
    double best = std::numeric_limits<double>::infinity(), best_c = u0;
    std::vector<Circle> best_set;
    for (int i = 0; i < 4 * n_grid; ++i) {
      double c = lo + (hi - lo) * (i + 0.5) / (4 * n_grid);
      double u_cost = -std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 24; ++k) u_cost = std::max(u_cost, u_level(cplx(c, 0.1 * span * k)));
      if (u_cost >= best) continue;
      const Circle *both = nullptr, *ca = nullptr, *cb = nullptr;
      for (const Circle& cir : circles) {
        if (!excludes(cir, c)) continue;
        bool ia = contains(cir, alpha), ib = contains(cir, beta);
        bool xa = excludes(cir, alpha), xb = excludes(cir, beta);
        if (ia && ib && (!both || cir.cost < both->cost)) both = &cir;
        if (ia && xb && (!ca || cir.cost < ca->cost)) ca = &cir;
        if (ib && xa && (!cb || cir.cost < cb->cost)) cb = &cir;
      }
      double pair_cost = ca && cb ? std::max(ca->cost, cb->cost) : std::numeric_limits<double>::infinity();
      double both_cost = both ? both->cost : std::numeric_limits<double>::infinity();
      double total = u_cost + std::min(pair_cost, both_cost);
      if (total < best) {
        best = total;
        best_c = c;
        best_set = both_cost <= pair_cost ? std::vector<Circle>{*both} : std::vector<Circle>{*ca, *cb};
      }
    }
    if (std::isfinite(best)) {
      double u_top = 0.0;
      double R_min = best_set[0].R;
      for (const Circle& cir : best_set) R_min = std::min(R_min, cir.R);
      general.u_rule = vertical_line(best_c, 0.05 * span, 2.0 * span, 0.25 * R_min, u_top);
      double v_top = -std::numeric_limits<double>::infinity();
      for (const Circle& cir : best_set) {
        const int m = 256;
        for (int k = 0; k < m; ++k) {
          cplx e = std::polar(1.0, 2 * kPi * k / m);
          general.v_rule.z.push_back(cir.m + cir.R * e);
          general.v_rule.w.push_back(I * cir.R * e * (2 * kPi / m));
          v_top = std::max(v_top, v_level(cir.m + cir.R * e));
        }
      }
      general.level = u_top + v_top;
    }
  }

  const ContourChoice& use = general.level < cusp.level ? general : cusp;
  Eigen::MatrixXcd cauchy = cauchy_matrix(use.v_rule, use.u_rule);
  std::vector<double> rs, cs;
  Eigen::MatrixXcd S = separable_sum(use.v_rule, use.u_rule, cauchy, xs, ys, fv, fu, rs, cs);
  const double pref = -sig / (2.0 * kPi * kPi * std::sqrt((1.0 - tk) * (1.0 - tl)));
  Eigen::MatrixXd K(S.rows(), S.cols());
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      double extra_log = (row_log.empty() ? 0.0 : row_log[i]) + (col_log.empty() ? 0.0 : col_log[j]);
      K(i, j) = pref * S(i, j).real() * std::exp(rs[i] + cs[j] + extra_log);
      if (tk < tl) {
        double d = tl - tk, x = xs[i], y = ys[j];
        double g = -0.5 * std::log(kPi * d) - (x - y) * (x - y) / d + x * x / (1.0 - tk) - y * y / (1.0 - tl);
        K(i, j) -= std::exp(g + extra_log);
      }
    }
  return K;
}

std::vector<double> FiniteNKernel::diagonal(double t, const std::vector<double>& xs, std::size_t block) const {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
  std::vector<double> out(xs.size());
  for (std::size_t start = 0; start < order.size(); start += block) {
    std::size_t stop = std::min(order.size(), start + block);
    std::vector<double> chunk;
    for (std::size_t k = start; k < stop; ++k) chunk.push_back(xs[order[k]]);
    Eigen::MatrixXd M = matrix(t, t, chunk, chunk);
    for (std::size_t k = start; k < stop; ++k) out[order[k]] = M(k - start, k - start);
  }
  return out;
}

double FiniteNKernel::operator()(double tk, double tl, double x, double y) const {
  return matrix(tk, tl, {x}, {y})(0, 0);
}

double finite_n_kernel(const FiniteNParams& params, double tk, double tl, double x, double y,
                       const QuadratureSpec& spec) {
  return FiniteNKernel(params, spec)(tk, tl, x, y);
}

}  // namespace cusplab
