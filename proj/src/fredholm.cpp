#include "cusplab/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cusplab/kernels.hpp"
#include "cusplab/quadrature.hpp"

namespace cusplab {

void IntervalUnion::validate() const {
  if (endpoints.size() % 2 != 0) throw std::invalid_argument("IntervalUnion: odd number of endpoints");
  for (std::size_t k = 0; k < endpoints.size(); ++k) {
    if (!std::isfinite(endpoints[k])) throw std::invalid_argument("IntervalUnion: endpoints must be finite");
    if (k > 0 && !(endpoints[k] > endpoints[k - 1]))
      throw std::invalid_argument("IntervalUnion: endpoints must increase strictly");
  }
}

double IntervalUnion::measure() const {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < endpoints.size(); k += 2) total += endpoints[k + 1] - endpoints[k];
  return total;
}

IntervalUnion IntervalUnion::shifted(double h) const {
  IntervalUnion out = *this;
  for (double& e : out.endpoints) e += h;
  return out;
}

NystromGrid NystromGrid::build(const IntervalUnion& E, int m) {
  E.validate();
  if (m < 1) throw std::invalid_argument("NystromGrid: m must be positive");
  const GaussRule& g = gauss_legendre(m);
  NystromGrid grid;
  for (std::size_t k = 0; k < E.endpoints.size(); k += 2) {
    double a = E.endpoints[k], b = E.endpoints[k + 1];
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < m; ++i) {
      grid.nodes.push_back(mid + half * g.nodes[i]);
      grid.weights.push_back(half * g.weights[i]);
    }
  }
  return grid;
}

namespace {

double log_det_checked(const Eigen::MatrixXd& M) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  double det = lu.determinant();
  if (!(det > 0.0)) throw std::runtime_error("Fredholm determinant is not positive: " + std::to_string(det));
  const Eigen::MatrixXd& U = lu.matrixLU();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < U.rows(); ++i) log_det += std::log(std::abs(U(i, i)));
  return log_det;
}

GapResult refine(const std::function<double(int)>& log_det_at, int m) {
  if (m < 8) throw std::invalid_argument("Fredholm: m must be at least 8");
  double coarse = std::exp(log_det_at(m));
  double fine_log = log_det_at(2 * m);
  GapResult r;
  r.log_value = fine_log;
  r.value = std::exp(fine_log);
  r.error_estimate = std::abs(r.value - coarse);
  if (r.error_estimate > 1e-6)
    throw std::runtime_error("Fredholm: m and 2m disagree by " + std::to_string(r.error_estimate));
  return r;
}

}  // namespace

double log_fredholm_det(const KernelMatrixFn& kernel, const NystromGrid& grid) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd K = kernel(grid.nodes, grid.nodes);
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(grid.weights[i]);
  Eigen::MatrixXd M = -(s.asDiagonal() * K * s.asDiagonal());
  M.diagonal().array() += 1.0;
  return log_det_checked(M);
}

GapResult gap_probability(const KernelMatrixFn& kernel, const IntervalUnion& E, int m) {
  E.validate();
  if (E.empty()) return {};
  return refine([&](int order) { return log_fredholm_det(kernel, NystromGrid::build(E, order)); }, m);
}

KernelMatrixFn airy_kernel_fn() {
  return [](const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<AiryValues> ax, ay;
    for (double x : xs) ax.push_back(airy(x));
    for (double y : ys) ay.push_back(airy(y));
    Eigen::MatrixXd K(xs.size(), ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j) {
        double x = xs[i], y = ys[j];
        K(i, j) = x == y ? ax[i].dai * ax[i].dai - x * ax[i].ai * ax[i].ai
                         : (ax[i].ai * ay[j].dai - ax[i].dai * ay[j].ai) / (x - y);
      }
    return K;
  };
}

GapResult airy_gap(double s, int m) {
  if (!std::isfinite(s)) throw std::invalid_argument("airy_gap: s must be finite");
  double cut = std::max(s + 10.0, 0.0);
  while (airy_kernel(cut, cut) >= 1e-16) cut += 0.5;
  GapResult r = gap_probability(airy_kernel_fn(), IntervalUnion{{s, cut}}, m);
  r.truncated_at = cut;
  return r;
}

KernelMatrixFn pearcey_kernel_fn(double t, const QuadratureSpec& spec) {
  return [t, spec](const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearcey_kernel_matrix(t, t, xs, ys, spec);
  };
}

TimeKernelMatrixFn pearcey_time_kernel_fn(const QuadratureSpec& spec) {
  return [spec](double s, double t, const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearcey_kernel_matrix(s, t, xs, ys, spec);
  };
}

GapResult multitime_gap(const TimeKernelMatrixFn& kernel, const std::vector<double>& times,
                        const std::vector<IntervalUnion>& sets, int m) {
  if (times.size() != sets.size() || times.empty())
    throw std::invalid_argument("multitime_gap: need one set per time");
  if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("multitime_gap: times must be sorted");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    sets[i].validate();
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      if (times[i] == times[j] && sets[i].endpoints != sets[j].endpoints)
        throw std::invalid_argument("multitime_gap: sets at equal times must coincide");
  }
  auto log_det_at = [&](int order) {
    std::vector<NystromGrid> grids;
    std::vector<Eigen::Index> offset = {0};
    for (const auto& E : sets) {
      grids.push_back(NystromGrid::build(E, order));
      offset.push_back(offset.back() + static_cast<Eigen::Index>(grids.back().size()));
    }
    const Eigen::Index n = offset.back();
    if (n == 0) return 0.0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t j = 0; j < sets.size(); ++j) {
        if (grids[i].size() == 0 || grids[j].size() == 0) continue;
        Eigen::MatrixXd K = kernel(times[i], times[j], grids[i].nodes, grids[j].nodes);
        for (Eigen::Index a = 0; a < K.rows(); ++a)
          for (Eigen::Index b = 0; b < K.cols(); ++b)
            K(a, b) *= std::sqrt(grids[i].weights[a] * grids[j].weights[b]);
        if (i < j && times[i] == times[j]) K.diagonal().array() -= 1.0;
        M.block(offset[i], offset[j], K.rows(), K.cols()) -= K;
      }
    return log_det_checked(M);
  };
  return refine(log_det_at, m);
}

double ResolventData::identity_residual() const {
  const Eigen::Index n = kernel.rows();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid.weights.data(), n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - kernel * w.asDiagonal();
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n) + R * w.asDiagonal();
  return (A * B - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

ResolventData resolvent_quantities(double t, const IntervalUnion& E, int m, const QuadratureSpec& spec) {
  E.validate();
  if (E.empty()) throw std::invalid_argument("resolvent_quantities: E must not be empty");
  ResolventData d;
  d.grid = NystromGrid::build(E, m);
  const auto& x = d.grid.nodes;
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  double bound = 20.0;
  for (double e : E.endpoints) bound = std::max(bound, std::abs(e));
  PearceyFunctions f(t, spec, bound);
  std::vector<PearceyPQ> at_nodes, at_ends;
  for (double v : x) at_nodes.push_back(f(v));
  for (double e : E.endpoints) at_ends.push_back(f(e));

  d.kernel.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d.kernel(i, j) = pearcey_kernel_from_pq(t, x[i], at_nodes[i], x[j], at_nodes[j]);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(d.grid.weights.data(), n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - d.kernel * w.asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  d.condition = 1.0 / lu.rcond();
  if (!std::isfinite(d.condition) || d.condition > 1e12)
    throw std::runtime_error("resolvent_quantities: I - K_E is nearly singular, condition " +
                             std::to_string(d.condition));
  // det(I - K W) equals the symmetrized determinant.
  d.log_det = std::log(std::abs(lu.determinant()));
  d.R = lu.solve(d.kernel);

  Eigen::VectorXd p(n), q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = at_nodes[i].p[0];
    q(i) = at_nodes[i].q[0];
  }
  Eigen::VectorXd ph = lu.solve(p);
  Eigen::MatrixXd At = Eigen::MatrixXd::Identity(n, n) - d.kernel.transpose() * w.asDiagonal();
  Eigen::VectorXd qh = At.partialPivLu().solve(q);
  d.p_hat.assign(ph.data(), ph.data() + n);
  d.q_hat.assign(qh.data(), qh.data() + n);
  d.u = (w.array() * ph.array() * q.array()).sum();

  for (std::size_t k = 0; k < E.endpoints.size(); ++k) {
    double a = E.endpoints[k];
    double ps = at_ends[k].p[0], qs = at_ends[k].q[0];
    for (Eigen::Index j = 0; j < n; ++j) {
      ps += pearcey_kernel_from_pq(t, a, at_ends[k], x[j], at_nodes[j]) * w(j) * ph(j);
      qs += pearcey_kernel_from_pq(t, x[j], at_nodes[j], a, at_ends[k]) * w(j) * qh(j);
    }
    d.p_hat_end.push_back(ps);
    d.q_hat_end.push_back(qs);
  }
  return d;
}

double endpoint_sum(const ResolventData& data) {
  double s = 0.0;
  for (std::size_t k = 0; k < data.p_hat_end.size(); ++k) {
    double sign = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^k with k counted from 1
    s += sign * data.p_hat_end[k] * data.q_hat_end[k];
  }
  return s;
}

}  // namespace cusplab
