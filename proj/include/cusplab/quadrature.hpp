#pragma once

#include <complex>
#include <vector>

namespace cusplab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per order; exact for polynomials of degree 2n-1.
const GaussRule& gauss_legendre(int n);

// Nodes and weights of a composite Gauss-Legendre rule on [a, b].
struct RealRule {
  std::vector<double> x;
  std::vector<double> w;
};
RealRule composite_rule(double a, double b, int panels, int nodes_per_panel);

// Nodes z_k and complex weights dz_k along the straight segment from z0 to z1.
struct ComplexRule {
  std::vector<std::complex<double>> z;
  std::vector<std::complex<double>> w;
  void append(const ComplexRule& other);
  std::size_t size() const { return z.size(); }
};
ComplexRule segment_rule(std::complex<double> z0, std::complex<double> z1,
                         int panels, int nodes_per_panel);

}  // namespace cusplab
