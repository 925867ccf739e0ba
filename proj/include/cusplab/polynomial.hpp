#pragma once

#include <complex>
#include <vector>

namespace cusplab {

// Real polynomial with coefficients in ascending order of degree.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<double> coeffs);
  static Poly constant(double c) { return Poly({c}); }
  static Poly linear(double c0, double c1) { return Poly({c0, c1}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double operator[](int k) const { return k < static_cast<int>(c_.size()) ? c_[k] : 0.0; }

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> z) const;
  Poly derivative(int order = 1) const;
  // Coefficients of p(x0 + h) in powers of h.
  Poly shifted(double x0) const;
  // Roundoff scale of evaluating p at x: sum |c_k| |x|^k.
  double magnitude(double x) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(double s, const Poly& a);

 private:
  void trim();
  std::vector<double> c_;
};

// A root together with the size of the cluster it was resolved in.
struct PolyRoot {
  std::complex<double> value;
  int multiplicity = 1;
  bool real = false;
};

// All complex roots, polished. Roots that coincide up to the rounding floor of
// the coefficients are snapped to a common real value and marked real.
std::vector<PolyRoot> solve_polynomial(const Poly& p);

// Real roots only, sorted, repeated according to multiplicity.
std::vector<double> real_roots(const Poly& p);

}  // namespace cusplab
