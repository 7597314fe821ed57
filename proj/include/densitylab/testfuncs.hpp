#pragma once

#include <string>
#include <vector>

namespace dlab {

// Even test function with an even, real Fourier transform supported in
// [-beta, beta]. Both sides have closed-form evaluators; sigma2 is the
// closed-form value of the weighted Fourier energy  integral of
// phi_hat(y)^2 * |y| dy.
class TestFunction {
 public:
  // Triangular Fourier profile: phi_hat(y) = max(0, 1 - |y|/beta),
  // phi(x) = beta * (sin(pi beta x)/(pi beta x))^2, sigma2 = beta^2/6.
  static TestFunction fejer(double beta);

  // Piecewise-linear even phi_hat given by knots 0 = y_0 < ... < y_m = beta
  // and values at the knots (value at beta must be 0). phi and sigma2 are
  // computed in closed form per linear piece.
  static TestFunction piecewise_linear_hat(std::vector<double> knots,
                                           std::vector<double> values);

  double beta() const { return beta_; }
  const std::string& kind() const { return kind_; }

  double phi(double x) const;      // real-space value
  double phi_hat(double y) const;  // Fourier-space value; 0 outside [-beta, beta]
  double phi0() const { return phi(0.0); }
  double hat0() const { return phi_hat(0.0); }
  double sigma2() const { return sigma2_; }

  // Same shape scaled by c on the real side (Fourier side scales identically).
  TestFunction scaled(double c) const;

 private:
  TestFunction() = default;

  std::string kind_;
  double beta_ = 0.0;
  double scale_ = 1.0;
  double sigma2_ = 0.0;
  std::vector<double> knots_;   // piecewise-linear profile on [0, beta]
  std::vector<double> values_;  // values at the knots (Fourier side, unscaled)
};

enum class GroupTag { U, Sp, SOEven, SOOdd, O };

GroupTag parse_group(const std::string& name);
std::string group_name(GroupTag g);

// True iff the Fourier support half-width is strictly below 1/(2n).
bool check_support(const TestFunction& phi, long long n);

// Integral of phi against the limiting eigenvalue density of the group,
// evaluated in closed form via the Fourier side (valid for beta < 1, which is
// enforced): U -> hat0; Sp -> hat0 - phi0/2; SO even -> hat0 + phi0/2;
// SO odd -> hat0 + phi0/2; O -> hat0 + phi0/2.
double kernel_integral(const TestFunction& phi, GroupTag g);

}  // namespace dlab
