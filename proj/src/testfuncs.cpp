#include "densitylab/testfuncs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace dlab {

namespace {

// sin(t)/t with a series branch near zero.
double sinc(double t) {
  if (std::abs(t) < 1e-4) {
    double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// Integral of (a + b*(y - y0)) * cos(c*y) over [y0, y1].
double linear_piece_cos_integral(double a, double b, double y0, double y1, double c) {
  double h = y1 - y0;
  if (std::abs(c) * std::max(std::abs(y1), 1.0) < 1e-4) {
    // Second-order series; the closed form below cancels badly for small c.
    double base = a * h + 0.5 * b * h * h;
    double y13 = y1 * y1 * y1, y03 = y0 * y0 * y0;
    double y14 = y13 * y1, y04 = y03 * y0;
    double second = a * (y13 - y03) / 3.0 + b * ((y14 - y04) / 4.0 - y0 * (y13 - y03) / 3.0);
    return base - 0.5 * c * c * second;
  }
  double s1 = std::sin(c * y1), s0 = std::sin(c * y0);
  double c1 = std::cos(c * y1), c0 = std::cos(c * y0);
  return a * (s1 - s0) / c + b * (h * s1 / c + (c1 - c0) / (c * c));
}

}  // namespace

TestFunction TestFunction::fejer(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("fejer: beta must be > 0");
  TestFunction f;
  f.kind_ = "fejer";
  f.beta_ = beta;
  f.scale_ = 1.0;
  f.knots_ = {0.0, beta};
  f.values_ = {1.0, 0.0};
  f.sigma2_ = beta * beta / 6.0;
  return f;
}

TestFunction TestFunction::piecewise_linear_hat(std::vector<double> knots,
                                                std::vector<double> values) {
  if (knots.size() != values.size() || knots.size() < 2)
    throw std::invalid_argument("piecewise_linear_hat: need matching knots/values, at least 2");
  if (knots.front() != 0.0)
    throw std::invalid_argument("piecewise_linear_hat: first knot must be 0");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1]))
      throw std::invalid_argument("piecewise_linear_hat: knots must increase strictly");
  if (values.back() != 0.0)
    throw std::invalid_argument("piecewise_linear_hat: profile must vanish at the last knot");

  TestFunction f;
  f.kind_ = "piecewise-linear";
  f.beta_ = knots.back();
  f.scale_ = 1.0;
  f.knots_ = std::move(knots);
  f.values_ = std::move(values);
  // sigma2 = 2 * integral over [0, beta] of profile(y)^2 * y dy, per piece exact.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < f.knots_.size(); ++i) {
    double y0 = f.knots_[i], h = f.knots_[i + 1] - y0;
    double a = f.values_[i];
    double b = (f.values_[i + 1] - a) / h;
    double h2 = h * h, h3 = h2 * h, h4 = h3 * h;
    s += a * a * (h2 / 2 + y0 * h) + 2 * a * b * (h3 / 3 + y0 * h2 / 2) +
         b * b * (h4 / 4 + y0 * h3 / 3);
  }
  f.sigma2_ = 2.0 * s;
  return f;
}

double TestFunction::phi_hat(double y) const {
  double ay = std::abs(y);
  if (ay >= beta_) return 0.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), ay);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  if (i == 0) i = 1;  // ay == knots_[0]
  double y0 = knots_[i - 1], y1 = knots_[i];
  double t = (ay - y0) / (y1 - y0);
  return scale_ * ((1.0 - t) * values_[i - 1] + t * values_[i]);
}

double TestFunction::phi(double x) const {
  if (kind_ == "fejer") {
    double s = sinc(M_PI * beta_ * x);
    return scale_ * beta_ * s * s;
  }
  double c = 2.0 * M_PI * x;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    double y0 = knots_[i], y1 = knots_[i + 1];
    double a = values_[i];
    double b = (values_[i + 1] - a) / (y1 - y0);
    total += linear_piece_cos_integral(a, b, y0, y1, c);
  }
  return scale_ * 2.0 * total;
}

TestFunction TestFunction::scaled(double c) const {
  TestFunction f = *this;
  f.scale_ *= c;
  f.sigma2_ *= c * c;
  return f;
}

GroupTag parse_group(const std::string& name) {
  std::string low;
  for (char ch : name) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (low == "u" || low == "unitary") return GroupTag::U;
  if (low == "sp" || low == "usp" || low == "symplectic") return GroupTag::Sp;
  if (low == "so-even" || low == "soeven" || low == "so_even") return GroupTag::SOEven;
  if (low == "so-odd" || low == "soodd" || low == "so_odd") return GroupTag::SOOdd;
  if (low == "o" || low == "orthogonal") return GroupTag::O;
  throw std::invalid_argument("unknown group tag: " + name);
}

std::string group_name(GroupTag g) {
  switch (g) {
    case GroupTag::U: return "U";
    case GroupTag::Sp: return "Sp";
    case GroupTag::SOEven: return "SO-even";
    case GroupTag::SOOdd: return "SO-odd";
    case GroupTag::O: return "O";
  }
  return "?";
}

bool check_support(const TestFunction& phi, long long n) {
  if (n < 1) throw std::invalid_argument("check_support: moment order must be >= 1");
  return phi.beta() < 1.0 / (2.0 * static_cast<double>(n));
}

double kernel_integral(const TestFunction& phi, GroupTag g) {
  if (phi.beta() >= 1.0)
    throw std::invalid_argument(
        "kernel_integral: Fourier support half-width must be < 1 for the closed form");
  double h0 = phi.hat0();
  double p0 = phi.phi0();
  switch (g) {
    case GroupTag::U: return h0;
    case GroupTag::Sp: return h0 - p0 / 2.0;
    case GroupTag::SOEven: return h0 + p0 / 2.0;
    case GroupTag::SOOdd: return h0 - p0 / 2.0 + p0;
    case GroupTag::O: return h0 + p0 / 2.0;
  }
  throw std::invalid_argument("kernel_integral: unknown group");
}

}  // namespace dlab
