#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "densitylab/testfuncs.hpp"

using dlab::GroupTag;
using dlab::TestFunction;

namespace {

// Composite-Simpson quadrature of f over [a, b].
template <typename F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_SUITE("testfuncs") {

TEST_CASE("fejer worked values") {
  TestFunction f = TestFunction::fejer(0.5);
  CHECK(f.beta() == doctest::Approx(0.5));
  CHECK(f.phi_hat(0.0) == doctest::Approx(1.0));
  CHECK(f.phi_hat(0.25) == doctest::Approx(0.5));
  CHECK(f.phi_hat(0.5) == doctest::Approx(0.0));
  CHECK(f.phi_hat(-0.25) == doctest::Approx(0.5));
  CHECK(f.phi_hat(0.7) == 0.0);
  CHECK(f.phi0() == doctest::Approx(0.5));  // value at the origin equals beta
  // Squared-sinc profile on the direct side.
  double x = 1.0;
  double expected = 0.5 * std::pow(std::sin(M_PI * 0.5 * x) / (M_PI * 0.5 * x), 2);
  CHECK(f.phi(x) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(f.phi(0.0) == doctest::Approx(0.5));
}

TEST_CASE("fejer second-moment closed form") {
  CHECK(TestFunction::fejer(1.0).sigma2() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(TestFunction::fejer(0.25).sigma2() == doctest::Approx(1.0 / 96.0).epsilon(1e-14));
  // Independent quadrature of the defining integral 2 * int_0^beta hat^2(y) y dy.
  for (double beta : {0.1, 0.45, 0.8}) {
    TestFunction f = TestFunction::fejer(beta);
    double quad = 2.0 * simpson([&](double y) { return f.phi_hat(y) * f.phi_hat(y) * y; }, 0.0,
                                beta, 4000);
    CHECK(f.sigma2() == doctest::Approx(quad).epsilon(1e-12));
  }
}

TEST_CASE("scaling is quadratic in the amplitude") {
  TestFunction f = TestFunction::fejer(0.3);
  TestFunction g = f.scaled(2.5);
  CHECK(g.phi0() == doctest::Approx(2.5 * f.phi0()));
  CHECK(g.hat0() == doctest::Approx(2.5 * f.hat0()));
  CHECK(g.sigma2() == doctest::Approx(2.5 * 2.5 * f.sigma2()).epsilon(1e-13));
  CHECK(g.beta() == doctest::Approx(f.beta()));
}

TEST_CASE("piecewise linear hat reproduces the fejer triangle") {
  double beta = 0.4;
  TestFunction tri = TestFunction::piecewise_linear_hat({0.0, beta / 2, beta}, {1.0, 0.5, 0.0});
  TestFunction fej = TestFunction::fejer(beta);
  CHECK(tri.beta() == doctest::Approx(beta));
  CHECK(tri.sigma2() == doctest::Approx(fej.sigma2()).epsilon(1e-13));
  CHECK(tri.phi0() == doctest::Approx(fej.phi0()).epsilon(1e-13));
  for (double y : {0.0, 0.1, 0.23, 0.399})
    CHECK(tri.phi_hat(y) == doctest::Approx(fej.phi_hat(y)).epsilon(1e-13));
  for (double x : {0.0, 0.4, 1.3, 5.0})
    CHECK(tri.phi(x) == doctest::Approx(fej.phi(x)).epsilon(1e-11));
}

TEST_CASE("piecewise linear hat against direct quadrature") {
  TestFunction f = TestFunction::piecewise_linear_hat({0.0, 0.1, 0.25}, {2.0, 0.5, 0.0});
  CHECK(f.beta() == doctest::Approx(0.25));
  CHECK(f.hat0() == doctest::Approx(2.0));
  double quad_sigma =
      2.0 * simpson([&](double y) { return f.phi_hat(y) * f.phi_hat(y) * y; }, 0.0, 0.25, 4000);
  CHECK(f.sigma2() == doctest::Approx(quad_sigma).epsilon(1e-10));
  // Direct side via the cosine transform of the even hat profile.
  for (double x : {0.0, 0.3, 1.7}) {
    double quad_phi = 2.0 * simpson([&](double y) { return f.phi_hat(y) * std::cos(2 * M_PI * x * y); },
                                    0.0, 0.25, 4000);
    CHECK(f.phi(x) == doctest::Approx(quad_phi).epsilon(1e-8));
  }
}

TEST_CASE("piecewise linear hat input validation") {
  CHECK_THROWS_AS(TestFunction::piecewise_linear_hat({0.0, 0.2}, {1.0, 0.5}),
                  std::invalid_argument);  // must close at zero
  CHECK_THROWS_AS(TestFunction::piecewise_linear_hat({0.1, 0.2}, {1.0, 0.0}),
                  std::invalid_argument);  // must start at the origin
  CHECK_THROWS_AS(TestFunction::piecewise_linear_hat({0.0, 0.3, 0.2}, {1.0, 0.5, 0.0}),
                  std::invalid_argument);  // knots must increase
}

TEST_CASE("fejer rejects nonpositive width") {
  CHECK_THROWS_AS(TestFunction::fejer(0.0), std::invalid_argument);
  CHECK_THROWS_AS(TestFunction::fejer(-0.3), std::invalid_argument);
}

TEST_CASE("check_support strictness at the boundary") {
  CHECK(dlab::check_support(TestFunction::fejer(0.2), 2));
  CHECK_FALSE(dlab::check_support(TestFunction::fejer(0.25), 2));  // equality fails
  CHECK(dlab::check_support(TestFunction::fejer(0.2499), 2));
  CHECK(dlab::check_support(TestFunction::fejer(0.45), 1));
  CHECK_FALSE(dlab::check_support(TestFunction::fejer(0.5), 1));
  CHECK_THROWS_AS(dlab::check_support(TestFunction::fejer(0.2), 0), std::invalid_argument);
}

TEST_CASE("group parsing round trip") {
  CHECK(dlab::parse_group("u") == GroupTag::U);
  CHECK(dlab::parse_group("so-even") == GroupTag::SOEven);
  CHECK(dlab::parse_group("SO-Odd") == GroupTag::SOOdd);
  CHECK(dlab::parse_group("sp") == GroupTag::Sp);
  CHECK(dlab::parse_group("o") == GroupTag::O);
  for (GroupTag g : {GroupTag::U, GroupTag::Sp, GroupTag::SOEven, GroupTag::SOOdd, GroupTag::O})
    CHECK(dlab::parse_group(dlab::group_name(g)) == g);
  CHECK_THROWS_AS(dlab::parse_group("su"), std::invalid_argument);
}

TEST_CASE("kernel_integral worked values at width one half") {
  TestFunction f = TestFunction::fejer(0.5);
  CHECK(dlab::kernel_integral(f, GroupTag::U) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dlab::kernel_integral(f, GroupTag::Sp) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(dlab::kernel_integral(f, GroupTag::SOEven) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(dlab::kernel_integral(f, GroupTag::SOOdd) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(dlab::kernel_integral(f, GroupTag::O) == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("kernel coincidence pattern inside the narrow-support window") {
  // For supported widths below one, the three orthogonal flavors agree and the
  // symplectic value sits exactly phi(0) below the odd-orthogonal one.
  for (double beta : {0.1, 0.25, 0.45, 0.8}) {
    TestFunction f = TestFunction::fejer(beta);
    double so_even = dlab::kernel_integral(f, GroupTag::SOEven);
    double so_odd = dlab::kernel_integral(f, GroupTag::SOOdd);
    double full_o = dlab::kernel_integral(f, GroupTag::O);
    double sp = dlab::kernel_integral(f, GroupTag::Sp);
    double u = dlab::kernel_integral(f, GroupTag::U);
    CHECK(so_even == doctest::Approx(so_odd).epsilon(1e-14));
    CHECK(so_even == doctest::Approx(full_o).epsilon(1e-14));
    CHECK(so_odd == doctest::Approx(sp + f.phi0()).epsilon(1e-14));
    CHECK(u == doctest::Approx(f.hat0()).epsilon(1e-14));
  }
}

TEST_CASE("kernel_integral against quadrature on the transform side") {
  // Independent check: replace the closed-form phi(0)/2 correction with a
  // numerical integral of the hat profile over its support.
  for (double beta : {0.1, 0.25, 0.45}) {
    TestFunction f = TestFunction::fejer(beta);
    double hat_mass = 2.0 * simpson([&](double y) { return f.phi_hat(y); }, 0.0, beta, 4000);
    CHECK(dlab::kernel_integral(f, GroupTag::SOEven) ==
          doctest::Approx(f.hat0() + 0.5 * hat_mass).epsilon(1e-8));
    CHECK(dlab::kernel_integral(f, GroupTag::Sp) ==
          doctest::Approx(f.hat0() - 0.5 * hat_mass).epsilon(1e-8));
  }
}

TEST_CASE("kernel_integral refuses support reaching one") {
  CHECK_THROWS_AS(dlab::kernel_integral(TestFunction::fejer(1.0), GroupTag::Sp),
                  std::invalid_argument);
  CHECK_THROWS_AS(dlab::kernel_integral(TestFunction::fejer(1.2), GroupTag::U),
                  std::invalid_argument);
}

}  // TEST_SUITE
