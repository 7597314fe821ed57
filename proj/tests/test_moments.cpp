#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "densitylab/characters.hpp"
#include "densitylab/moments.hpp"
#include "densitylab/real.hpp"
#include "densitylab/testfuncs.hpp"

using dlab::DirichletCharacter;
using dlab::FamilyOptions;
using dlab::FamilySnapshot;
using dlab::Real;
using dlab::TestFunction;

namespace {

DirichletCharacter trivial_chi() { return dlab::enumerate_real_primitive(1)[0]; }
DirichletCharacter chi4() { return dlab::enumerate_real_primitive(4)[0]; }
DirichletCharacter chi8_even() { return dlab::enumerate_real_primitive(8)[0]; }

FamilyOptions fast_opts(unsigned digits = 30) {
  FamilyOptions o;
  o.digits = digits;
  return o;
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("family construction at weight 12") {
  auto F = dlab::build_family(12, trivial_chi(), 1, fast_opts());
  CHECK(F.k == 12);
  CHECK(F.N == 1);
  CHECK(F.r == 1);
  CHECK(F.Q == doctest::Approx(144.0));
  REQUIRE(F.forms.size() == 1);
  REQUIRE(F.weights.size() == 1);
  CHECK(F.weights[0].value > 0);
  CHECK(F.total_weight > 0);
  CHECK_FALSE(F.degenerate);
}

TEST_CASE("family rejections name the violated constraint") {
  CHECK_THROWS_AS(dlab::build_family(2, trivial_chi(), 1, fast_opts()), std::invalid_argument);
  try {
    dlab::build_family(2, trivial_chi(), 1, fast_opts());
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("empty") != std::string::npos);
  }

  CHECK_THROWS_AS(dlab::build_family(13, trivial_chi(), 1, fast_opts()), std::invalid_argument);

  CHECK_THROWS_AS(dlab::build_family(12, chi4(), 2, fast_opts()), std::invalid_argument);
  try {
    dlab::build_family(12, chi4(), 2, fast_opts());
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("gcd") != std::string::npos);
  }

  // Sign -1 pair: weight 12 against the odd conductor-4 character.
  CHECK_THROWS_AS(dlab::build_family(12, chi4(), 1, fast_opts()), std::invalid_argument);
  try {
    dlab::build_family(12, chi4(), 1, fast_opts());
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("fe_sign") != std::string::npos);
  }
}

TEST_CASE("vanishing-sign family is degenerate when forced through") {
  FamilyOptions o = fast_opts();
  o.allow_vanishing_sign = true;
  auto F = dlab::build_family(12, chi4(), 1, o);
  CHECK(F.degenerate);
  CHECK_THROWS_AS(dlab::weighted_average_eigenvalue(F, 2), std::invalid_argument);
  try {
    dlab::weighted_average_eigenvalue(F, 2);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("degenerate") != std::string::npos);
  }
  CHECK_THROWS_AS(dlab::one_level_density(F, TestFunction::fejer(0.3)), std::invalid_argument);
}

TEST_CASE("weighted eigenvalue average at the identity index is one") {
  auto F = dlab::build_family(12, trivial_chi(), 1, fast_opts());
  CHECK(dlab::weighted_average_eigenvalue(F, 1) == 1);
}

TEST_CASE("dimension-one families average to the form's own eigenvalue") {
  auto F = dlab::build_family(16, trivial_chi(), 1, fast_opts());
  REQUIRE(F.forms.size() == 1);
  Real avg = dlab::weighted_average_eigenvalue(F, 2);
  CHECK(static_cast<double>(abs(avg - F.forms[0].lambda(2))) < 1e-25);

  // Rescaling every weight by the same positive constant leaves it unchanged.
  FamilySnapshot G = F;
  for (auto& w : G.weights) w.value = w.value * 4;
  G.total_weight = G.total_weight * 4;
  G.max_tail = G.max_tail * 4;
  Real avg2 = dlab::weighted_average_eigenvalue(G, 2);
  CHECK(static_cast<double>(abs(avg - avg2)) < 1e-25);
}

TEST_CASE("weighted average checks the coefficient table length") {
  FamilyOptions o = fast_opts();
  o.table_size = 60;  // enough for the weight series at 30 digits, short for m = 61
  auto F = dlab::build_family(12, trivial_chi(), 1, o);
  CHECK_THROWS_AS(dlab::weighted_average_eigenvalue(F, 61), std::invalid_argument);
  try {
    dlab::weighted_average_eigenvalue(F, 61);
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("61") != std::string::npos);
    CHECK(msg.find("60") != std::string::npos);
  }
}

TEST_CASE("trace main term worked values") {
  auto tmt = [](long long m, const dlab::DirichletCharacter& chi, long long r) {
    return static_cast<double>(dlab::trace_main_term(m, chi, r));
  };
  CHECK(tmt(1, trivial_chi(), 1) == doctest::Approx(1.0));
  CHECK(tmt(6, trivial_chi(), 1) ==
        doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
  CHECK(tmt(6, chi4(), 1) == doctest::Approx(0.0));  // chi(2) = 0
  CHECK(tmt(9, chi4(), 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));  // chi(3)^2 = 1
  CHECK(tmt(4, trivial_chi(), 12) == doctest::Approx(3.5).epsilon(1e-14));  // sigma1(4)/sqrt(4)
  CHECK_THROWS_AS(dlab::trace_main_term(0, trivial_chi(), 1), std::invalid_argument);
}

TEST_CASE("coefficient-sum comparison below and beyond the crossover") {
  FamilyOptions o = fast_opts(40);
  auto low = dlab::kr_sum_formula(12, trivial_chi(), 1, 1, o);
  CHECK(low.below_crossover);  // at weight 12 the envelope still dominates
  CHECK(low.main > 0);
  CHECK(low.lhs > 0);

  auto high = dlab::kr_sum_formula(60, trivial_chi(), 1, 1, fast_opts(50));
  CHECK_FALSE(high.below_crossover);
  CHECK(static_cast<double>(abs(high.lhs / high.main - 1)) < 1e-20);
}

TEST_CASE("coefficient-sum main term vanishes with the character") {
  // chi(2) = 0 kills the closed form at m = 2 while the direct sum survives.
  FamilyOptions o = fast_opts(30);
  auto res = dlab::kr_sum_formula(18, chi4(), 1, 2, o);
  CHECK(res.main == 0);

  o.allow_vanishing_sign = true;
  auto van = dlab::kr_sum_formula(12, chi4(), 1, 1, o);
  CHECK(van.main == 0);  // sign -1 makes the (1 + sign) factor vanish
  CHECK(static_cast<double>(abs(van.lhs)) < 1e-12);
}

TEST_CASE("one-level density: prediction, parity split, and linearity") {
  auto F = dlab::build_family(12, trivial_chi(), 1, fast_opts());
  TestFunction f1 = TestFunction::fejer(0.2);
  TestFunction f2 = TestFunction::fejer(0.4);
  auto d1 = dlab::one_level_density(F, f1);
  CHECK(d1.predicted_average ==
        doctest::Approx(f1.hat0() - f1.phi0() / 2.0));  // trivial character branch
  REQUIRE(d1.per_form.size() == 1);
  CHECK(d1.second_order >= 0);

  auto G = dlab::build_family(12, chi8_even(), 1, fast_opts());
  auto d8 = dlab::one_level_density(G, f1);
  CHECK(d8.predicted_average == doctest::Approx(f1.hat0() + f1.phi0() / 2.0));

  // Linearity in the test function: the sum profile is the piecewise hat with
  // knots at the two support edges.
  TestFunction fsum = TestFunction::piecewise_linear_hat({0.0, 0.2, 0.4}, {2.0, 0.5, 0.0});
  auto dsum = dlab::one_level_density(F, fsum);
  auto d2 = dlab::one_level_density(F, f2);
  Real lin_gap = abs(dsum.per_form[0] - d1.per_form[0] - d2.per_form[0]);
  CHECK(static_cast<double>(lin_gap) < 1e-12);
}

TEST_CASE("centered moments: order one vanishes and support is enforced") {
  std::vector<FamilySnapshot> ladder;
  ladder.push_back(dlab::build_family(12, trivial_chi(), 1, fast_opts()));
  ladder.push_back(dlab::build_family(16, trivial_chi(), 1, fast_opts()));

  auto rep = dlab::centered_moment(ladder, TestFunction::fejer(0.45), 1);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.n == 1);
  for (const auto& row : rep.rows) {
    CHECK(row.predicted_moment == 0.0);
    CHECK(static_cast<double>(abs(row.moment)) < 1e-20);  // exact centering
  }
  CHECK(rep.rows[0].Q < rep.rows[1].Q);

  CHECK_THROWS_AS(dlab::centered_moment(ladder, TestFunction::fejer(0.3), 2),
                  std::invalid_argument);
  try {
    dlab::centered_moment(ladder, TestFunction::fejer(0.3), 2);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1/(2n)") != std::string::npos);
  }
}

TEST_CASE("centered moment rows carry the gaussian prediction") {
  std::vector<FamilySnapshot> ladder;
  ladder.push_back(dlab::build_family(12, trivial_chi(), 1, fast_opts()));
  TestFunction phi2 = TestFunction::fejer(0.2);    // below 1/4
  TestFunction phi3 = TestFunction::fejer(0.12);   // below 1/6
  TestFunction phi4 = TestFunction::fejer(0.1);    // below 1/8
  auto m2 = dlab::centered_moment(ladder, phi2, 2);
  CHECK(m2.rows[0].predicted_moment == doctest::Approx(phi2.sigma2()));
  auto m3 = dlab::centered_moment(ladder, phi3, 3);
  CHECK(m3.rows[0].predicted_moment == 0.0);
  auto m4 = dlab::centered_moment(ladder, phi4, 4);
  CHECK(m4.rows[0].predicted_moment == doctest::Approx(3.0 * phi4.sigma2() * phi4.sigma2()));
  CHECK_THROWS_AS(dlab::centered_moment({}, phi2, 2), std::invalid_argument);
}

TEST_CASE("envelope monotonicity flips across the support threshold") {
  std::vector<long long> ladder = {40, 80, 160};
  auto shrink = dlab::error_envelope_check(TestFunction::fejer(0.24), 2, ladder);
  REQUIRE(shrink.rows.size() == 3);
  CHECK(shrink.decreasing);
  CHECK(shrink.rows[0].log_value == doctest::Approx(11.952).epsilon(1e-3));

  auto grow = dlab::error_envelope_check(TestFunction::fejer(0.26), 2, ladder);
  CHECK_FALSE(grow.decreasing);

  auto first = dlab::error_envelope_check(TestFunction::fejer(0.45), 1, ladder);
  CHECK(first.decreasing);
}

}  // TEST_SUITE
