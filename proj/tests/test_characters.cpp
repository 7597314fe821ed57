#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "densitylab/characters.hpp"
#include "densitylab/real.hpp"

using dlab::DirichletCharacter;
using dlab::Real;

namespace {

// Brute-force oracle: enumerate every D-periodic, completely multiplicative
// table with values in {-1,0,+1} that vanishes exactly on non-units, then keep
// the ones not induced from a proper divisor of the modulus.
std::vector<std::vector<int>> brute_force_primitive_tables(long long D) {
  if (D == 1) return {{1}};
  std::vector<long long> unit_primes;
  for (long long p = 2; p < D; ++p) {
    bool prime = true;
    for (long long q = 2; q * q <= p; ++q)
      if (p % q == 0) {
        prime = false;
        break;
      }
    if (prime && std::gcd(p, D) == 1) unit_primes.push_back(p);
  }

  std::vector<std::vector<int>> survivors;
  const std::size_t np = unit_primes.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << np); ++mask) {
    std::vector<int> v(static_cast<std::size_t>(D), 0);
    v[1 % static_cast<std::size_t>(D)] = 1;
    bool ok = true;
    for (long long m = 2; m < D && ok; ++m) {
      if (std::gcd(m, D) > 1) continue;
      long long rest = m;
      int val = 1;
      for (std::size_t i = 0; i < np && rest > 1; ++i) {
        while (rest % unit_primes[i] == 0) {
          rest /= unit_primes[i];
          if (mask & (std::size_t{1} << i)) val = -val;
        }
      }
      if (rest > 1) {
        ok = false;  // unit with a prime factor sharing a factor with D: impossible
        break;
      }
      v[static_cast<std::size_t>(m)] = val;
    }
    if (!ok) continue;
    // Full multiplicativity of the table under products taken mod D.
    for (long long a = 1; a < D && ok; ++a) {
      if (v[static_cast<std::size_t>(a)] == 0) continue;
      for (long long b = a; b < D; ++b) {
        if (v[static_cast<std::size_t>(b)] == 0) continue;
        if (v[static_cast<std::size_t>((a * b) % D)] !=
            v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)]) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;
    // Primitivity: not constant on residue classes of any proper divisor.
    bool primitive = true;
    for (long long d = 1; d < D && primitive; ++d) {
      if (D % d != 0) continue;
      bool induced = true;
      for (long long a = 1; a < D && induced; ++a) {
        if (std::gcd(a, D) > 1) continue;
        for (long long b = a + d; b < D; b += d) {
          if (std::gcd(b, D) > 1) continue;
          if (v[static_cast<std::size_t>(a)] != v[static_cast<std::size_t>(b)]) {
            induced = false;
            break;
          }
        }
      }
      if (induced) primitive = false;
    }
    if (primitive && std::find(survivors.begin(), survivors.end(), v) == survivors.end())
      survivors.push_back(v);
  }
  std::sort(survivors.begin(), survivors.end());
  return survivors;
}

}  // namespace

TEST_SUITE("characters") {

TEST_CASE("kronecker_symbol basics") {
  CHECK(dlab::kronecker_symbol(1, 1) == 1);
  CHECK(dlab::kronecker_symbol(2, 7) == 1);   // 2 = 3^2 mod 7
  CHECK(dlab::kronecker_symbol(3, 7) == -1);  // 3 is a non-residue mod 7
  CHECK(dlab::kronecker_symbol(14, 7) == 0);
  // Quadratic reciprocity spot checks against Legendre tables.
  CHECK(dlab::kronecker_symbol(5, 11) == 1);   // 4^2 = 16 = 5
  CHECK(dlab::kronecker_symbol(7, 11) == -1);  // non-residue
  CHECK(dlab::kronecker_symbol(-1, 5) == 1);
  CHECK(dlab::kronecker_symbol(-1, 7) == -1);
}

TEST_CASE("enumerate_real_primitive worked examples") {
  auto d1 = dlab::enumerate_real_primitive(1);
  REQUIRE(d1.size() == 1);
  CHECK(d1[0].is_trivial());
  CHECK(d1[0](0) == 1);
  CHECK(d1[0](17) == 1);

  auto d4 = dlab::enumerate_real_primitive(4);
  REQUIRE(d4.size() == 1);
  CHECK(d4[0](1) == 1);
  CHECK(d4[0](3) == -1);
  CHECK(d4[0](2) == 0);
  CHECK(d4[0].parity() == -1);

  auto d5 = dlab::enumerate_real_primitive(5);
  REQUIRE(d5.size() == 1);
  CHECK(d5[0].parity() == 1);
  CHECK(d5[0](2) == -1);
  CHECK(d5[0](4) == 1);

  CHECK(dlab::enumerate_real_primitive(6).empty());

  auto d8 = dlab::enumerate_real_primitive(8);
  REQUIRE(d8.size() == 2);
  CHECK(d8[0].parity() == 1);  // even character listed first
  CHECK(d8[1].parity() == -1);
  CHECK(d8[0](7) == 1);
  CHECK(d8[1](7) == -1);
}

TEST_CASE("enumerate_real_primitive matches the brute-force filter up to 60") {
  for (long long D = 1; D <= 60; ++D) {
    auto listed = dlab::enumerate_real_primitive(D);
    std::vector<std::vector<int>> tables;
    for (const auto& chi : listed) {
      CHECK(chi.modulus() == D);
      tables.push_back(chi.values());
    }
    std::sort(tables.begin(), tables.end());
    auto expected = brute_force_primitive_tables(D);
    REQUIRE(tables.size() == expected.size());
    CHECK(tables == expected);
  }
}

TEST_CASE("character table constructor rejects broken tables") {
  // Not completely multiplicative: flip a single unit value of the mod-5 table.
  CHECK_THROWS_AS(DirichletCharacter(5, {0, 1, 1, -1, 1}), std::invalid_argument);
  // Wrong vanishing pattern: unit entry set to zero.
  CHECK_THROWS_AS(DirichletCharacter(5, {0, 1, 0, -1, 1}), std::invalid_argument);
  // Wrong table length.
  CHECK_THROWS_AS(DirichletCharacter(5, {0, 1, -1}), std::invalid_argument);
}

TEST_CASE("gauss_sum worked examples") {
  auto tau1 = dlab::gauss_sum(dlab::enumerate_real_primitive(1)[0]);
  CHECK(std::abs(static_cast<double>(tau1.re) - 1.0) < 1e-30);
  CHECK(std::abs(static_cast<double>(tau1.im)) < 1e-30);

  auto tau4 = dlab::gauss_sum(dlab::enumerate_real_primitive(4)[0]);
  CHECK(std::abs(static_cast<double>(tau4.re)) < 1e-30);
  CHECK(std::abs(static_cast<double>(tau4.im) - 2.0) < 1e-30);

  auto tau5 = dlab::gauss_sum(dlab::enumerate_real_primitive(5)[0]);
  // Square is exactly +5 for the even character of conductor 5.
  Real sq_re = tau5.re * tau5.re - tau5.im * tau5.im;
  Real sq_im = 2 * tau5.re * tau5.im;
  CHECK(std::abs(static_cast<double>(sq_re) - 5.0) < 1e-30);
  CHECK(std::abs(static_cast<double>(sq_im)) < 1e-30);
}

TEST_CASE("gauss_sum square identity for all conductors up to 500") {
  for (long long D = 1; D <= 500; ++D) {
    for (const auto& chi : dlab::enumerate_real_primitive(D)) {
      auto tau = dlab::gauss_sum(chi);
      double re = static_cast<double>(tau.re);
      double im = static_cast<double>(tau.im);
      double norm = re * re + im * im;
      CHECK(std::abs(norm - static_cast<double>(D)) <= 1e-12 * static_cast<double>(D));
      double target = static_cast<double>(chi.parity() * D);
      double sq_re = re * re - im * im;
      double sq_im = 2 * re * im;
      CHECK(std::abs(sq_re - target) <= 1e-12);
      CHECK(std::abs(sq_im) <= 1e-12);
    }
  }
}

TEST_CASE("gauss_sum refuses imprimitive characters") {
  // The conductor-4 character read modulo 8 is a valid table but imprimitive.
  DirichletCharacter lifted(8, {0, 1, 0, -1, 0, 1, 0, -1});
  CHECK_THROWS_AS(dlab::gauss_sum(lifted), std::invalid_argument);
  try {
    dlab::gauss_sum(lifted);
  } catch (const std::invalid_argument& e) {
    // The error names the divisor the character actually lives at.
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
}

TEST_CASE("fe_sign worked examples and parity table") {
  auto chi1 = dlab::enumerate_real_primitive(1)[0];
  auto chi4 = dlab::enumerate_real_primitive(4)[0];
  auto chi5 = dlab::enumerate_real_primitive(5)[0];
  auto d8 = dlab::enumerate_real_primitive(8);

  CHECK(dlab::fe_sign(chi1, 12) == 1);
  CHECK(dlab::fe_sign(chi1, 14) == -1);

  CHECK(dlab::fe_sign(chi4, 12) == -1);
  CHECK(dlab::fe_sign(chi4, 14) == 1);

  CHECK(dlab::fe_sign(chi5, 12) == 1);
  CHECK(dlab::fe_sign(chi5, 14) == -1);

  CHECK(dlab::fe_sign(d8[0], 14) == -1);  // even character of conductor 8
  CHECK(dlab::fe_sign(d8[1], 12) == -1);  // odd character of conductor 8

  for (long long D : {1LL, 4LL, 5LL, 8LL, 12LL, 13LL})
    for (const auto& chi : dlab::enumerate_real_primitive(D))
      for (long long k : {12LL, 14LL, 16LL, 18LL}) {
        int s = dlab::fe_sign(chi, k);
        CHECK((s == 1 || s == -1));
        int predicted = ((k / 2) % 2 == 0 ? 1 : -1) * chi.parity();
        CHECK(s == predicted);
        CHECK(dlab::family_one_admits(chi, k) == (s == 1));
      }

  CHECK_THROWS_AS(dlab::fe_sign(chi1, 13), std::invalid_argument);
}

}  // TEST_SUITE
