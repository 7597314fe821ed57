#include "densitylab/characters.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace dlab {

int kronecker_symbol(long long a, long long n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  if (a % 2 == 0 && n % 2 == 0) return 0;
  int result = 1;
  // Factor the even part of n: (a|2) depends on a mod 8.
  long long v2 = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v2;
  }
  if (v2 % 2 == 1) {
    long long am8 = ((a % 8) + 8) % 8;
    if (am8 == 3 || am8 == 5) result = -result;
  }
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  // Jacobi symbol for odd positive n via reciprocity.
  a %= n;
  if (a < 0) a += n;
  while (a != 0) {
    long long t2 = 0;
    while (a % 2 == 0) {
      a /= 2;
      ++t2;
    }
    if (t2 % 2 == 1) {
      long long nm8 = n % 8;
      if (nm8 == 3 || nm8 == 5) result = -result;
    }
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    long long tmp = a;
    a = n % tmp;
    n = tmp;
  }
  return (n == 1) ? result : 0;
}

DirichletCharacter::DirichletCharacter(long long modulus, std::vector<int> values)
    : modulus_(modulus), values_(std::move(values)) {
  if (modulus_ < 1) throw std::invalid_argument("DirichletCharacter: modulus must be >= 1");
  if (static_cast<long long>(values_.size()) != modulus_)
    throw std::invalid_argument("DirichletCharacter: value table must have one entry per residue");
  for (long long m = 0; m < modulus_; ++m) {
    int v = values_[static_cast<std::size_t>(m)];
    if (v < -1 || v > 1)
      throw std::invalid_argument("DirichletCharacter: values must lie in {-1, 0, 1}");
    bool unit = std::gcd(m, modulus_) == 1;
    if (unit && v == 0)
      throw std::invalid_argument("DirichletCharacter: zero value on a unit residue");
    if (!unit && v != 0)
      throw std::invalid_argument("DirichletCharacter: nonzero value on a non-unit residue");
  }
  if (modulus_ == 1) {
    parity_ = 1;
  } else {
    if (values_[1 % modulus_] != 1)
      throw std::invalid_argument("DirichletCharacter: value at 1 must be 1");
    for (long long x = 0; x < modulus_; ++x) {
      for (long long y = x; y < modulus_; ++y) {
        if (values_[static_cast<std::size_t>(x)] * values_[static_cast<std::size_t>(y)] !=
            values_[static_cast<std::size_t>((x * y) % modulus_)])
          throw std::invalid_argument("DirichletCharacter: table is not completely multiplicative");
      }
    }
    parity_ = values_[static_cast<std::size_t>(modulus_ - 1)];
  }
}

int DirichletCharacter::operator()(long long m) const {
  long long res = m % modulus_;
  if (res < 0) res += modulus_;
  return values_[static_cast<std::size_t>(res)];
}

namespace {

bool squarefree(long long n) {
  if (n < 0) n = -n;
  for (long long d = 2; d * d <= n; ++d) {
    if (n % (d * d) == 0) return false;
  }
  return true;
}

// A quadratic-symbol table has modulus exactly |d| and is primitive precisely
// when d is a squarefree integer congruent to 1 mod 4, or four times an
// integer congruent to 2 or 3 mod 4 that is squarefree.
bool is_fundamental(long long d) {
  if (d == 0) return false;
  long long mod4 = ((d % 4) + 4) % 4;
  if (mod4 == 1) return squarefree(d);
  if (mod4 == 0) {
    long long m = d / 4;
    long long m4 = ((m % 4) + 4) % 4;
    return (m4 == 2 || m4 == 3) && squarefree(m);
  }
  return false;
}

DirichletCharacter character_from_discriminant(long long d) {
  long long D = d < 0 ? -d : d;
  std::vector<int> table(static_cast<std::size_t>(D));
  for (long long m = 0; m < D; ++m)
    table[static_cast<std::size_t>(m)] = kronecker_symbol(d, m);
  if (D == 1) table[0] = 1;  // single residue class; empty modulus constraint
  return DirichletCharacter(D, std::move(table));
}

}  // namespace

std::vector<DirichletCharacter> enumerate_real_primitive(long long D) {
  if (D < 1) throw std::invalid_argument("enumerate_real_primitive: D must be >= 1");
  std::vector<DirichletCharacter> out;
  if (D == 1) {
    out.push_back(character_from_discriminant(1));
    return out;
  }
  // Even character (+1 at -1) first for a deterministic order.
  if (is_fundamental(D)) out.push_back(character_from_discriminant(D));
  if (is_fundamental(-D)) out.push_back(character_from_discriminant(-D));
  return out;
}

GaussSumValue gauss_sum(const DirichletCharacter& chi) {
  // Primitivity is guaranteed by construction through the discriminant route;
  // reject tables that fail the induced-modulus test to keep |tau|^2 = D valid.
  const long long D = chi.modulus();
  for (long long d = 1; d < D; ++d) {
    if (D % d != 0) continue;
    bool induced = true;
    for (long long m = 1; m < D && induced; ++m) {
      if (std::gcd(m, D) != 1) continue;
      if (m % d == 1 % d && chi(m) != 1) induced = false;
    }
    if (induced)
      throw std::invalid_argument("gauss_sum: character is induced from modulus " +
                                  std::to_string(d) + "; need a primitive character");
  }

  unsigned digits = std::max<unsigned>(Real::default_precision(), 100);
  PrecisionGuard guard(digits);
  Real two_pi_over_d = 2 * real_pi() / Real(D);
  Real re = 0, im = 0;
  for (long long m = 1; m <= D; ++m) {
    int c = chi(m);
    if (c == 0) continue;
    Real angle = two_pi_over_d * Real(m);
    re += c * cos(angle);
    im += c * sin(angle);
  }
  if (D == 1) re = 1;  // empty-phase sum convention
  return GaussSumValue{re, im};
}

int fe_sign(const DirichletCharacter& chi, long long k) {
  if (k % 2 != 0) throw std::invalid_argument("fe_sign: k must be even");
  // i^k tau^2 / D = (-1)^{k/2} chi(-1) for real primitive chi.
  int ik = (k / 2) % 2 == 0 ? 1 : -1;
  return ik * chi.parity();
}

bool family_one_admits(const DirichletCharacter& chi, long long k) {
  return fe_sign(chi, k) == 1;
}

}  // namespace dlab
