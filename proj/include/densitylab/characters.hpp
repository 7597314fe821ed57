#pragma once

#include <vector>

#include "densitylab/real.hpp"

namespace dlab {

// Kronecker symbol (a|n), fully multiplicative extension of the Legendre symbol.
int kronecker_symbol(long long a, long long n);

// Real primitive Dirichlet character of modulus D, stored as a dense value
// table over residues. Values lie in {-1, 0, +1}; construction validates
// complete multiplicativity and the vanishing pattern on non-units.
class DirichletCharacter {
 public:
  DirichletCharacter(long long modulus, std::vector<int> values);

  long long modulus() const { return modulus_; }
  int parity() const { return parity_; }  // value at -1
  bool is_trivial() const { return modulus_ == 1; }
  const std::vector<int>& values() const { return values_; }

  // Value at m (reduced mod the modulus); 0 when gcd(m, modulus) > 1.
  int operator()(long long m) const;

 private:
  long long modulus_;
  std::vector<int> values_;
  int parity_;
};

// All real primitive characters of modulus exactly D (0, 1, or 2 of them),
// realized through quadratic-symbol tables. Deterministic order: the even
// character (value +1 at -1) first when both exist.
std::vector<DirichletCharacter> enumerate_real_primitive(long long D);

struct GaussSumValue {
  Real re;
  Real im;
};

// Sum of chi(m) * exp(2 pi i m / D) over residues, evaluated at no less than
// 100 decimal digits so downstream sign decisions are unambiguous.
GaussSumValue gauss_sum(const DirichletCharacter& chi);

// Sign i^k * tau(chi)^2 / D of the level-one functional equation: equals
// (-1)^(k/2) * chi(-1) for real primitive chi and even k. Always +1 or -1.
int fe_sign(const DirichletCharacter& chi, long long k);

// True when fe_sign is +1, i.e. central values are not forced to vanish and
// the weight-k family attached to chi carries positive total weight.
bool family_one_admits(const DirichletCharacter& chi, long long k);

}  // namespace dlab
