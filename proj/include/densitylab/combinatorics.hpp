#pragma once

#include <map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

Int factorial(long long n);
Int double_factorial(long long n);
Int binomial(long long n, long long k);

// Coefficients expressing the n-th power of a degree-two normalized Hecke
// eigenvalue in the eigenvalue basis indexed by prime powers:
//   x^n = sum_m coeffs[m] * U_m(x/2-equivalent basis value), m == n (mod 2).
struct PowerExpansionCoeffs {
  long long n = 0;
  std::map<long long, Int> coeffs;  // m -> c_{n,m}, every 0 <= m <= n with m == n (mod 2)
};

PowerExpansionCoeffs power_coeffs(long long n);

// Ordered positive parts (n_1, ..., n_l) summing to t.
struct Composition {
  long long t = 0;
  std::vector<long long> parts;

  Composition(long long total, std::vector<long long> p);
};

// t! / (l! * n_1! * ... * n_l!), exactly.
Rat multinomial_factor(const Composition& c);

// Brute-force verification twin of multinomial_factor: counts ordered t-tuples
// drawn from the multiset's distinct primes whose content equals the multiset,
// then divides by the number of orderings of the distinct primes.
Rat tuple_count_oracle(long long t, const std::map<long long, long long>& prime_multiset);

// n-th moment of a centered Gaussian with the given variance:
// 0 for odd n, (n-1)!! * variance^(n/2) for even n.
Rat gaussian_moment(long long n, const Rat& variance);

// Closed combinatorial sum that collapses the centered-moment expansion; equals
// gaussian_moment(n, sigma2) for every value of phi0 (polynomial identity).
Rat frakC(long long n, const Rat& phi0, const Rat& sigma2);

// Exact inclusion-exclusion audit for replacing a sum over pairwise-distinct
// prime tuples by a full product of sums. All factors are rational surrogates
// (fixed positive rational weight per prime), so every identity is exact.
struct SwitchCheckResult {
  Rat lhs;              // sum over ordered tuples of pairwise-distinct primes
  Rat rhs;              // product over blocks of the single-prime sums
  Rat coincidence_sum;  // independently enumerated tuples with a repeated prime
  Rat pair_bound;       // union-style over-count built from pairwise coincidences
  bool identity_holds = false;  // rhs - lhs == coincidence_sum
  bool bound_holds = false;     // coincidence_sum <= pair_bound
  bool bound_strict = false;    // coincidence_sum <  pair_bound
};

SwitchCheckResult switch_check(long long ell,
                               const std::vector<std::pair<long long, long long>>& exponent_pairs,
                               long long prime_cutoff);

}  // namespace dlab
