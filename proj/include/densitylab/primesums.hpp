#pragma once

#include <vector>

#include "densitylab/characters.hpp"
#include "densitylab/testfuncs.hpp"

namespace dlab {

// Sorted primes below a cutoff with cached natural logarithms.
// Built by a segmented sieve, parallel over segments; the result is identical
// to the serial reference sieve (validated in tests).
class PrimeTable {
 public:
  explicit PrimeTable(long long cutoff);

  long long cutoff() const { return cutoff_; }
  const std::vector<long long>& primes() const { return primes_; }
  const std::vector<double>& logs() const { return logs_; }

  // Serial trial-division-free reference sieve used as the validation twin.
  static std::vector<long long> reference_sieve(long long cutoff);

 private:
  long long cutoff_;
  std::vector<long long> primes_;
  std::vector<double> logs_;
};

struct PrimeSumResult {
  double Q = 0.0;
  double value = 0.0;
  double predicted_limit = 0.0;
  double deviation = 0.0;  // |value - predicted_limit|
};

// Weighted prime sum over q <= Q^beta, q not dividing N:
//   phi_hat(log q / log Q)^n * chi(q)^m * log^n q / (q^{(m+n)/2} log^n Q)
//     * sigma1(gcd(r, q^m)).
// Requires m <= n, m == n (mod 2), Q > 1. The predicted limit is sigma2/4 for
// (m,n) = (0,2); phi(0)/2 for (1,1) with trivial chi; 0 otherwise.
PrimeSumResult lemma_sum(long long m, long long n, const DirichletCharacter& chi,
                         const TestFunction& phi, double Q, long long r, long long N);

// Same, reusing a caller-provided prime table (must cover Q^beta).
PrimeSumResult lemma_sum(long long m, long long n, const DirichletCharacter& chi,
                         const TestFunction& phi, double Q, long long r, long long N,
                         const PrimeTable& table);

// sigma_1(gcd(r, q^m)) for prime q, computed via the q-adic valuation of r.
long long sigma1_gcd(long long r, long long q, long long m);

// Exact check of the divisor-sum identity
//   f(m) f(n) = sum over d | gcd(m,n) of d * f(m n / d^2),  f(x) = sigma1(gcd(r, x)),
// by exhaustive enumeration. Returns whether the two sides agree.
bool divisor_identity_check(long long r, long long m, long long n);

}  // namespace dlab
