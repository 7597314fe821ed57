#include "densitylab/combinatorics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dlab {

Int factorial(long long n) {
  if (n < 0) throw std::invalid_argument("factorial: n must be >= 0");
  Int r = 1;
  for (long long i = 2; i <= n; ++i) r *= i;
  return r;
}

Int double_factorial(long long n) {
  if (n < -1) throw std::invalid_argument("double_factorial: n must be >= -1");
  Int r = 1;
  for (long long i = n; i >= 2; i -= 2) r *= i;
  return r;
}

Int binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Int r = 1;
  for (long long i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;  // exact: product of i consecutive integers is divisible by i!
  }
  return r;
}

PowerExpansionCoeffs power_coeffs(long long n) {
  if (n < 0) throw std::invalid_argument("power_coeffs: n must be >= 0");
  PowerExpansionCoeffs out;
  out.n = n;
  for (long long m = n % 2; m <= n; m += 2) {
    long long j = (n - m) / 2;
    out.coeffs[m] = binomial(n, j) - binomial(n, j - 1);
  }
  return out;
}

Composition::Composition(long long total, std::vector<long long> p) : t(total), parts(std::move(p)) {
  if (parts.empty()) throw std::invalid_argument("Composition: needs at least one part");
  long long sum = 0;
  for (long long nj : parts) {
    if (nj < 1) throw std::invalid_argument("Composition: every part must be >= 1");
    sum += nj;
  }
  if (sum != t) throw std::invalid_argument("Composition: parts must sum to t");
}

Rat multinomial_factor(const Composition& c) {
  Int denom = factorial(static_cast<long long>(c.parts.size()));
  for (long long nj : c.parts) denom *= factorial(nj);
  return Rat(factorial(c.t), denom);
}

Rat tuple_count_oracle(long long t, const std::map<long long, long long>& prime_multiset) {
  if (prime_multiset.empty()) throw std::invalid_argument("tuple_count_oracle: empty multiset");
  std::vector<long long> primes, mult;
  long long sum = 0;
  for (const auto& [p, n] : prime_multiset) {
    if (n < 1) throw std::invalid_argument("tuple_count_oracle: multiplicities must be >= 1");
    primes.push_back(p);
    mult.push_back(n);
    sum += n;
  }
  if (sum != t) throw std::invalid_argument("tuple_count_oracle: multiplicities must sum to t");

  const std::size_t ell = primes.size();
  Int count = 0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(t), 0);
  // Odometer over all ell^t ordered tuples of indices into the distinct primes.
  while (true) {
    std::vector<long long> seen(ell, 0);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) ++seen[idx[pos]];
    bool match = true;
    for (std::size_t j = 0; j < ell; ++j) {
      if (seen[j] != mult[j]) {
        match = false;
        break;
      }
    }
    if (match) ++count;
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == ell) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == idx.size()) break;
  }
  return Rat(count, factorial(static_cast<long long>(ell)));
}

Rat gaussian_moment(long long n, const Rat& variance) {
  if (n < 0) throw std::invalid_argument("gaussian_moment: n must be >= 0");
  if (variance < 0) throw std::invalid_argument("gaussian_moment: variance must be >= 0");
  if (n % 2 == 1) return 0;
  Rat v = 1;
  for (long long i = 0; i < n / 2; ++i) v *= variance;
  return Rat(double_factorial(n - 1)) * v;
}

Rat frakC(long long n, const Rat& phi0, const Rat& sigma2) {
  if (n < 0) throw std::invalid_argument("frakC: n must be >= 0");
  auto pow_rat = [](const Rat& base, long long e) {
    Rat r = 1;
    for (long long i = 0; i < e; ++i) r *= base;
    return r;
  };
  const Rat half_phi0 = phi0 / 2;
  const Rat quarter_sigma2 = sigma2 / 4;
  Rat total = 0;
  for (long long t = 0; t <= n; ++t) {
    Rat inner = 0;
    for (long long s = 0; s <= t / 2; ++s) {
      Rat block = Rat(factorial(t), factorial(t - s) * pow_rat(Rat(2), s)) *
                  Rat(binomial(t - s, s));
      inner += block * pow_rat(half_phi0, t - 2 * s) * pow_rat(quarter_sigma2, s);
    }
    Rat sign = (t % 2 == 0) ? Rat(1) : Rat(-1);
    total += Rat(binomial(n, t)) * sign * pow_rat(Rat(2), t) * pow_rat(phi0, n - t) * inner;
  }
  return total;
}

namespace {

std::vector<long long> primes_up_to(long long cutoff) {
  std::vector<long long> out;
  for (long long p = 2; p <= cutoff; ++p) {
    bool prime = true;
    for (long long d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(p);
  }
  return out;
}

// Fixed positive rational stand-in for the slowly varying per-prime weight.
// Values roughly track the natural log but any positive rationals work: the
// identities audited below are structural, not analytic.
Rat surrogate_weight(long long p) {
  switch (p) {
    case 2: return Rat(7, 10);
    case 3: return Rat(11, 10);
    case 5: return Rat(8, 5);
    case 7: return Rat(39, 20);
    default: break;
  }
  return Rat(2 * p + 1, p + 1);
}

Rat sigma1_int(long long n) {
  Rat s = 0;
  for (long long d = 1; d <= n; ++d)
    if (n % d == 0) s += d;
  return s;
}

Rat pow_ll(long long base, long long e) {
  Rat r = 1;
  for (long long i = 0; i < e; ++i) r *= base;
  return r;
}

Rat pow_rat(const Rat& base, long long e) {
  Rat r = 1;
  for (long long i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

SwitchCheckResult switch_check(long long ell,
                               const std::vector<std::pair<long long, long long>>& exponent_pairs,
                               long long prime_cutoff) {
  if (ell < 2) throw std::invalid_argument("switch_check: ell must be >= 2");
  if (static_cast<long long>(exponent_pairs.size()) != ell)
    throw std::invalid_argument("switch_check: need exactly ell exponent pairs");
  for (const auto& [nj, mj] : exponent_pairs) {
    if (nj < 1 || mj < 1)
      throw std::invalid_argument("switch_check: exponents must be >= 1");
  }
  std::vector<long long> primes = primes_up_to(prime_cutoff);
  if (primes.empty()) throw std::invalid_argument("switch_check: no primes below cutoff");

  const std::size_t np = primes.size();
  const std::size_t L = static_cast<std::size_t>(ell);

  // factor[j][i] = surrogate term for block j evaluated at prime i:
  //   w_p^{n_j} * sigma_1(p^{m_j}) / p^{n_j + m_j}
  std::vector<std::vector<Rat>> factor(L, std::vector<Rat>(np));
  for (std::size_t j = 0; j < L; ++j) {
    const auto [nj, mj] = exponent_pairs[j];
    for (std::size_t i = 0; i < np; ++i) {
      long long p = primes[i];
      long long qm = 1;
      for (long long e = 0; e < mj; ++e) qm *= p;
      factor[j][i] = pow_rat(surrogate_weight(p), nj) * sigma1_int(qm) / pow_ll(p, nj + mj);
    }
  }

  std::vector<Rat> block_sum(L, Rat(0));
  for (std::size_t j = 0; j < L; ++j)
    for (std::size_t i = 0; i < np; ++i) block_sum[j] += factor[j][i];

  SwitchCheckResult res;
  res.rhs = 1;
  for (std::size_t j = 0; j < L; ++j) res.rhs *= block_sum[j];

  // Enumerate all np^L ordered prime tuples once, splitting by distinctness.
  res.lhs = 0;
  res.coincidence_sum = 0;
  std::vector<std::size_t> idx(L, 0);
  while (true) {
    Rat term = 1;
    for (std::size_t j = 0; j < L; ++j) term *= factor[j][idx[j]];
    bool distinct = true;
    for (std::size_t a = 0; a < L && distinct; ++a)
      for (std::size_t b = a + 1; b < L; ++b)
        if (idx[a] == idx[b]) {
          distinct = false;
          break;
        }
    if (distinct)
      res.lhs += term;
    else
      res.coincidence_sum += term;
    std::size_t pos = 0;
    while (pos < L && ++idx[pos] == np) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == L) break;
  }

  // Over-count: for each unordered block pair force a shared prime, leave the
  // other blocks unconstrained. Multi-coincidence tuples are counted once per
  // coinciding pair, hence ">=" and strictly ">" once ell >= 3.
  res.pair_bound = 0;
  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = a + 1; b < L; ++b) {
      Rat pair_sum = 0;
      for (std::size_t i = 0; i < np; ++i) pair_sum += factor[a][i] * factor[b][i];
      Rat rest = 1;
      for (std::size_t j = 0; j < L; ++j)
        if (j != a && j != b) rest *= block_sum[j];
      res.pair_bound += pair_sum * rest;
    }
  }

  res.identity_holds = (res.rhs - res.lhs == res.coincidence_sum);
  res.bound_holds = (res.coincidence_sum <= res.pair_bound);
  res.bound_strict = (res.coincidence_sum < res.pair_bound);
  return res;
}

}  // namespace dlab
