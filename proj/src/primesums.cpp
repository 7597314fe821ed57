#include "densitylab/primesums.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dlab {

std::vector<long long> PrimeTable::reference_sieve(long long cutoff) {
  std::vector<long long> out;
  if (cutoff < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(cutoff) + 1, false);
  for (long long p = 2; p <= cutoff; ++p) {
    if (composite[static_cast<std::size_t>(p)]) continue;
    out.push_back(p);
    for (long long q = p * p; q <= cutoff; q += p) composite[static_cast<std::size_t>(q)] = true;
  }
  return out;
}

PrimeTable::PrimeTable(long long cutoff) : cutoff_(cutoff) {
  if (cutoff < 2) {
    return;
  }
  // Base primes up to sqrt(cutoff), then segments sieved independently.
  long long root = static_cast<long long>(std::sqrt(static_cast<double>(cutoff))) + 2;
  while (root * root > cutoff + 1) --root;
  std::vector<long long> base = reference_sieve(std::max<long long>(root + 1, 3));

  const long long segment = 1 << 20;
  long long first = std::min<long long>(base.empty() ? 2 : base.back() + 1, cutoff + 1);
  std::vector<long long> head;
  for (long long p : base)
    if (p <= cutoff) head.push_back(p);

  long long span = cutoff - first + 1;
  std::size_t nseg = span > 0 ? static_cast<std::size_t>((span + segment - 1) / segment) : 0;
  std::vector<std::vector<long long>> found(nseg);

#pragma omp parallel for schedule(dynamic)
  for (long long s = 0; s < static_cast<long long>(nseg); ++s) {
    long long lo = first + s * segment;
    long long hi = std::min(cutoff, lo + segment - 1);
    std::vector<bool> composite(static_cast<std::size_t>(hi - lo + 1), false);
    for (long long p : base) {
      long long start = std::max(p * p, ((lo + p - 1) / p) * p);
      for (long long q = start; q <= hi; q += p) composite[static_cast<std::size_t>(q - lo)] = true;
    }
    auto& seg_out = found[static_cast<std::size_t>(s)];
    for (long long q = lo; q <= hi; ++q)
      if (!composite[static_cast<std::size_t>(q - lo)]) seg_out.push_back(q);
  }

  primes_ = std::move(head);
  for (auto& seg_out : found)
    primes_.insert(primes_.end(), seg_out.begin(), seg_out.end());
  logs_.resize(primes_.size());
  for (std::size_t i = 0; i < primes_.size(); ++i)
    logs_[i] = std::log(static_cast<double>(primes_[i]));
}

long long sigma1_gcd(long long r, long long q, long long m) {
  if (q < 2) throw std::invalid_argument("sigma1_gcd: q must be a prime >= 2");
  if (m < 0) throw std::invalid_argument("sigma1_gcd: m must be >= 0");
  if (r < 1) throw std::invalid_argument("sigma1_gcd: r must be >= 1");
  // gcd(r, q^m) = q^min(m, v_q(r)); sum the divisor ladder of that power.
  long long v = 0;
  long long rr = r;
  while (rr % q == 0 && v < m) {
    rr /= q;
    ++v;
  }
  long long sum = 1, power = 1;
  for (long long e = 0; e < v; ++e) {
    power *= q;
    sum += power;
  }
  return sum;
}

namespace {

long long sigma1(long long n) {
  long long s = 0;
  for (long long d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    s += d;
    if (d != n / d) s += n / d;
  }
  return s;
}

}  // namespace

bool divisor_identity_check(long long r, long long m, long long n) {
  if (m < 1 || n < 1) throw std::invalid_argument("divisor_identity_check: m, n must be >= 1");
  if (r < 1) throw std::invalid_argument("divisor_identity_check: r must be >= 1");
  long long lhs = sigma1(std::gcd(r, m)) * sigma1(std::gcd(r, n));
  long long g = std::gcd(m, n);
  long long rhs = 0;
  for (long long d = 1; d <= g; ++d) {
    if (g % d != 0) continue;
    rhs += d * sigma1(std::gcd(r, (m / d) * (n / d)));
  }
  return lhs == rhs;
}

PrimeSumResult lemma_sum(long long m, long long n, const DirichletCharacter& chi,
                         const TestFunction& phi, double Q, long long r, long long N,
                         const PrimeTable& table) {
  if (m > n || ((m + n) % 2) != 0 || m < 0)
    throw std::invalid_argument("lemma_sum: need 0 <= m <= n with m == n (mod 2)");
  if (!(Q > 1.0)) throw std::invalid_argument("lemma_sum: Q must be > 1");
  double logQ = std::log(Q);
  double x_cut = std::pow(Q, phi.beta());
  if (static_cast<double>(table.cutoff()) < x_cut)
    throw std::invalid_argument("lemma_sum: prime table does not cover the support cutoff");

  const auto& primes = table.primes();
  const auto& logs = table.logs();
  std::size_t count = static_cast<std::size_t>(
      std::upper_bound(primes.begin(), primes.end(), static_cast<long long>(x_cut)) -
      primes.begin());

  // Deterministic blocked reduction: per-block partial sums are accumulated
  // serially in block order, so the result is independent of thread count.
  const std::size_t block = 4096;
  const std::size_t nblocks = (count + block - 1) / block;
  std::vector<double> partial(nblocks, 0.0);
  const long long half = (m + n) / 2;

#pragma omp parallel for schedule(static)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    std::size_t lo = static_cast<std::size_t>(b) * block;
    std::size_t hi = std::min(count, lo + block);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      long long q = primes[i];
      if (N % q == 0) continue;  // primes dividing the level are excluded
      double w = phi.phi_hat(logs[i] / logQ);
      if (w == 0.0) continue;
      int cq = chi(q);
      double char_factor = 1.0;
      if (m > 0) {
        if (cq == 0) continue;
        char_factor = (cq < 0 && (m % 2) == 1) ? -1.0 : 1.0;
      }
      double term = char_factor * std::pow(w * logs[i] / logQ, static_cast<double>(n)) /
                    std::pow(static_cast<double>(q), static_cast<double>(half)) *
                    static_cast<double>(sigma1_gcd(r, q, m));
      acc += term;
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }

  double value = 0.0;
  for (double p : partial) value += p;

  double predicted = 0.0;
  if (m == 0 && n == 2) {
    predicted = phi.sigma2() / 4.0;
  } else if (m == 1 && n == 1 && chi.is_trivial()) {
    predicted = phi.phi0() / 2.0;
  }
  PrimeSumResult res;
  res.Q = Q;
  res.value = value;
  res.predicted_limit = predicted;
  res.deviation = std::abs(value - predicted);
  return res;
}

PrimeSumResult lemma_sum(long long m, long long n, const DirichletCharacter& chi,
                         const TestFunction& phi, double Q, long long r, long long N) {
  double x_cut = std::pow(Q, phi.beta());
  PrimeTable table(static_cast<long long>(x_cut) + 2);
  return lemma_sum(m, n, chi, phi, Q, r, N, table);
}

}  // namespace dlab
