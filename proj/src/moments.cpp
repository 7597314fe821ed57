#include "densitylab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace dlab {

namespace {

constexpr const char* kDegenerateMsg =
    "family weights are degenerate: the total weight does not resolve above "
    "1000 times the largest truncation tail";

Real pow_int(Real base, long long e) {
  Real out(1);
  while (e > 0) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

Real real_factorial(long long n) {
  Real out(1);
  for (long long i = 2; i <= n; ++i) out *= i;
  return out;
}

long long sigma1_of(long long g) {
  long long s = 0;
  for (long long d = 1; d <= g; ++d)
    if (g % d == 0) s += d;
  return s;
}

// Coefficient-table length that covers every consumer at the requested
// precision: the central-value series, the norm series, the eigenform
// construction itself, and the shift index.
long long auto_table_size(long long k, long long D, unsigned digits, long long r) {
  const long long dim = dim_cusp(k);
  long long M = k + 10;
  M = std::max(M, completed_l_terms_needed(k, D, digits));
  M = std::max(M, symsq_terms_needed(k, digits));
  M = std::max(M, 3 * dim + 3);
  M = std::max(M, dim + 10);
  M = std::max(M, r + 1);
  return M;
}

// Eigenform systems are expensive to split at high precision and are reused
// across every statistic at the same weight, so cache them per
// (weight, table length, digits).
const std::vector<HeckeEigenform>& memo_eigenforms(long long k, long long M,
                                                   unsigned digits) {
  static std::map<std::tuple<long long, long long, unsigned>,
                  std::vector<HeckeEigenform>>
      cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(k, M, digits);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, eigenforms(k, M, digits)).first;
  return it->second;
}

}  // namespace

FamilySnapshot build_family(long long k, const DirichletCharacter& chi, long long r,
                            const FamilyOptions& opts) {
  if (opts.digits < 10)
    throw std::invalid_argument("working precision must be at least 10 digits");
  if (r < 1) throw std::invalid_argument("shift index must be at least 1");
  if (std::gcd(r, chi.modulus()) != 1)
    throw std::invalid_argument(
        "gcd(r, D) exceeds 1; the shift must be coprime to the modulus");
  if (k < 2 || k % 2 != 0)
    throw std::invalid_argument("weight must be a positive even integer");
  if (dim_cusp(k) < 1)
    throw std::invalid_argument("the cusp space at weight " + std::to_string(k) +
                                " is empty; no family exists");
  if (fe_sign(chi, k) < 0 && !opts.allow_vanishing_sign)
    throw std::invalid_argument(
        "fe_sign is -1 for this weight/character pair, so "
        "every family weight vanishes; set allow_vanishing_sign to build the "
        "degenerate family anyway");

  const long long M = opts.table_size > 0
                          ? opts.table_size
                          : auto_table_size(k, chi.modulus(), opts.digits, r);

  FamilySnapshot F{k, 1, chi, r, {}, {}, 0.0, Real(0), Real(0), false};
  F.forms = memo_eigenforms(k, M, opts.digits);
  F.Q = static_cast<double>(k) * static_cast<double>(k) * static_cast<double>(F.N);

  PrecisionGuard guard(opts.digits + 20);
  F.total_weight = Real(0);
  F.max_tail = Real(0);
  F.weights.reserve(F.forms.size());
  for (const auto& f : F.forms) {
    Weight w = weight(f, chi, r, opts.digits);
    F.total_weight += w.value;
    if (w.tail_bound > F.max_tail) F.max_tail = w.tail_bound;
    F.weights.push_back(std::move(w));
  }
  F.degenerate = !(F.total_weight > 1000 * F.max_tail);
  return F;
}

Real weighted_average_eigenvalue(const FamilySnapshot& F, long long m) {
  if (m < 1) throw std::invalid_argument("eigenvalue index must be at least 1");
  if (F.forms.empty()) throw std::invalid_argument("family holds no forms");
  if (F.degenerate) throw std::invalid_argument(kDegenerateMsg);
  for (const auto& f : F.forms)
    if (f.table_size() < m)
      throw std::invalid_argument(
          "coefficient table too short for the eigenvalue average: need " +
          std::to_string(m) + " entries, have " + std::to_string(f.table_size()));

  PrecisionGuard guard(F.total_weight.precision() + 10);
  Real acc(0);
  for (std::size_t i = 0; i < F.forms.size(); ++i)
    acc += F.weights[i].value * F.forms[i].lambda(m);
  return acc / F.total_weight;
}

Real trace_main_term(long long m, const DirichletCharacter& chi, long long r) {
  if (m < 1) throw std::invalid_argument("coefficient index must be at least 1");
  if (r < 1) throw std::invalid_argument("shift index must be at least 1");
  const long long g = std::gcd(r, m);
  return Real(chi(m)) * Real(sigma1_of(g)) / sqrt(Real(m));
}

KrSumResult kr_sum_formula(long long k, const DirichletCharacter& chi, long long r,
                           long long m, const FamilyOptions& opts) {
  if (m < 1) throw std::invalid_argument("coefficient index must be at least 1");
  FamilyOptions o = opts;
  const long long base = o.table_size > 0
                             ? o.table_size
                             : auto_table_size(k, chi.modulus(), o.digits, r);
  o.table_size = std::max(base, m);
  const FamilySnapshot F = build_family(k, chi, r, o);

  PrecisionGuard guard(o.digits + 20);
  Real lhs(0);
  for (std::size_t i = 0; i < F.forms.size(); ++i)
    lhs += F.weights[i].lambda_central * F.forms[i].a(r) * F.forms[i].a(m) /
           F.weights[i].norm;

  const long long D = chi.modulus();
  const Real pi = real_pi();
  const Real prefactor = pow_int(Real(2), k - 1) * pow_int(2 * pi, k / 2 - 1) *
                         real_factorial(k / 2 - 1) / real_factorial(k - 2);
  const long long s1 = sigma1_of(std::gcd(r, m));
  Real main = prefactor * (1 + fe_sign(chi, k)) *
              pow_int(Real(r) * Real(m), k / 2 - 1) * chi(r * m) * s1;
  Real env = pow_int(4 * pi * Real(r) * Real(m), k - 1) / real_factorial(k - 2) *
             pow(Real(D), Real(k - 1) / 2);
  const bool below = env >= abs(main);
  return {std::move(lhs), std::move(main), std::move(env), below};
}

DensityReport one_level_density(const FamilySnapshot& F, const TestFunction& phi) {
  if (F.forms.empty()) throw std::invalid_argument("family holds no forms");
  if (F.degenerate) throw std::invalid_argument(kDegenerateMsg);
  if (!(F.Q > 1.0))
    throw std::invalid_argument("family conductor must exceed 1");

  const double beta = phi.beta();
  const double logQ = std::log(F.Q);
  const long long pmax =
      std::max<long long>(1, static_cast<long long>(std::floor(std::pow(F.Q, beta))));
  for (const auto& f : F.forms)
    if (f.table_size() < pmax)
      throw std::invalid_argument(
          "coefficient table too short for the density sum: need " +
          std::to_string(pmax) + " entries, have " +
          std::to_string(f.table_size()));

  const PrimeTable table(pmax + 1);
  const auto& primes = table.primes();
  const auto& logs = table.logs();

  PrecisionGuard guard(F.total_weight.precision() + 10);
  DensityReport rep;
  rep.per_form.reserve(F.forms.size());
  Real wavg(0);
  Real second(0);
  const Real base_value = Real(phi.hat0()) + Real(phi.phi0()) / 2;
  for (std::size_t i = 0; i < F.forms.size(); ++i) {
    const auto& f = F.forms[i];
    Real s1(0);
    Real s2(0);
    for (std::size_t j = 0; j < primes.size(); ++j) {
      const long long p = primes[j];
      const double lp = logs[j];
      const double y1 = lp / logQ;
      if (y1 < beta) {
        const double c1 = phi.phi_hat(y1) * lp / (std::sqrt(static_cast<double>(p)) * logQ);
        if (c1 != 0.0) s1 += f.lambda(p) * c1;
      }
      const double y2 = 2.0 * lp / logQ;
      const long long psq = p * p;
      if (y2 < beta && psq <= pmax) {
        const double c2 = phi.phi_hat(y2) * lp / (static_cast<double>(p) * logQ);
        if (c2 != 0.0) s2 += f.lambda(psq) * c2;
      }
    }
    Real d = base_value - 2 * s1 - 2 * s2;
    wavg += F.weights[i].value * d;
    second += F.weights[i].value * abs(2 * s2);
    rep.per_form.push_back(std::move(d));
  }
  rep.weighted_average = wavg / F.total_weight;
  rep.second_order = second / F.total_weight;
  rep.predicted_average = F.chi.is_trivial() ? phi.hat0() - phi.phi0() / 2
                                             : phi.hat0() + phi.phi0() / 2;
  return rep;
}

MomentReport centered_moment(const std::vector<FamilySnapshot>& ladder,
                             const TestFunction& phi, long long n) {
  if (n < 1) throw std::invalid_argument("moment order must be at least 1");
  if (!check_support(phi, n))
    throw std::invalid_argument(
        "support bound violated: the order-" + std::to_string(n) +
        " centered moment requires the Fourier support half-width to satisfy "
        "beta < 1/(2n); the test function has beta = " +
        std::to_string(phi.beta()));
  if (ladder.empty()) throw std::invalid_argument("family ladder is empty");

  double predicted = 0.0;
  if (n % 2 == 0) {
    double dfact = 1.0;
    for (long long i = n - 1; i >= 1; i -= 2) dfact *= static_cast<double>(i);
    predicted = dfact * std::pow(phi.sigma2(), static_cast<double>(n / 2));
  }

  MomentReport report;
  report.n = n;
  report.rows.reserve(ladder.size());
  for (const auto& F : ladder) {
    const DensityReport rep = one_level_density(F, phi);
    PrecisionGuard guard(F.total_weight.precision() + 10);
    Real mom(0);
    for (std::size_t i = 0; i < F.forms.size(); ++i) {
      const Real dev = rep.per_form[i] - rep.weighted_average;
      Real power(1);
      for (long long t = 0; t < n; ++t) power *= dev;
      mom += F.weights[i].value * power;
    }
    mom /= F.total_weight;
    Real residual = abs(mom - Real(predicted));
    report.rows.push_back({F.k, F.Q, rep.weighted_average, rep.predicted_average,
                           std::move(mom), predicted, std::move(residual),
                           rep.second_order});
  }

  report.monotone_trend = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (!(report.rows[i].residual < report.rows[i - 1].residual)) {
      report.monotone_trend = false;
      break;
    }
  return report;
}

EnvelopeReport error_envelope_check(const TestFunction& phi, long long n,
                                    const std::vector<long long>& k_ladder,
                                    long long N) {
  if (n < 1) throw std::invalid_argument("moment order must be at least 1");
  if (N < 1) throw std::invalid_argument("level must be at least 1");
  if (k_ladder.empty()) throw std::invalid_argument("weight ladder is empty");

  const double beta = phi.beta();
  EnvelopeReport report;
  report.rows.reserve(k_ladder.size());
  for (const long long k : k_ladder) {
    if (k < 2)
      throw std::invalid_argument("weights in the ladder must be at least 2");
    const double Q = static_cast<double>(k) * static_cast<double>(k) *
                     static_cast<double>(N);
    const double exponent =
        static_cast<double>(n) * static_cast<double>(k) * beta / 2.0 -
        static_cast<double>(n) * beta + static_cast<double>(n);
    const double log_value = exponent * std::log(Q) -
                             0.5 * static_cast<double>(k - 1) *
                                 std::log(static_cast<double>(N)) -
                             (static_cast<double>(k) / 2.0 - 1.0) *
                                 std::log(static_cast<double>(k));
    report.rows.push_back({k, log_value});
  }
  report.decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (!(report.rows[i].log_value < report.rows[i - 1].log_value)) {
      report.decreasing = false;
      break;
    }
  return report;
}

}  // namespace dlab
