#include "densitylab/modforms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dlab {

namespace {

// Truncated integer power series indexed by the exponent of q, 0..M.
using Series = std::vector<Int>;

Series series_mul(const Series& a, const Series& b, long long M) {
  Series c(static_cast<std::size_t>(M) + 1);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long j = 0; j <= M; ++j) {
    Int acc = 0;
    long long lo = std::max<long long>(0, j - (static_cast<long long>(b.size()) - 1));
    long long hi = std::min<long long>(j, static_cast<long long>(a.size()) - 1);
    for (long long i = lo; i <= hi; ++i)
      acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j - i)];
    c[static_cast<std::size_t>(j)] = acc;
  }
  return c;
}

Series series_pow(const Series& a, long long e, long long M) {
  Series result(static_cast<std::size_t>(M) + 1);
  result[0] = 1;
  Series base = a;
  while (e > 0) {
    if (e & 1) result = series_mul(result, base, M);
    e >>= 1;
    if (e > 0) base = series_mul(base, base, M);
  }
  return result;
}

// Power-sum divisor function sigma_e(n) for n = 1..M, sieved over multiples.
std::vector<Int> sigma_table(long long e, long long M) {
  std::vector<Int> t(static_cast<std::size_t>(M) + 1);
  for (long long d = 1; d <= M; ++d) {
    Int de = 1;
    for (long long i = 0; i < e; ++i) de *= d;
    for (long long n = d; n <= M; n += d) t[static_cast<std::size_t>(n)] += de;
  }
  return t;
}

Series eisenstein4(long long M) {
  auto s3 = sigma_table(3, M);
  Series e(static_cast<std::size_t>(M) + 1);
  e[0] = 1;
  for (long long n = 1; n <= M; ++n)
    e[static_cast<std::size_t>(n)] = 240 * s3[static_cast<std::size_t>(n)];
  return e;
}

Series eisenstein6(long long M) {
  auto s5 = sigma_table(5, M);
  Series e(static_cast<std::size_t>(M) + 1);
  e[0] = 1;
  for (long long n = 1; n <= M; ++n)
    e[static_cast<std::size_t>(n)] = -504 * s5[static_cast<std::size_t>(n)];
  return e;
}

Series discriminant_form(long long M, const Series& e4, const Series& e6,
                         const Series& e4cubed) {
  Series e6sq = series_mul(e6, e6, M);
  (void)e4;
  Series delta(static_cast<std::size_t>(M) + 1);
  for (long long n = 0; n <= M; ++n) {
    Int num = e4cubed[static_cast<std::size_t>(n)] - e6sq[static_cast<std::size_t>(n)];
    Int q, rem;
    boost::multiprecision::divide_qr(num, Int(1728), q, rem);
    if (rem != 0) throw std::logic_error("discriminant series: non-integral coefficient");
    delta[static_cast<std::size_t>(n)] = q;
  }
  return delta;
}

}  // namespace

const Int& QExpansion::a(long long n) const {
  if (n < 1 || n > precision)
    throw std::invalid_argument("QExpansion: coefficient index out of range");
  return coeffs[static_cast<std::size_t>(n - 1)];
}

long long dim_cusp(long long k) {
  if (k % 2 != 0) throw std::invalid_argument("dim_cusp: weight must be even");
  if (k < 12) return 0;
  long long d = k / 12;
  if (k % 12 == 2) d -= 1;
  return d;
}

std::vector<QExpansion> victor_miller_basis(long long k, long long M) {
  if (k % 2 != 0 || k < 12)
    throw std::invalid_argument("victor_miller_basis: empty space (weight must be even, >= 12)");
  long long d = dim_cusp(k);
  if (d == 0)
    throw std::invalid_argument("victor_miller_basis: empty space (dimension 0 at weight " +
                                std::to_string(k) + ")");
  if (M < d + 10)
    throw std::invalid_argument("victor_miller_basis: need precision M >= dim + 10");

  // All rows share one parity class: 4a + 6b = k - 12i with b constant in i.
  long long b = (k % 4 == 0) ? 0 : 1;
  auto a_exp = [&](long long i) { return (k - 6 * b - 12 * i) / 4; };
  if (a_exp(d) < 0 || (k - 6 * b - 12 * d) % 4 != 0)
    throw std::logic_error("victor_miller_basis: exponent bookkeeping failed");

  Series e4 = eisenstein4(M);
  Series e6 = eisenstein6(M);
  Series e4cubed = series_mul(series_mul(e4, e4, M), e4, M);
  Series delta = discriminant_form(M, e4, e6, e4cubed);

  std::vector<Series> delta_powers(static_cast<std::size_t>(d));
  delta_powers[0] = delta;
  for (long long i = 2; i <= d; ++i)
    delta_powers[static_cast<std::size_t>(i - 1)] =
        series_mul(delta_powers[static_cast<std::size_t>(i - 2)], delta, M);

  // h = E4^{a_i} E6^b built from the top index down by multiplying E4^3 in.
  std::vector<Series> rows(static_cast<std::size_t>(d));
  Series h = series_pow(e4, a_exp(d), M);
  if (b == 1) h = series_mul(h, e6, M);
  for (long long i = d; i >= 1; --i) {
    rows[static_cast<std::size_t>(i - 1)] =
        series_mul(delta_powers[static_cast<std::size_t>(i - 1)], h, M);
    if (i > 1) h = series_mul(h, e4cubed, M);
  }

  // Echelonize so row i has coefficient delta_{ij} at q^j for j <= d.
  for (long long i = 1; i <= d; ++i) {
    auto& fi = rows[static_cast<std::size_t>(i - 1)];
    if (fi[static_cast<std::size_t>(i)] != 1)
      throw std::logic_error("victor_miller_basis: leading coefficient is not 1");
    for (long long l = 1; l <= d; ++l) {
      if (l == i) continue;
      auto& fl = rows[static_cast<std::size_t>(l - 1)];
      Int factor = fl[static_cast<std::size_t>(i)];
      if (factor == 0) continue;
      for (long long n = i; n <= M; ++n)
        fl[static_cast<std::size_t>(n)] -= factor * fi[static_cast<std::size_t>(n)];
    }
  }

  std::vector<QExpansion> out;
  out.reserve(static_cast<std::size_t>(d));
  for (long long i = 1; i <= d; ++i) {
    if (rows[static_cast<std::size_t>(i - 1)][0] != 0)
      throw std::logic_error("victor_miller_basis: constant term on a cusp form");
    QExpansion qe;
    qe.weight = k;
    qe.precision = M;
    qe.coeffs.assign(rows[static_cast<std::size_t>(i - 1)].begin() + 1,
                     rows[static_cast<std::size_t>(i - 1)].end());
    out.push_back(std::move(qe));
  }
  return out;
}

HeckeMatrix hecke_matrix(long long k, long long n, const std::vector<QExpansion>& basis) {
  if (basis.empty()) throw std::invalid_argument("hecke_matrix: empty basis");
  if (n < 1) throw std::invalid_argument("hecke_matrix: operator index must be >= 1");
  long long d = static_cast<long long>(basis.size());
  long long needed = n * d + n;
  if (basis.front().precision < needed)
    throw std::invalid_argument("hecke_matrix: basis precision " +
                                std::to_string(basis.front().precision) +
                                " is below the required " + std::to_string(needed));
  HeckeMatrix H;
  H.weight = k;
  H.operator_index = n;
  H.entries.assign(static_cast<std::size_t>(d), std::vector<Int>(static_cast<std::size_t>(d)));
  // Coefficient of q^j in the image of f under the n-th operator:
  // sum over d0 | gcd(n, j) of d0^{k-1} a_f(n j / d0^2).
  for (long long i = 0; i < d; ++i) {
    for (long long j = 1; j <= d; ++j) {
      Int acc = 0;
      long long g = std::gcd(n, j);
      for (long long d0 = 1; d0 <= g; ++d0) {
        if (g % d0 != 0) continue;
        Int scale = 1;
        for (long long e = 0; e < k - 1; ++e) scale *= d0;
        acc += scale * basis[static_cast<std::size_t>(i)].a(n * j / (d0 * d0));
      }
      H.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)] = acc;
    }
  }
  return H;
}

namespace {

// ---- exact characteristic polynomial (returns monic, high-to-low)

std::vector<Int> char_poly(const std::vector<std::vector<Int>>& A) {
  const long long d = static_cast<long long>(A.size());
  auto trace = [&](const std::vector<std::vector<Int>>& X) {
    Int t = 0;
    for (long long i = 0; i < d; ++i)
      t += X[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    return t;
  };
  std::vector<std::vector<Int>> M(A);
  std::vector<Int> coeff(static_cast<std::size_t>(d) + 1);
  coeff[0] = 1;
  Int c = -trace(M);
  coeff[1] = c;
  for (long long step = 2; step <= d; ++step) {
    std::vector<std::vector<Int>> B(M);
    for (long long i = 0; i < d; ++i)
      B[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += c;
    std::vector<std::vector<Int>> next(static_cast<std::size_t>(d),
                                       std::vector<Int>(static_cast<std::size_t>(d)));
    for (long long i = 0; i < d; ++i)
      for (long long j = 0; j < d; ++j) {
        Int acc = 0;
        for (long long l = 0; l < d; ++l)
          acc += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] *
                 B[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
        next[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
      }
    M = std::move(next);
    Int t = trace(M);
    Int q, rem;
    boost::multiprecision::divide_qr(t, Int(step), q, rem);
    if (rem != 0) throw std::logic_error("char_poly: non-integral trace division");
    c = -q;
    coeff[static_cast<std::size_t>(step)] = c;
  }
  return coeff;
}

// ---- primitive integer polynomials (low-to-high) for Sturm counting

using IPoly = std::vector<Int>;  // p[i] multiplies x^i

void trim(IPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

IPoly derivative(const IPoly& p) {
  IPoly d;
  for (std::size_t i = 1; i < p.size(); ++i)
    d.push_back(p[i] * Int(static_cast<long long>(i)));
  trim(d);
  return d;
}

void primitivize(IPoly& p) {
  Int g = 0;
  for (const Int& c : p) g = boost::multiprecision::gcd(g, c);
  if (g > 1)
    for (Int& c : p) c /= g;
}

// Division remainder up to a positive scalar (signs preserved).
IPoly positive_scaled_rem(IPoly a, const IPoly& b) {
  trim(a);
  if (b.empty()) throw std::logic_error("positive_scaled_rem: zero divisor");
  Int lead = b.back();
  Int lead_abs = lead < 0 ? Int(-lead) : lead;
  const bool lead_negative = lead < 0;
  while (!a.empty() && a.size() >= b.size()) {
    Int top = a.back();
    std::size_t shift = a.size() - b.size();
    for (Int& c : a) c *= lead_abs;
    for (std::size_t i = 0; i < b.size(); ++i) {
      Int sub = top * b[i];
      if (lead_negative) sub = -sub;
      a[shift + i] -= sub;
    }
    trim(a);
    primitivize(a);
  }
  return a;
}

int eval_sign(const IPoly& p, const Rat& x) {
  Rat acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + Rat(p[i]);
  return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
}

std::vector<IPoly> sturm_chain(IPoly p) {
  primitivize(p);
  std::vector<IPoly> chain;
  chain.push_back(p);
  IPoly d = derivative(p);
  primitivize(d);
  chain.push_back(std::move(d));
  while (chain.back().size() > 1) {
    IPoly r = positive_scaled_rem(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (Int& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  return chain;
}

long long sign_changes(const std::vector<IPoly>& chain, const Rat& x) {
  long long changes = 0;
  int prev = 0;
  for (const auto& p : chain) {
    if (p.empty()) continue;
    int s = eval_sign(p, x);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

struct Interval {
  Rat lo, hi;  // in the rescaled variable; roots counted in (lo, hi]
};

// Isolates the real roots of the monic-scale integer polynomial P after the
// substitution x = s * t (s a positive integer power of two chosen so all
// roots satisfy |t| < 1). Returns x-scale intervals.
std::vector<Interval> isolate_real_roots(const IPoly& P, const Int& s, long long expected) {
  IPoly Q(P.size());
  Int spow = 1;
  for (std::size_t i = 0; i < P.size(); ++i) {
    Q[i] = P[i] * spow;
    spow *= s;
  }
  primitivize(Q);
  std::vector<IPoly> chain = sturm_chain(Q);

  std::vector<Interval> work{{Rat(-1), Rat(1)}};
  std::vector<Interval> done;
  while (!work.empty()) {
    Interval iv = work.back();
    work.pop_back();
    long long cnt = sign_changes(chain, iv.lo) - sign_changes(chain, iv.hi);
    if (cnt <= 0) continue;
    if (cnt == 1) {
      done.push_back(iv);
      continue;
    }
    Rat mid = (iv.lo + iv.hi) / 2;
    work.push_back({iv.lo, mid});
    work.push_back({mid, iv.hi});
  }
  if (static_cast<long long>(done.size()) != expected)
    throw std::logic_error("eigenvalue isolation found " + std::to_string(done.size()) +
                           " real roots, expected " + std::to_string(expected));
  for (auto& iv : done) {
    for (int step = 0; step < 140; ++step) {
      Rat mid = (iv.lo + iv.hi) / 2;
      long long left = sign_changes(chain, iv.lo) - sign_changes(chain, mid);
      if (left == 1)
        iv.hi = mid;
      else
        iv.lo = mid;
    }
  }
  std::sort(done.begin(), done.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  Rat scale(s);
  for (auto& iv : done) {
    iv.lo *= scale;
    iv.hi *= scale;
  }
  return done;
}

Real eval_poly(const IPoly& p, const Real& x) {
  Real acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + Real(p[i]);
  return acc;
}

bool squarefree_poly(const IPoly& p) {
  IPoly a = p, b = derivative(p);
  while (!b.empty()) {
    IPoly r = positive_scaled_rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a.size() <= 1;
}

unsigned digits_of(const Int& v) {
  Int a = v < 0 ? Int(-v) : v;
  unsigned n = 1;
  while (a >= 10) {
    a /= 10;
    ++n;
  }
  return n;
}

}  // namespace

const Real& HeckeEigenform::a(long long n) const {
  if (n < 1 || n > table_size())
    throw std::invalid_argument("HeckeEigenform: coefficient index " + std::to_string(n) +
                                " outside table of length " + std::to_string(table_size()));
  return fourier[static_cast<std::size_t>(n - 1)];
}

const Real& HeckeEigenform::lambda(long long n) const {
  if (n < 1 || n > table_size())
    throw std::invalid_argument("HeckeEigenform: eigenvalue index " + std::to_string(n) +
                                " outside table of length " + std::to_string(table_size()));
  return eigen[static_cast<std::size_t>(n - 1)];
}

std::vector<HeckeEigenform> eigenforms(long long k, long long M, unsigned digits) {
  long long d = dim_cusp(k);
  if (d == 0)
    throw std::invalid_argument("eigenforms: empty space at weight " + std::to_string(k));
  if (M < 2) throw std::invalid_argument("eigenforms: table length must be >= 2");
  long long basis_M = std::max({M, 3 * d + 3, d + 10});
  std::vector<QExpansion> basis = victor_miller_basis(k, basis_M);

  HeckeMatrix T2 = hecke_matrix(k, 2, basis);
  std::vector<std::vector<Int>> A = T2.entries;

  auto to_ipoly = [](const std::vector<Int>& monic) {
    IPoly p(monic.rbegin(), monic.rend());
    trim(p);
    return p;
  };
  IPoly P = to_ipoly(char_poly(A));
  if (!squarefree_poly(P)) {
    // Degenerate spectrum: mix in the next operator until eigenvalues split.
    HeckeMatrix T3 = hecke_matrix(k, 3, basis);
    bool resolved = false;
    for (long long c = 1; c <= 3 && !resolved; ++c) {
      std::vector<std::vector<Int>> mix(A);
      for (long long i = 0; i < d; ++i)
        for (long long j = 0; j < d; ++j)
          mix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
              T2.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
              c * T3.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      IPoly Pm = to_ipoly(char_poly(mix));
      if (squarefree_poly(Pm)) {
        A = std::move(mix);
        P = std::move(Pm);
        resolved = true;
      }
    }
    if (!resolved)
      throw std::runtime_error("eigenforms: could not separate the Hecke spectrum");
  }

  // Scale so all eigenvalues land in (-1, 1): a power of two above the
  // row-sum bound on the spectral radius.
  Int row_bound = 1;
  for (long long i = 0; i < d; ++i) {
    Int rs = 0;
    for (long long j = 0; j < d; ++j) {
      const Int& e = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      rs += e < 0 ? Int(-e) : e;
    }
    if (rs > row_bound) row_bound = rs;
  }
  Int s = 2;
  while (s <= row_bound) s *= 2;

  std::vector<Interval> intervals = isolate_real_roots(P, s, d);

  unsigned coeff_digits = 1;
  for (const Int& c : P) coeff_digits = std::max(coeff_digits, digits_of(c));
  unsigned work_digits = digits + 40 + coeff_digits;
  PrecisionGuard guard(work_digits);

  IPoly Pd = derivative(P);
  std::vector<HeckeEigenform> out;
  for (const Interval& iv : intervals) {
    Real x = Real(Rat((iv.lo + iv.hi) / 2));
    Real tol = pow(Real(10), -static_cast<long long>(digits + 25)) * (1 + abs(x));
    for (int it = 0; it < 200; ++it) {
      Real fx = eval_poly(P, x);
      Real dfx = eval_poly(Pd, x);
      if (dfx == 0) throw std::runtime_error("eigenforms: Newton hit a critical point");
      Real step = fx / dfx;
      x -= step;
      if (abs(step) <= tol) break;
    }
    const Real theta = x;

    // Coordinates of the eigenform in the echelon basis: left null vector of
    // (A - theta I), i.e. null vector of the transpose, via full pivoting.
    std::vector<std::vector<Real>> B(static_cast<std::size_t>(d),
                                     std::vector<Real>(static_cast<std::size_t>(d)));
    for (long long i = 0; i < d; ++i)
      for (long long j = 0; j < d; ++j)
        B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            Real(A[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) -
            (i == j ? theta : Real(0));

    std::vector<long long> pivot_row, pivot_col;
    std::vector<bool> row_used(static_cast<std::size_t>(d), false);
    std::vector<bool> col_used(static_cast<std::size_t>(d), false);
    for (long long step = 0; step < d - 1; ++step) {
      long long pr = -1, pc = -1;
      Real best = 0;
      for (long long i = 0; i < d; ++i) {
        if (row_used[static_cast<std::size_t>(i)]) continue;
        for (long long j = 0; j < d; ++j) {
          if (col_used[static_cast<std::size_t>(j)]) continue;
          Real v = abs(B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
          if (v > best) {
            best = v;
            pr = i;
            pc = j;
          }
        }
      }
      if (pr < 0 || best == 0)
        throw std::runtime_error("eigenforms: rank deficiency above one in eigenvector solve");
      row_used[static_cast<std::size_t>(pr)] = true;
      col_used[static_cast<std::size_t>(pc)] = true;
      pivot_row.push_back(pr);
      pivot_col.push_back(pc);
      for (long long i = 0; i < d; ++i) {
        if (row_used[static_cast<std::size_t>(i)]) continue;
        Real factor = B[static_cast<std::size_t>(i)][static_cast<std::size_t>(pc)] /
                      B[static_cast<std::size_t>(pr)][static_cast<std::size_t>(pc)];
        if (factor == 0) continue;
        for (long long j = 0; j < d; ++j)
          B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
              factor * B[static_cast<std::size_t>(pr)][static_cast<std::size_t>(j)];
        B[static_cast<std::size_t>(i)][static_cast<std::size_t>(pc)] = 0;
      }
    }
    long long free_col = -1;
    for (long long j = 0; j < d; ++j)
      if (!col_used[static_cast<std::size_t>(j)]) free_col = j;

    std::vector<Real> v(static_cast<std::size_t>(d), Real(0));
    v[static_cast<std::size_t>(free_col)] = 1;
    for (long long bstep = static_cast<long long>(pivot_row.size()) - 1; bstep >= 0; --bstep) {
      long long i = pivot_row[static_cast<std::size_t>(bstep)];
      long long j = pivot_col[static_cast<std::size_t>(bstep)];
      Real acc = 0;
      for (long long l = 0; l < d; ++l) {
        if (l == j) continue;
        acc += B[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] *
               v[static_cast<std::size_t>(l)];
      }
      v[static_cast<std::size_t>(j)] =
          -acc / B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    // The first coordinate is a(1), nonzero for an eigenform — but its
    // legitimate size relative to the largest coordinate shrinks like
    // dim^{-(k-1)/2}, so test it against the numerical noise floor of the
    // solve (work_digits includes the coefficient growth) rather than the
    // requested output precision.
    Real vmax = 0;
    for (const auto& c : v) {
      Real a = abs(c);
      if (a > vmax) vmax = a;
    }
    if (vmax == 0 ||
        abs(v[0]) < pow(Real(10), -static_cast<long long>(work_digits - 20)) * vmax)
      throw std::runtime_error("eigenforms: eigenvector has vanishing first coordinate");
    Real lead = v[0];
    for (auto& c : v) c /= lead;

    Real resid = 0;
    for (long long i = 0; i < d; ++i) {
      Real acc = -theta * v[static_cast<std::size_t>(i)];
      for (long long j = 0; j < d; ++j)
        acc += Real(A[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) *
               v[static_cast<std::size_t>(j)];
      Real a = abs(acc);
      if (a > resid) resid = a;
    }
    Real scale_ref = Real(1) + abs(theta);

    HeckeEigenform f;
    f.weight = k;
    f.residual = resid / scale_ref;
    f.fourier.resize(static_cast<std::size_t>(M));
    f.eigen.resize(static_cast<std::size_t>(M));
    Real half_shift = (Real(k) - 1) / 2;
    for (long long n = 1; n <= M; ++n) {
      Real acc = 0;
      for (long long i = 0; i < d; ++i)
        acc += v[static_cast<std::size_t>(i)] * Real(basis[static_cast<std::size_t>(i)].a(n));
      f.fourier[static_cast<std::size_t>(n - 1)] = acc;
      f.eigen[static_cast<std::size_t>(n - 1)] = acc * pow(Real(n), -half_shift);
    }
    out.push_back(std::move(f));
  }

  std::sort(out.begin(), out.end(), [](const HeckeEigenform& x, const HeckeEigenform& y) {
    return x.fourier[1] < y.fourier[1];
  });
  return out;
}

}  // namespace dlab
