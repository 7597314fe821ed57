#pragma once

#include <string>

#include "densitylab/characters.hpp"
#include "densitylab/modforms.hpp"
#include "densitylab/real.hpp"

namespace dlab {

struct CompletedLValue {
  Real value;       // completed central value (Gamma factors included)
  long long terms_used = 0;
  Real tail_bound;  // bound on the truncation remainder
};

// Central value of the completed twisted L-function via the symmetrized
// smoothed series: sum of chi(n) a(n) n^{-1/2} against incomplete-gamma
// weights at the balance parameter Y, reflected with the functional-equation
// sign. Throws a precision error naming the required table length when the
// eigenform's coefficient table is too short for the requested digits.
// terms_override > 0 forces a specific truncation length (self-consistency
// checks); the tail bound is always reported for the length actually used.
CompletedLValue completed_l(const HeckeEigenform& f, const DirichletCharacter& chi,
                            unsigned digits, double balance = 1.25,
                            long long terms_override = 0);

// Number of series terms the central-value evaluation needs for the requested
// precision (scanned from the divisor-bound envelope; no eigenvalue data used).
long long completed_l_terms_needed(long long k, long long D, unsigned digits,
                                   double balance = 1.25);

struct PeterssonNorm {
  Real value;
  std::string method;  // "direct-integration" or "sym-square"
  Real est_error;
};

// Squared Petersson norm by direct quadrature of |f|^2 y^k over the standard
// fundamental domain (unit-index normalization). Weight must be at most the
// configured cap (default 60): the integrand scale collapses beyond it.
PeterssonNorm petersson_norm_direct(const HeckeEigenform& f, unsigned digits = 50,
                                    long long weight_cap = 60);

// Squared Petersson norm via the symmetric-square series at the edge of the
// critical strip, times a proportionality constant calibrated once against
// petersson_norm_direct on the weight-12 form and then frozen. A calibration
// drift beyond 1e-8 on any one-dimensional weight is a hard error.
PeterssonNorm petersson_norm_symsq(const HeckeEigenform& f, unsigned digits = 50);

// Number of series terms the symmetric-square evaluation needs at weight k.
long long symsq_terms_needed(long long k, unsigned digits);

struct Weight {
  Real value;           // lambda_central * a(r)^2 / norm
  Real lambda_central;  // completed central value of the twist
  Real norm;            // squared Petersson norm (sym-square method)
  Real tail_bound;      // propagated truncation bound on `value`
};

// The non-harmonic family weight: central twisted L-value times |a(r)|^2 over
// the squared norm. Requires gcd(r, modulus) = 1.
Weight weight(const HeckeEigenform& f, const DirichletCharacter& chi, long long r,
              unsigned digits = 50);

}  // namespace dlab
