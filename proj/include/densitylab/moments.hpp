#pragma once

#include <vector>

#include "densitylab/characters.hpp"
#include "densitylab/lvalues.hpp"
#include "densitylab/modforms.hpp"
#include "densitylab/primesums.hpp"
#include "densitylab/testfuncs.hpp"

namespace dlab {

struct FamilyOptions {
  unsigned digits = 50;            // working precision for weights and tables
  long long table_size = 0;        // coefficient table length; 0 = auto
  bool allow_vanishing_sign = false;  // admit families whose weights all vanish
};

// A weight-k family: all eigenforms with their weights, plus the conductor
// scale used by every density statistic.
struct FamilySnapshot {
  long long k = 0;
  long long N = 1;
  DirichletCharacter chi;
  long long r = 1;
  std::vector<HeckeEigenform> forms;
  std::vector<Weight> weights;
  double Q = 0.0;       // analytic conductor k^2 N
  Real total_weight;
  Real max_tail;
  bool degenerate = false;  // total weight below the tail-bound floor
};

// Builds the weight-k family for (chi, r). Rejects sign -1 configurations
// (all weights forced to vanish) unless allow_vanishing_sign is set; rejects
// empty spaces. Requires gcd(r, modulus) = 1.
FamilySnapshot build_family(long long k, const DirichletCharacter& chi, long long r,
                            const FamilyOptions& opts = {});

// Weighted family average of lambda(m). Error on a degenerate family.
Real weighted_average_eigenvalue(const FamilySnapshot& F, long long m);

// Closed-form large-k limit of the weighted average:
//   m^{-1/2} * prod chi(q_j)^{m_j} * sigma1(gcd(r, m)).
Real trace_main_term(long long m, const DirichletCharacter& chi, long long r);

struct KrSumResult {
  Real lhs;            // directly summed weighted coefficient average
  Real main;           // closed-form main term
  Real err_envelope;   // error-term shape with unit constant
  bool below_crossover = false;  // envelope not yet below the main-term scale
};

// Direct evaluation of the weighted coefficient sum against its closed-form
// main term, with the error-term envelope reported alongside.
KrSumResult kr_sum_formula(long long k, const DirichletCharacter& chi, long long r,
                           long long m, const FamilyOptions& opts = {});

struct DensityReport {
  std::vector<Real> per_form;     // density value for each form
  Real weighted_average;
  Real second_order;              // weighted magnitude of the prime-square block
  double predicted_average = 0.0; // closed-form family prediction
};

// One-level density of each form through the explicit formula, truncated
// exactly by the Fourier support, plus the weighted family average.
DensityReport one_level_density(const FamilySnapshot& F, const TestFunction& phi);

struct MomentRow {
  long long k = 0;
  double Q = 0.0;
  Real avg_density;
  double predicted_avg = 0.0;
  Real moment;
  double predicted_moment = 0.0;
  Real residual;      // |moment - predicted_moment|
  Real second_order;  // reported magnitude of the prime-square block
};

struct MomentReport {
  long long n = 0;
  std::vector<MomentRow> rows;
  bool monotone_trend = false;  // residuals strictly decreasing along the ladder
};

// n-th weighted centered moment of the one-level density along a ladder of
// families. Requires the support bound beta < 1/(2n) (hard error otherwise).
MomentReport centered_moment(const std::vector<FamilySnapshot>& ladder,
                             const TestFunction& phi, long long n);

struct EnvelopeRow {
  long long k = 0;
  double log_value = 0.0;  // natural log of the envelope
};

struct EnvelopeReport {
  std::vector<EnvelopeRow> rows;
  bool decreasing = false;
};

// Error-term envelope  Q^{n k beta/2 - n beta + n} / (N^{(k-1)/2} k^{k/2-1})
// with unit leading constant, evaluated along the weight ladder.
EnvelopeReport error_envelope_check(const TestFunction& phi, long long n,
                                    const std::vector<long long>& k_ladder,
                                    long long N = 1);

}  // namespace dlab
