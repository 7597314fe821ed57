#pragma once

#include <vector>

#include "densitylab/combinatorics.hpp"
#include "densitylab/real.hpp"

namespace dlab {

// Exact integer q-series of a weight-k cusp form, coefficients a(1..M).
struct QExpansion {
  long long weight = 0;
  long long precision = 0;  // M, the number of stored coefficients
  std::vector<Int> coeffs;  // coeffs[i] = a(i+1)

  const Int& a(long long n) const;  // 1 <= n <= precision
};

// Dimension of the space of level-one cusp forms of even weight k.
long long dim_cusp(long long k);

// Echelonized exact basis of the weight-k cusp space: a_{f_i}(j) = delta_{ij}
// for indices up to the dimension, built from exact Eisenstein series and the
// discriminant form. Requires M >= dim + 10.
std::vector<QExpansion> victor_miller_basis(long long k, long long M);

// Exact matrix of the n-th Hecke operator in the echelon basis.
struct HeckeMatrix {
  long long weight = 0;
  long long operator_index = 0;
  std::vector<std::vector<Int>> entries;  // dim x dim
};

HeckeMatrix hecke_matrix(long long k, long long n, const std::vector<QExpansion>& basis);

// Numerical simultaneous eigenvector of the Hecke action, normalized a(1) = 1.
struct HeckeEigenform {
  long long weight = 0;
  std::vector<Real> fourier;  // a(n), n = 1..M (index 0 is n = 1)
  std::vector<Real> eigen;    // lambda(n) = a(n) * n^{-(k-1)/2}
  Real residual;              // max eigen-equation defect at working precision

  long long table_size() const { return static_cast<long long>(fourier.size()); }
  const Real& a(long long n) const;
  const Real& lambda(long long n) const;
};

// All eigenforms of weight k with coefficient tables of length M, computed at
// the given working precision (decimal digits). Deterministic order: sorted by
// ascending a(2). Degenerate operator spectra are split by mixing in the next
// Hecke operator; an unresolvable cluster raises an error.
std::vector<HeckeEigenform> eigenforms(long long k, long long M, unsigned digits = 50);

}  // namespace dlab
