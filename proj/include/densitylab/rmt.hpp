#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "densitylab/testfuncs.hpp"

namespace dlab {

// Eigenangles of one Haar-distributed matrix. All `size` angles are stored:
// for the unitary group they lie in [0, 2*pi); for the orthogonal and
// symplectic groups each conjugate pair contributes its non-negative
// representative twice, structural angles (0 or pi) appear exactly, and the
// list is sorted ascending.
struct EigenangleSample {
  GroupTag group = GroupTag::U;
  int size = 0;
  std::vector<double> angles;
  std::uint64_t seed = 0;
};

// Haar-distributed sample via Gaussian-matrix orthonormalization with the
// mandatory diagonal phase/sign correction; the symplectic group uses the
// quaternionic construction; odd special-orthogonal samples carry the forced
// eigenvalue at angle zero. Deterministic in (group, size, seed).
EigenangleSample sample_haar(GroupTag group, int size, std::uint64_t seed);

// Sum of phi(size * theta / (2 pi)) over all stored eigenangles, with angles
// above pi wrapped to their signed equivalents (phi is even, so wrapping only
// matters for the unitary convention).
double density_statistic(const EigenangleSample& s, const TestFunction& phi);

struct RmtMomentEstimate {
  long long n = 0;
  double estimate = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(samples)
  long long samples = 0;
};

// Monte-Carlo n-th centered moment of the density statistic across
// independent Haar samples. Sampling is parallel with one counter-based RNG
// stream per sample index, and the reduction is a serial fold in index order,
// so results are identical for any thread count.
RmtMomentEstimate centered_moment_mc(GroupTag group, int size, const TestFunction& phi,
                                     long long n, long long samples, std::uint64_t seed);

namespace rmt_detail {
// Counter-based per-stream RNG: a 64-bit mix of (seed, stream) seeds a small
// xoshiro state; exposed for tests of stream independence and determinism.
struct Stream {
  std::uint64_t s[4];
  explicit Stream(std::uint64_t seed, std::uint64_t stream_index);
  std::uint64_t next_u64();
  double next_unit();               // uniform in (0, 1)
  double next_gauss();              // standard normal (Box-Muller, cached pair)
  std::complex<double> next_cgauss();  // complex standard normal (variance 1)

 private:
  bool have_spare_ = false;
  double spare_ = 0.0;
};
}  // namespace rmt_detail

}  // namespace dlab
