#include "densitylab/rmt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

namespace rmt_detail {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t stream_index) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream_index + 1);
  s[0] = splitmix64(x);
  s[1] = splitmix64(x);
  s[2] = splitmix64(x);
  s[3] = splitmix64(x);
  if ((s[0] | s[1] | s[2] | s[3]) == 0) s[0] = 1;
}

std::uint64_t Stream::next_u64() {
  const std::uint64_t result = rotl64(s[1] * 5, 7) * 9;
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl64(s[3], 45);
  return result;
}

double Stream::next_unit() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::next_gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::acos(-1.0) * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

std::complex<double> Stream::next_cgauss() {
  const double inv_sqrt2 = 0.70710678118654752440;
  const double re = next_gauss() * inv_sqrt2;
  const double im = next_gauss() * inv_sqrt2;
  return {re, im};
}

}  // namespace rmt_detail

namespace {

using rmt_detail::Stream;

const double kPi = std::acos(-1.0);

// Angles of a Haar unitary sample, in [0, 2*pi), sorted.
std::vector<double> unitary_angles(int size, Stream& st) {
  Eigen::MatrixXcd A(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) A(i, j) = st.next_cgauss();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
  Eigen::MatrixXcd Q = qr.householderQ();
  const Eigen::MatrixXcd& QR = qr.matrixQR();
  for (int j = 0; j < size; ++j) {
    const std::complex<double> d = QR(j, j);
    const double ad = std::abs(d);
    Q.col(j) *= (ad > 0.0 ? d / ad : std::complex<double>(1.0, 0.0));
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Q, false);
  std::vector<double> angles(size);
  for (int i = 0; i < size; ++i) {
    double th = std::arg(es.eigenvalues()[i]);
    if (th < 0.0) th += 2.0 * kPi;
    if (th >= 2.0 * kPi) th -= 2.0 * kPi;
    angles[i] = th;
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

// Haar sample of the full orthogonal group: eigenvalues plus the sign of the
// determinant. `force_special` right-translates a determinant -1 draw into
// the special subgroup.
Eigen::VectorXcd orthogonal_eigenvalues(int size, Stream& st, bool force_special,
                                        bool& det_minus) {
  Eigen::MatrixXd A(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) A(i, j) = st.next_gauss();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd& QR = qr.matrixQR();
  for (int j = 0; j < size; ++j)
    if (QR(j, j) < 0.0) Q.col(j) = -Q.col(j);
  det_minus = Q.determinant() < 0.0;
  if (force_special && det_minus) {
    Q.col(0) = -Q.col(0);
    det_minus = false;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(Q, false);
  return es.eigenvalues();
}

// Haar sample of the unitary-symplectic group of even dimension `size`:
// Gram-Schmidt over Gaussian vectors, closed under the antiunitary partner
// map w -> -J conj(w), whose pairing makes the matrix symplectic.
Eigen::VectorXcd symplectic_eigenvalues(int size, Stream& st) {
  const int half = size / 2;
  Eigen::MatrixXcd U(size, size);
  for (int j = 0; j < half; ++j) {
    Eigen::VectorXcd w(size);
    for (int i = 0; i < size; ++i) w(i) = st.next_cgauss();
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        w -= U.col(i) * (U.col(i).adjoint() * w);
        w -= U.col(half + i) * (U.col(half + i).adjoint() * w);
      }
    }
    const double nrm = w.norm();
    if (!(nrm > 1e-8))
      throw std::logic_error("symplectic orthonormalization collapsed");
    w /= nrm;
    U.col(j) = w;
    for (int i = 0; i < half; ++i) {
      U(i, half + j) = -std::conj(w(half + i));
      U(half + i, half + j) = std::conj(w(i));
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(U, false);
  return es.eigenvalues();
}

// Turn a conjugate-symmetric spectrum into the stored angle list: snap the
// forced angles exactly, match each conjugate pair within tolerance, and emit
// the non-negative representative twice.
std::vector<double> fold_conjugate_angles(const Eigen::VectorXcd& ev,
                                          int forced_zero, int forced_pi) {
  std::vector<double> raw(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) raw[i] = std::arg(ev[i]);

  std::vector<double> out;
  out.reserve(raw.size());
  for (int f = 0; f < forced_zero; ++f) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < raw.size(); ++i)
      if (std::abs(raw[i]) < std::abs(raw[best])) best = i;
    raw.erase(raw.begin() + static_cast<std::ptrdiff_t>(best));
    out.push_back(0.0);
  }
  for (int f = 0; f < forced_pi; ++f) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < raw.size(); ++i)
      if (std::abs(raw[i]) > std::abs(raw[best])) best = i;
    raw.erase(raw.begin() + static_cast<std::ptrdiff_t>(best));
    out.push_back(kPi);
  }

  std::vector<double> pos;
  std::vector<double> neg;
  for (const double th : raw)
    (th < 0.0 ? neg : pos).push_back(std::abs(th));
  if (pos.size() != neg.size())
    throw std::logic_error("eigenangle pairing failed: unpaired spectrum of " +
                           std::to_string(pos.size()) + " vs " +
                           std::to_string(neg.size()));
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (std::abs(pos[i] - neg[i]) > 1e-8)
      throw std::logic_error("conjugate eigenangle pair mismatch beyond 1e-8");
    const double avg = 0.5 * (pos[i] + neg[i]);
    out.push_back(avg);
    out.push_back(avg);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate_ensemble(GroupTag group, int size) {
  if (size < 2) throw std::invalid_argument("matrix size must be at least 2");
  switch (group) {
    case GroupTag::SOEven:
      if (size % 2 != 0)
        throw std::invalid_argument("the even special-orthogonal ensemble needs an even size");
      break;
    case GroupTag::SOOdd:
      if (size % 2 != 1)
        throw std::invalid_argument("the odd special-orthogonal ensemble needs an odd size");
      break;
    case GroupTag::Sp:
      if (size % 2 != 0)
        throw std::invalid_argument("the symplectic ensemble needs an even size");
      break;
    default:
      break;
  }
}

EigenangleSample sample_impl(GroupTag group, int size, std::uint64_t seed,
                             std::uint64_t stream_index) {
  validate_ensemble(group, size);

  Stream st(seed, stream_index);
  EigenangleSample sample;
  sample.group = group;
  sample.size = size;
  sample.seed = seed;

  if (group == GroupTag::U) {
    sample.angles = unitary_angles(size, st);
  } else if (group == GroupTag::Sp) {
    sample.angles = fold_conjugate_angles(symplectic_eigenvalues(size, st), 0, 0);
  } else {
    bool det_minus = false;
    const bool force_special = (group != GroupTag::O);
    const Eigen::VectorXcd ev =
        orthogonal_eigenvalues(size, st, force_special, det_minus);
    int forced_zero = 0;
    int forced_pi = 0;
    if (det_minus) {
      forced_pi = 1;
      if (size % 2 == 0) forced_zero = 1;
    } else if (size % 2 == 1) {
      forced_zero = 1;
    }
    sample.angles = fold_conjugate_angles(ev, forced_zero, forced_pi);
  }

  if (static_cast<int>(sample.angles.size()) != size)
    throw std::logic_error("sample produced " + std::to_string(sample.angles.size()) +
                           " angles for size " + std::to_string(size));
  return sample;
}

}  // namespace

EigenangleSample sample_haar(GroupTag group, int size, std::uint64_t seed) {
  return sample_impl(group, size, seed, 0);
}

double density_statistic(const EigenangleSample& s, const TestFunction& phi) {
  if (s.size < 1 || s.angles.empty())
    throw std::invalid_argument("empty eigenangle sample");
  const double scale = static_cast<double>(s.size) / (2.0 * kPi);
  double total = 0.0;
  for (const double th : s.angles) {
    const double wrapped = th > kPi ? th - 2.0 * kPi : th;
    total += phi.phi(scale * wrapped);
  }
  return total;
}

RmtMomentEstimate centered_moment_mc(GroupTag group, int size, const TestFunction& phi,
                                     long long n, long long samples,
                                     std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("moment order must be at least 1");
  if (samples < 1000) throw std::invalid_argument("need at least 1000 samples");
  // Reject bad ensembles here: an exception thrown inside the parallel
  // sampling loop could not propagate out of it.
  validate_ensemble(group, size);

  std::vector<double> values(static_cast<std::size_t>(samples));
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < samples; ++i) {
    const EigenangleSample s =
        sample_impl(group, size, seed, static_cast<std::uint64_t>(i));
    values[static_cast<std::size_t>(i)] = density_statistic(s, phi);
  }

  long double mean_acc = 0.0L;
  for (const double v : values) mean_acc += v;
  const double mean = static_cast<double>(mean_acc / static_cast<long double>(samples));

  long double moment_acc = 0.0L;
  for (const double v : values) {
    long double p = 1.0L;
    for (long long t = 0; t < n; ++t) p *= (v - mean);
    moment_acc += p;
  }
  const double estimate =
      static_cast<double>(moment_acc / static_cast<long double>(samples));

  long double var_acc = 0.0L;
  for (const double v : values) {
    long double p = 1.0L;
    for (long long t = 0; t < n; ++t) p *= (v - mean);
    const long double d = p - estimate;
    var_acc += d * d;
  }
  const double sd = std::sqrt(
      static_cast<double>(var_acc / static_cast<long double>(samples - 1)));

  RmtMomentEstimate est;
  est.n = n;
  est.estimate = estimate;
  est.std_error = sd / std::sqrt(static_cast<double>(samples));
  est.samples = samples;
  return est;
}

}  // namespace dlab
