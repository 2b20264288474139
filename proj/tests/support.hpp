#pragma once

#include <random>

#include "nmqw/noise.hpp"
#include "nmqw/qops.hpp"

namespace testing {

using nmqw::ComplexMatrix;
using nmqw::ComplexVector;
using nmqw::Index;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline ComplexMatrix random_matrix(Index rows, Index cols) {
  std::normal_distribution<double> n;
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = {n(rng()), n(rng())};
  return m;
}

inline ComplexMatrix random_hermitian(Index n) {
  const ComplexMatrix a = random_matrix(n, n);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_unitary(Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(n, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

inline ComplexVector random_pure(Index n) {
  ComplexVector v = random_matrix(n, 1);
  return v / v.norm();
}

// Random mixed state of the given rank.
inline ComplexMatrix random_density(Index n, Index rank = -1) {
  if (rank < 0) rank = n;
  const ComplexMatrix g = random_matrix(n, rank);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline ComplexMatrix bell_state() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v * v.adjoint();
}

// RTN whose kernel vanishes at t_zero: with (2a/γ)² − 1 = 3 the first zero
// sits at ω̃t = 2π/3.
inline nmqw::RtnParams rtn_with_zero_at(double t_zero) {
  const double omega = 2.0 * nmqw::kPi / (3.0 * t_zero);
  const double gamma = omega / std::sqrt(3.0);
  return {gamma, gamma};
}

}  // namespace testing
