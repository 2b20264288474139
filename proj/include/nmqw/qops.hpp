#pragma once

// Dense complex linear algebra and quantum-state primitives.
//
// Composite states are always ordered coin (first factor) ⊗ position (second
// factor): the basis index of |c⟩|x⟩ is c·d_p + x.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

#include "nmqw/errors.hpp"

namespace nmqw {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;
inline constexpr double kEigensolverTolerance = 1e-10;
inline constexpr double kDegeneracyGap = 1e-9;
// Eigenvalues at or below this contribute nothing to an entropy.
inline constexpr double kEntropyCutoff = 1e-12;

enum class Subsystem { coin, position };

// Dimensions of a bipartite coin ⊗ position space.
struct Split {
  Index coin = 2;
  Index position = 1;

  Index total() const { return coin * position; }
  Index dim(Subsystem s) const { return s == Subsystem::coin ? coin : position; }
  friend bool operator==(const Split&, const Split&) = default;
};

/// Normalised state vector.
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes);

  Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

 private:
  ComplexVector amplitudes_;
};

/// Hermitian, unit-trace matrix.
///
/// The constructor checks Hermiticity and trace. Positivity costs a full
/// diagonalisation and is only guaranteed for states produced by completely
/// positive evolution; query it with is_positive_semidefinite().
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix entries, double tolerance = kNormTolerance);

  static DensityMatrix from_pure(const PureState& psi);

  Index dim() const { return entries_.rows(); }
  const ComplexMatrix& matrix() const { return entries_; }

  bool is_positive_semidefinite(double tolerance = kPositivityTolerance) const;
  double purity() const;

 private:
  ComplexMatrix entries_;
};

/// ρ = F·F† with F of shape n×r. Entropy-type quantities are computed from
/// the r×r Gram matrix F†F, which shares the nonzero spectrum of ρ.
struct FactoredState {
  ComplexMatrix factor;

  Index dim() const { return factor.rows(); }
  Index rank() const { return factor.cols(); }
  DensityMatrix to_density() const;
};

// Factor a state through its eigendecomposition, dropping eigenvalues below
// `cutoff`. Throws NumericalError when an eigenvalue is below -kPositivityTolerance.
FactoredState factorize(const DensityMatrix& rho, double cutoff = 1e-14);

struct HermitianEigensystem {
  RealVector values;      // descending
  ComplexMatrix vectors;  // orthonormal columns
};

struct GeneralEigensystem {
  ComplexVector values;
  ComplexMatrix vectors;
};

HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m);
RealVector hermitian_eigenvalues(const ComplexMatrix& m);
GeneralEigensystem general_eigensystem(const ComplexMatrix& m);

double max_abs(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Reduced matrix of the `keep` factor. Works on any square matrix of size
// split.total(), which lets non-positive intermediate results through.
ComplexMatrix partial_trace(const ComplexMatrix& m, Split split, Subsystem keep);
DensityMatrix partial_trace(const DensityMatrix& rho, Split split, Subsystem keep);

// Shannon entropy in bits of a spectrum; entries ≤ kEntropyCutoff are dropped.
double entropy_bits(std::span<const double> probabilities);
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const FactoredState& rho);

double trace_norm(const ComplexMatrix& m);

ComplexMatrix pauli_x();
ComplexMatrix pauli_z();

}  // namespace nmqw
