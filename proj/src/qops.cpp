#include "nmqw/qops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nmqw {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

void require_split(Index dim, Split split) {
  if (split.coin <= 0 || split.position <= 0 || split.total() != dim) {
    std::ostringstream os;
    os << "subsystem split " << split.coin << "x" << split.position
       << " does not factor dimension " << dim;
    throw DimensionError(os.str());
  }
}

}  // namespace

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os << "pure state is not normalised: sum |amplitude|^2 = " << norm2;
    throw ParameterError(os.str());
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix entries, double tolerance)
    : entries_(std::move(entries)) {
  require_square(entries_, "DensityMatrix");
  const double defect = hermiticity_defect(entries_);
  if (defect > tolerance) {
    std::ostringstream os;
    os << "density matrix is not Hermitian: max |M - M^dagger| = " << defect;
    throw ParameterError(os.str());
  }
  const Complex tr = entries_.trace();
  if (std::abs(tr.real() - 1.0) > tolerance || std::abs(tr.imag()) > tolerance) {
    std::ostringstream os;
    os << "density matrix trace is " << tr.real() << "+" << tr.imag() << "i, expected 1";
    throw ParameterError(os.str());
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const ComplexVector& v = psi.amplitudes();
  ComplexMatrix m = v * v.adjoint();
  // Exact Hermitian symmetry regardless of rounding in the outer product.
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m));
}

bool DensityMatrix::is_positive_semidefinite(double tolerance) const {
  return hermitian_eigenvalues(entries_).minCoeff() >= -tolerance;
}

double DensityMatrix::purity() const {
  // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
  return entries_.squaredNorm();
}

DensityMatrix FactoredState::to_density() const {
  ComplexMatrix m = factor * factor.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m));
}

FactoredState factorize(const DensityMatrix& rho, double cutoff) {
  const HermitianEigensystem es = hermitian_eigensystem(rho.matrix());
  if (es.values(es.values.size() - 1) < -kPositivityTolerance) {
    std::ostringstream os;
    os << "state is not positive semidefinite (minimum eigenvalue "
       << es.values(es.values.size() - 1) << ")";
    throw NumericalError(os.str());
  }
  Index rank = 0;
  while (rank < es.values.size() && es.values(rank) > cutoff) ++rank;
  FactoredState out;
  out.factor.resize(rho.dim(), rank);
  for (Index k = 0; k < rank; ++k) {
    out.factor.col(k) = es.vectors.col(k) * std::sqrt(es.values(k));
  }
  return out;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m) {
  require_square(m, "hermitian_eigensystem");
  const double defect = hermiticity_defect(m);
  if (defect > kEigensolverTolerance) {
    std::ostringstream os;
    os << "hermitian_eigensystem: matrix is not Hermitian (max |M - M^dagger| = " << defect << ")";
    throw DimensionError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "hermitian_eigensystem: no convergence for " << m.rows() << "x" << m.cols()
       << " matrix (max |entry| = " << max_abs(m) << ", hermiticity defect = " << defect << ")";
    throw ConvergenceError(os.str());
  }
  HermitianEigensystem out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  require_square(m, "hermitian_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "hermitian_eigenvalues: no convergence for " << m.rows() << "x" << m.cols()
       << " matrix (max |entry| = " << max_abs(m) << ")";
    throw ConvergenceError(os.str());
  }
  return solver.eigenvalues().reverse();
}

GeneralEigensystem general_eigensystem(const ComplexMatrix& m) {
  require_square(m, "general_eigensystem");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const RealVector& s = svd.singularValues();
    std::ostringstream os;
    os << "general_eigensystem: no convergence for " << m.rows() << "x" << m.cols()
       << " matrix (condition number ~ " << s(0) / s(s.size() - 1) << ")";
    throw ConvergenceError(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Split split, Subsystem keep) {
  require_square(m, "partial_trace");
  require_split(m.rows(), split);
  const Index dc = split.coin;
  const Index dp = split.position;
  if (keep == Subsystem::coin) {
    ComplexMatrix out(dc, dc);
    for (Index i = 0; i < dc; ++i) {
      for (Index j = 0; j < dc; ++j) {
        out(i, j) = m.block(i * dp, j * dp, dp, dp).trace();
      }
    }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dp, dp);
  for (Index c = 0; c < dc; ++c) out += m.block(c * dp, c * dp, dp, dp);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Split split, Subsystem keep) {
  return DensityMatrix(partial_trace(rho.matrix(), split, keep));
}

double entropy_bits(std::span<const double> probabilities) {
  double s = 0.0;
  for (double p : probabilities) {
    if (p > kEntropyCutoff) s -= p * std::log2(p);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const RealVector ev = hermitian_eigenvalues(rho.matrix());
  return entropy_bits(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

double von_neumann_entropy(const FactoredState& rho) {
  if (rho.rank() == 0) return 0.0;
  ComplexMatrix gram = rho.factor.adjoint() * rho.factor;
  gram = 0.5 * (gram + gram.adjoint()).eval();
  const RealVector ev = hermitian_eigenvalues(gram);
  return entropy_bits(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

double trace_norm(const ComplexMatrix& m) {
  require_square(m, "trace_norm");
  if (m.size() == 0) return 0.0;
  if (hermiticity_defect(m) <= kHermitianTolerance * std::max(1.0, max_abs(m))) {
    return hermitian_eigenvalues(0.5 * (m + m.adjoint())).cwiseAbs().sum();
  }
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace nmqw
