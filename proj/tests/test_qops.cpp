#include <cmath>

#include "doctest.h"
#include "nmqw/qops.hpp"
#include "nmqw/walk.hpp"
#include "support.hpp"

using namespace nmqw;
using testing::random_density;
using testing::random_hermitian;
using testing::random_matrix;
using testing::random_unitary;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

ComplexMatrix sym2(double a, double b) {
  ComplexMatrix m(2, 2);
  m << a, b, b, a;
  return m;
}

}  // namespace

TEST_CASE("partial trace of a product state returns each factor") {
  const ComplexMatrix rc = random_density(2);
  const ComplexMatrix rp = random_density(3);
  const DensityMatrix rho(kron(rc, rp));
  const Split split{2, 3};
  CHECK(max_abs(partial_trace(rho, split, Subsystem::coin).matrix() - rc) < 1e-12);
  CHECK(max_abs(partial_trace(rho, split, Subsystem::position).matrix() - rp) < 1e-12);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
  const DensityMatrix bell(testing::bell_state());
  const ComplexMatrix half = 0.5 * ComplexMatrix::Identity(2, 2);
  CHECK(max_abs(partial_trace(bell, Split{2, 2}, Subsystem::coin).matrix() - half) < 1e-12);
  CHECK(max_abs(partial_trace(bell, Split{2, 2}, Subsystem::position).matrix() - half) < 1e-12);
}

TEST_CASE("coin marginal after two Hadamard steps is I/2") {
  WalkConfig cfg;
  cfg.steps = 2;
  const Lattice lattice(cfg);
  const DensityMatrix rho = DensityMatrix::from_pure(evolve_noiseless(cfg, 2));
  const ComplexMatrix rc = partial_trace(rho, lattice.split(), Subsystem::coin).matrix();
  CHECK(max_abs(rc - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("partial trace rejects a split that does not factor the dimension") {
  const DensityMatrix rho(random_density(6));
  CHECK_THROWS_AS(partial_trace(rho, Split{2, 2}, Subsystem::coin), DimensionError);
  CHECK_THROWS_AS(partial_trace(random_matrix(6, 4), Split{2, 3}, Subsystem::coin), DimensionError);
}

TEST_CASE("partial trace is linear") {
  const Split split{2, 4};
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_hermitian(8);
    const ComplexMatrix b = random_hermitian(8);
    const double alpha = testing::uniform(-2, 2);
    const double beta = testing::uniform(-2, 2);
    for (Subsystem keep : {Subsystem::coin, Subsystem::position}) {
      const ComplexMatrix lhs = partial_trace(ComplexMatrix(alpha * a + beta * b), split, keep);
      const ComplexMatrix rhs = alpha * partial_trace(a, split, keep) + beta * partial_trace(b, split, keep);
      CHECK(max_abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("hermitian eigensystem examples") {
  auto es = hermitian_eigensystem(diag2(1, 0));
  CHECK(es.values(0) == doctest::Approx(1.0));
  CHECK(std::abs(es.values(1)) < 1e-15);

  es = hermitian_eigensystem(pauli_x());
  CHECK(es.values(0) == doctest::Approx(1.0));
  CHECK(es.values(1) == doctest::Approx(-1.0));

  // a ± b for [[a, b], [b, a]]
  es = hermitian_eigensystem(sym2(0.5, 0.6));
  CHECK(std::abs(es.values(0) - 1.1) < 1e-14);
  CHECK(std::abs(es.values(1) + 0.1) < 1e-14);
}

TEST_CASE("hermitian eigensystem rejects non-Hermitian and non-square input") {
  ComplexMatrix m = sym2(0.5, 0.6);
  m(0, 1) += 1e-6;
  CHECK_THROWS_AS(hermitian_eigensystem(m), DimensionError);
  CHECK_THROWS_AS(hermitian_eigensystem(random_matrix(2, 3)), DimensionError);
}

TEST_CASE("random Hermitian eigensystems reconstruct with orthonormal vectors") {
  for (Index n : {2, 5, 17, 40}) {
    const ComplexMatrix h = random_hermitian(n);
    const auto es = hermitian_eigensystem(h);
    for (Index i = 1; i < n; ++i) CHECK(es.values(i - 1) >= es.values(i));
    const ComplexMatrix rebuilt = es.vectors * es.values.asDiagonal() * es.vectors.adjoint();
    CHECK(max_abs(h - rebuilt) <= 1e-9);
    CHECK(max_abs(es.vectors.adjoint() * es.vectors - ComplexMatrix::Identity(n, n)) <= 1e-10);
  }
}

TEST_CASE("general eigensystem of a rotation") {
  ComplexMatrix r(2, 2);
  r << 0, -1, 1, 0;
  const auto es = general_eigensystem(r);
  for (Index i = 0; i < 2; ++i) {
    CHECK(std::abs(std::abs(es.values(i)) - 1.0) < 1e-12);
    CHECK(std::abs(es.values(i).real()) < 1e-12);
    const ComplexVector v = es.vectors.col(i);
    CHECK((r * v - es.values(i) * v).norm() < 1e-12);
  }
}

TEST_CASE("von Neumann entropy examples") {
  const ComplexVector psi = testing::random_pure(5);
  CHECK(std::abs(von_neumann_entropy(DensityMatrix(psi * psi.adjoint()))) < 1e-10);
  CHECK(von_neumann_entropy(DensityMatrix(diag2(0.5, 0.5))) == doctest::Approx(1.0).epsilon(1e-14));
  const double expected = -0.75 * std::log2(0.75) - 0.25 * std::log2(0.25);
  CHECK(std::abs(von_neumann_entropy(DensityMatrix(diag2(0.75, 0.25))) - expected) < 1e-14);
  CHECK(std::abs(expected - 0.811278) < 1e-6);
}

TEST_CASE("entropy lies in [0, log2 d] and ignores tiny eigenvalues") {
  for (Index n : {2, 3, 8}) {
    const double s = von_neumann_entropy(DensityMatrix(random_density(n)));
    CHECK(s >= 0.0);
    CHECK(s <= std::log2(static_cast<double>(n)) + 1e-12);
  }
  // The 1e-13 eigenvalue is dropped; only its partner's tiny term remains.
  CHECK(von_neumann_entropy(DensityMatrix(diag2(1.0 - 1e-13, 1e-13))) <= 2e-13);
}

TEST_CASE("entropy is invariant under unitary conjugation") {
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix rho = random_density(6);
    const ComplexMatrix u = random_unitary(6);
    ComplexMatrix rotated = u * rho * u.adjoint();
    rotated = 0.5 * (rotated + rotated.adjoint()).eval();
    CHECK(std::abs(von_neumann_entropy(DensityMatrix(rho)) -
                   von_neumann_entropy(DensityMatrix(rotated, 1e-10))) < 1e-10);
  }
}

TEST_CASE("factored entropy matches the dense route") {
  for (Index rank : {1, 2, 3}) {
    const DensityMatrix rho(random_density(10, rank));
    const FactoredState f = factorize(rho);
    CHECK(f.rank() == rank);
    CHECK(max_abs(f.to_density().matrix() - rho.matrix()) < 1e-12);
    CHECK(std::abs(von_neumann_entropy(f) - von_neumann_entropy(rho)) < 1e-10);
  }
}

TEST_CASE("factorize rejects states with negative eigenvalues") {
  CHECK_THROWS_AS(factorize(DensityMatrix(sym2(0.5, 0.6))), NumericalError);
}

TEST_CASE("trace norm examples") {
  CHECK(trace_norm(ComplexMatrix::Zero(3, 3)) == 0.0);
  CHECK(trace_norm(diag2(0.5, -0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(trace_norm(sym2(0.5, 0.6)) - 1.2) < 1e-14);
  CHECK_THROWS_AS(trace_norm(random_matrix(2, 3)), DimensionError);
}

TEST_CASE("trace norm is multiplicative under Kronecker products") {
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_matrix(2, 2);
    const ComplexMatrix b = random_matrix(3, 3);
    CHECK(std::abs(trace_norm(kron(a, b)) - trace_norm(a) * trace_norm(b)) < 1e-10);
  }
}

TEST_CASE("trace norm of a Hermitian matrix is the sum of absolute eigenvalues") {
  const ComplexMatrix h = random_hermitian(7);
  const RealVector ev = hermitian_eigenvalues(h);
  Eigen::JacobiSVD<ComplexMatrix> svd(h);
  CHECK(std::abs(trace_norm(h) - ev.cwiseAbs().sum()) < 1e-10);
  CHECK(std::abs(trace_norm(h) - svd.singularValues().sum()) < 1e-10);
}

TEST_CASE("state types validate their invariants") {
  ComplexVector v = ComplexVector::Zero(2);
  v(0) = 1.0;
  CHECK_NOTHROW(PureState{v});
  v(1) = 1e-5;
  CHECK_THROWS_AS(PureState{v}, ParameterError);

  CHECK_THROWS_AS(DensityMatrix(diag2(0.6, 0.6)), ParameterError);
  ComplexMatrix m = diag2(0.5, 0.5);
  m(0, 1) = Complex(0, 0.1);
  CHECK_THROWS_AS(DensityMatrix{m}, ParameterError);
  CHECK_THROWS_AS(DensityMatrix(random_matrix(2, 3)), DimensionError);

  const DensityMatrix pure = DensityMatrix::from_pure(PureState(testing::random_pure(4)));
  CHECK(pure.purity() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pure.is_positive_semidefinite());
  CHECK_FALSE(DensityMatrix(sym2(0.5, 0.6)).is_positive_semidefinite());
}

TEST_CASE("Pauli matrices and Kronecker product") {
  CHECK(max_abs(pauli_x() * pauli_x() - ComplexMatrix::Identity(2, 2)) == 0.0);
  CHECK(max_abs(pauli_z() * pauli_x() + pauli_x() * pauli_z()) == 0.0);
  const ComplexMatrix k = kron(pauli_z(), ComplexMatrix::Identity(2, 2));
  CHECK(k(0, 0) == Complex(1));
  CHECK(k(3, 3) == Complex(-1));
  CHECK(k(0, 2) == Complex(0));
}
