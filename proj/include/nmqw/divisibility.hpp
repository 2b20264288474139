#pragma once

// Intermediate maps E(t₂, t₁) = E(t₂, 0)·E⁻¹(t₁, 0) of the dephasing channels.
//
// For a dephasing kernel k the intermediate map scales coin coherences by
// r = k(t₂)/k(t₁). Its Choi matrix is built on the unnormalised
// |Φ⁺⟩ = |00⟩ + |11⟩, so the spectrum is {0, 0, 1 − r, 1 + r}; divide by 2 to
// compare with normalised conventions.

#include <array>
#include <span>
#include <vector>

#include "nmqw/noise.hpp"
#include "nmqw/qops.hpp"

namespace nmqw {

inline constexpr double kInvertibilityThreshold = 1e-14;
inline constexpr double kCpTolerance = 1e-12;

struct KernelRatio {
  double value = 1.0;  // k(t₂)/k(t₁)
  double t1 = 0.0;
  double t2 = 0.0;
};

struct SignedKraus {
  ComplexMatrix op;
  int sign = 1;  // +1 or −1
};

// Operator-sum (all signs +1) or operator-sum-difference representation.
using SignedKrausSet = std::vector<SignedKraus>;

// Throws NonInvertibleMapError when |k(t₁)| ≤ 1e-14, ParameterError unless t₂ > t₁ ≥ 0.
KernelRatio kernel_ratio(const NoiseModel& noise, double t1, double t2);

// 4×4 unnormalised Choi matrix; trace 2.
ComplexMatrix intermediate_choi(const KernelRatio& r);

// (λ₁, λ₂, λ₃, λ₄) = (0, 0, 1 − r, 1 + r)
std::array<double, 4> choi_eigenvalues(const KernelRatio& r);

bool is_completely_positive(const KernelRatio& r);

// K± = √(|1 ± r|/2)·diag(1, ±1); the operator paired with a negative Choi
// eigenvalue carries sign −1.
SignedKrausSet intermediate_kraus(const KernelRatio& r);

// max |Σ sign·K†K − I|
double completeness_defect(const SignedKrausSet& ks);

// Σ sign·K ρ K†
ComplexMatrix apply_signed(const ComplexMatrix& rho, const SignedKrausSet& ks);

// Σ sign·(K ⊗ I) ρ (K ⊗ I)† on a coin ⊗ position matrix.
ComplexMatrix apply_signed_on_coin(const ComplexMatrix& rho, const SignedKrausSet& ks, Split split);

// (E ⊗ I)|Φ⁺⟩⟨Φ⁺| for the map realised by `ks`.
ComplexMatrix choi_from_kraus(const SignedKrausSet& ks);

struct ChoiScanPoint {
  double t2 = 0.0;
  double lambda3 = 0.0;
  double lambda4 = 0.0;
  bool is_cp = true;
  // False where the full map E(t₂, 0) is not invertible (|k(t₂)| ≤ 1e-14).
  bool invertible = true;
};

struct ChoiScanReport {
  std::vector<ChoiScanPoint> points;
  // Any invertible grid point whose intermediate map is not CP.
  bool non_markovian_by_cp = false;
};

ChoiScanReport cp_divisibility_scan(const NoiseModel& noise, double t1,
                                    std::span<const double> t2_grid);

}  // namespace nmqw
