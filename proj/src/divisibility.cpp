#include "nmqw/divisibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace nmqw {

KernelRatio kernel_ratio(const NoiseModel& noise, double t1, double t2) {
  if (!(t1 >= 0.0) || !(t2 > t1)) {
    std::ostringstream os;
    os << "kernel_ratio: need t2 > t1 >= 0, got t1 = " << t1 << ", t2 = " << t2;
    throw ParameterError(os.str());
  }
  const double k1 = decoherence_kernel(noise, t1);
  if (std::abs(k1) <= kInvertibilityThreshold) {
    std::ostringstream os;
    os << "dynamical map of " << model_name(noise) << " is not invertible at t = " << t1
       << " (kernel " << k1 << ")";
    throw NonInvertibleMapError(os.str());
  }
  return {decoherence_kernel(noise, t2) / k1, t1, t2};
}

ComplexMatrix intermediate_choi(const KernelRatio& r) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(3, 3) = 1.0;
  m(0, 3) = r.value;
  m(3, 0) = r.value;
  return m;
}

std::array<double, 4> choi_eigenvalues(const KernelRatio& r) {
  return {0.0, 0.0, 1.0 - r.value, 1.0 + r.value};
}

bool is_completely_positive(const KernelRatio& r) {
  const auto ev = choi_eigenvalues(r);
  return std::min(ev[2], ev[3]) >= -kCpTolerance;
}

SignedKrausSet intermediate_kraus(const KernelRatio& r) {
  const double plus_weight = 1.0 + r.value;   // λ₄
  const double minus_weight = 1.0 - r.value;  // λ₃
  SignedKrausSet ks(2);
  ks[0].op = std::sqrt(0.5 * std::abs(plus_weight)) * ComplexMatrix::Identity(2, 2);
  ks[0].sign = plus_weight < 0.0 ? -1 : 1;
  ks[1].op = std::sqrt(0.5 * std::abs(minus_weight)) * pauli_z();
  ks[1].sign = minus_weight < 0.0 ? -1 : 1;
  return ks;
}

double completeness_defect(const SignedKrausSet& ks) {
  if (ks.empty()) throw DimensionError("completeness_defect: empty Kraus set");
  const Index d = ks.front().op.cols();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& k : ks) sum += static_cast<double>(k.sign) * (k.op.adjoint() * k.op);
  return max_abs(sum - ComplexMatrix::Identity(d, d));
}

ComplexMatrix apply_signed(const ComplexMatrix& rho, const SignedKrausSet& ks) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : ks) {
    if (k.op.cols() != rho.rows() || rho.rows() != rho.cols()) {
      throw DimensionError("apply_signed: operator and state dimensions differ");
    }
    out += static_cast<double>(k.sign) * (k.op * rho * k.op.adjoint());
  }
  return out;
}

ComplexMatrix apply_signed_on_coin(const ComplexMatrix& rho, const SignedKrausSet& ks,
                                   Split split) {
  if (rho.rows() != split.total() || rho.cols() != split.total()) {
    throw DimensionError("apply_signed_on_coin: state does not match the subsystem split");
  }
  const Index dc = split.coin;
  const Index dp = split.position;
  // Block (i, j) of the result is Σ_sign Σ_{k,l} K_ik ρ_kl conj(K_jl).
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& kraus : ks) {
    const ComplexMatrix& K = kraus.op;
    if (K.rows() != dc || K.cols() != dc) {
      throw DimensionError("apply_signed_on_coin: Kraus operator is not on the coin space");
    }
    const double s = static_cast<double>(kraus.sign);
    for (Index i = 0; i < dc; ++i) {
      for (Index j = 0; j < dc; ++j) {
        for (Index k = 0; k < dc; ++k) {
          for (Index l = 0; l < dc; ++l) {
            const Complex w = s * K(i, k) * std::conj(K(j, l));
            if (w == Complex(0.0)) continue;
            out.block(i * dp, j * dp, dp, dp) += w * rho.block(k * dp, l * dp, dp, dp);
          }
        }
      }
    }
  }
  return out;
}

ComplexMatrix choi_from_kraus(const SignedKrausSet& ks) {
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = 1.0;
  phi(3) = 1.0;
  const ComplexMatrix bell = phi * phi.adjoint();
  return apply_signed_on_coin(bell, ks, Split{2, 2});
}

ChoiScanReport cp_divisibility_scan(const NoiseModel& noise, double t1,
                                    std::span<const double> t2_grid) {
  if (std::abs(decoherence_kernel(noise, t1)) <= kInvertibilityThreshold) {
    throw NonInvertibleMapError("cp_divisibility_scan: kernel vanishes at t1 = " + std::to_string(t1));
  }
  ChoiScanReport report;
  report.points.reserve(t2_grid.size());
  for (double t2 : t2_grid) {
    const KernelRatio r = kernel_ratio(noise, t1, t2);
    const auto ev = choi_eigenvalues(r);
    ChoiScanPoint pt;
    pt.t2 = t2;
    pt.lambda3 = ev[2];
    pt.lambda4 = ev[3];
    pt.is_cp = is_completely_positive(r);
    pt.invertible = std::abs(decoherence_kernel(noise, t2)) > kInvertibilityThreshold;
    if (pt.invertible && !pt.is_cp) report.non_markovian_by_cp = true;
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace nmqw
