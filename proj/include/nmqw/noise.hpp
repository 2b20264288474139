#pragma once

// Local dephasing noise on the coin: random telegraph (RTN), modified
// Ornstein-Uhlenbeck (OUN) and power-law (PLN) models.
//
// Each model is fully described by a decoherence kernel k(t) that multiplies
// the coin coherences; k(0) = 1 and |k| ≤ 1. Time is measured in walk steps.

#include <array>
#include <string_view>
#include <variant>

#include "nmqw/qops.hpp"

namespace nmqw {

// ⟨ϒ(t)ϒ(s)⟩ = a² exp(−γ|t−s|)
struct RtnParams {
  double a = 0.0;      // coupling strength
  double gamma = 1.0;  // fluctuation rate
  friend bool operator==(const RtnParams&, const RtnParams&) = default;
};

struct OunParams {
  double relaxation = 0.0;  // Γ
  double gamma = 1.0;       // bandwidth, 1/τ_c
  friend bool operator==(const OunParams&, const OunParams&) = default;
};

struct PlnParams {
  double relaxation = 0.0;  // Γ
  double gamma = 1.0;
  double alpha = 2.0;  // exponent; enters the autocorrelation only
  friend bool operator==(const PlnParams&, const PlnParams&) = default;
};

struct NoNoise {
  friend bool operator==(const NoNoise&, const NoNoise&) = default;
};

using NoiseModel = std::variant<NoNoise, RtnParams, OunParams, PlnParams>;

// Throws ParameterError when a parameter record violates its invariants.
void validate(const NoiseModel& noise);
std::string_view model_name(const NoiseModel& noise);
bool is_noiseless(const NoiseModel& noise);

double rtn_lambda(const RtnParams& p, double t);
double oun_p(const OunParams& p, double t);
double pln_p(const PlnParams& p, double t);

// Λ(t) for RTN, P(t) for OUN/PLN, 1 for NoNoise.
double decoherence_kernel(const NoiseModel& noise, double t);

// {K₁, K₂} = {√((1+k)/2)·I, √((1−k)/2)·σ₃} at time t.
std::array<ComplexMatrix, 2> kraus_at(const NoiseModel& noise, double t);

double autocorrelation(const NoiseModel& noise, double t, double s);

// Peak value 2a²/γ of the Lorentzian RTN power spectral density.
double rtn_psd_peak(const RtnParams& p);

}  // namespace nmqw
