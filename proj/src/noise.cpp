#include "nmqw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nmqw {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_time(double t) {
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << "kernel time must be >= 0, got " << t;
    throw ParameterError(os.str());
  }
}

void require(bool ok, std::string_view model, std::string_view what, double value) {
  if (!ok) {
    std::ostringstream os;
    os << model << ": " << what << " (got " << value << ")";
    throw ParameterError(os.str());
  }
}

// sin(z)/z, accurate near z = 0.
double sinc(double z) {
  if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

}  // namespace

void validate(const NoiseModel& noise) {
  std::visit(Overloaded{
                 [](const NoNoise&) {},
                 [](const RtnParams& p) {
                   require(std::isfinite(p.a) && p.a >= 0.0, "rtn", "a must be >= 0", p.a);
                   require(std::isfinite(p.gamma) && p.gamma > 0.0, "rtn", "gamma must be > 0",
                           p.gamma);
                 },
                 [](const OunParams& p) {
                   require(std::isfinite(p.relaxation) && p.relaxation >= 0.0, "oun",
                           "Gamma must be >= 0", p.relaxation);
                   require(std::isfinite(p.gamma) && p.gamma > 0.0, "oun", "gamma must be > 0",
                           p.gamma);
                 },
                 [](const PlnParams& p) {
                   require(std::isfinite(p.relaxation) && p.relaxation >= 0.0, "pln",
                           "Gamma must be >= 0", p.relaxation);
                   require(std::isfinite(p.gamma) && p.gamma > 0.0, "pln", "gamma must be > 0",
                           p.gamma);
                   require(std::isfinite(p.alpha) && p.alpha > 1.0, "pln", "alpha must be > 1",
                           p.alpha);
                 },
             },
             noise);
}

std::string_view model_name(const NoiseModel& noise) {
  return std::visit(Overloaded{
                        [](const NoNoise&) { return std::string_view("none"); },
                        [](const RtnParams&) { return std::string_view("rtn"); },
                        [](const OunParams&) { return std::string_view("oun"); },
                        [](const PlnParams&) { return std::string_view("pln"); },
                    },
                    noise);
}

bool is_noiseless(const NoiseModel& noise) { return std::holds_alternative<NoNoise>(noise); }

double rtn_lambda(const RtnParams& p, double t) {
  require_time(t);
  validate(p);
  // Λ(t) = e^{−γt}[cos(ωt) + γt·sinc(ωt)], ω = γ√((2a/γ)² − 1).
  // Below threshold ω is imaginary and the bracket becomes cosh + γt·sinhc;
  // both branches meet at e^{−γt}(1 + γt) when 2a = γ.
  const double x = std::pow(2.0 * p.a / p.gamma, 2) - 1.0;
  const double gt = p.gamma * t;
  if (x >= 0.0) {
    const double wt = gt * std::sqrt(x);
    return std::exp(-gt) * (std::cos(wt) + gt * sinc(wt));
  }
  const double kt = gt * std::sqrt(-x);
  // e^{−γt}cosh(κt) and e^{−γt}sinh(κt)/κ written without overflow for large t.
  const double grow = std::exp(kt - gt);
  const double decay = std::exp(-kt - gt);
  const double cosh_part = 0.5 * (grow + decay);
  const double sinh_over_k =
      kt < 1e-4 ? t * std::exp(-gt) * (1.0 + kt * kt / 6.0) : 0.5 * (grow - decay) * t / kt;
  return cosh_part + p.gamma * sinh_over_k;
}

double oun_p(const OunParams& p, double t) {
  require_time(t);
  validate(p);
  const double drift = t + std::expm1(-p.gamma * t) / p.gamma;
  return std::exp(-0.5 * p.relaxation * drift);
}

double pln_p(const PlnParams& p, double t) {
  require_time(t);
  validate(p);
  const double gt = p.gamma * t;
  return std::exp(-t * (gt + 2.0) * p.relaxation * p.gamma / (2.0 * (gt + 1.0) * (gt + 1.0)));
}

double decoherence_kernel(const NoiseModel& noise, double t) {
  return std::visit(Overloaded{
                        [t](const NoNoise&) {
                          require_time(t);
                          return 1.0;
                        },
                        [t](const RtnParams& p) { return rtn_lambda(p, t); },
                        [t](const OunParams& p) { return oun_p(p, t); },
                        [t](const PlnParams& p) { return pln_p(p, t); },
                    },
                    noise);
}

std::array<ComplexMatrix, 2> kraus_at(const NoiseModel& noise, double t) {
  if (is_noiseless(noise)) {
    throw ParameterError("kraus_at: no Kraus set for the noiseless model");
  }
  double k = decoherence_kernel(noise, t);
  if (std::abs(k) > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "kraus_at: kernel value " << k << " outside [-1, 1] at t = " << t << " for "
       << model_name(noise);
    throw NumericalError(os.str());
  }
  k = std::clamp(k, -1.0, 1.0);
  return {std::sqrt(0.5 * (1.0 + k)) * ComplexMatrix::Identity(2, 2),
          std::sqrt(0.5 * (1.0 - k)) * pauli_z()};
}

double autocorrelation(const NoiseModel& noise, double t, double s) {
  validate(noise);
  const double lag = std::abs(t - s);
  return std::visit(Overloaded{
                        [](const NoNoise&) -> double {
                          throw ParameterError("autocorrelation: noiseless model has none");
                        },
                        [lag](const RtnParams& p) { return p.a * p.a * std::exp(-p.gamma * lag); },
                        [lag](const OunParams& p) {
                          return p.relaxation * p.gamma * std::exp(-p.gamma * lag);
                        },
                        [lag](const PlnParams& p) {
                          return 0.5 * (p.alpha - 1.0) * p.alpha * p.relaxation /
                                 std::pow(p.gamma * lag + 1.0, p.alpha);
                        },
                    },
                    noise);
}

double rtn_psd_peak(const RtnParams& p) {
  validate(p);
  return 2.0 * p.a * p.a / p.gamma;
}

}  // namespace nmqw
