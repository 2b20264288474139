#pragma once

// Monotone detrending and power-spectrum analysis of witness series.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nmqw/errors.hpp"

namespace nmqw {

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> weights;  // empty means all ones

  // Validates: equal lengths, strictly increasing times, finite values, weights > 0.
  static TimeSeries from(std::vector<double> times, std::vector<double> values,
                         std::vector<double> weights = {});
  std::size_t size() const { return values.size(); }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
};

enum class MfbfFamily { isotonic, exponential };

std::string_view family_name(MfbfFamily family);
std::optional<MfbfFamily> parse_family(std::string_view name);

// g(t) = amplitude·exp(−rate·t) + offset, amplitude ≥ 0, rate ≥ 0.
struct ExponentialParams {
  double amplitude = 0.0;
  double rate = 0.0;
  double offset = 0.0;
};

struct MonotoneFit {
  MfbfFamily family = MfbfFamily::isotonic;
  std::vector<double> fitted;
  std::optional<ExponentialParams> params;  // exponential family only
};

// Weighted least-squares non-increasing fit (pool adjacent violators).
std::vector<double> pava_nonincreasing(std::span<const double> values,
                                       std::span<const double> weights = {});

// Needs at least 4 samples. Throws FitFailure if the exponential fit does not
// converge within 10^4 iterations.
MonotoneFit fit_mfbf(const TimeSeries& s, MfbfFamily family);

TimeSeries detrend(const TimeSeries& s, const MonotoneFit& fit);

struct Spectrum {
  std::vector<double> frequencies;  // cycles/step, k/N for k = 0..N/2
  std::vector<double> power;
};

struct SpectrumOptions {
  bool hann = false;
};

// One-sided |DFT|²/N of the mean-removed values, doubled on bins other than
// DC and Nyquist so that Σ power = N·variance. Needs ≥ 8 samples at unit spacing.
Spectrum power_spectrum(const TimeSeries& s, const SpectrumOptions& options = {});

struct Peak {
  double frequency = 0.0;
  double power = 0.0;
};

// Strict local maxima above min_prominence·max(power), DC bin excluded,
// sorted by descending power.
std::vector<Peak> find_peaks(const Spectrum& sp, double min_prominence = 0.05);

struct DisambiguationReport {
  MonotoneFit fit;
  TimeSeries residual;
  Spectrum spectrum;
  std::vector<Peak> peaks;
  std::optional<double> top_two_ratio;  // peaks[0].power / peaks[1].power
};

DisambiguationReport disambiguate(const TimeSeries& s, MfbfFamily family,
                                  double min_prominence = 0.05,
                                  const SpectrumOptions& options = {});

}  // namespace nmqw
