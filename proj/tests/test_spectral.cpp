#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "nmqw/spectral.hpp"
#include "support.hpp"

using namespace nmqw;

namespace {

TimeSeries series(const std::vector<double>& values) {
  std::vector<double> t(values.size());
  std::iota(t.begin(), t.end(), 0.0);
  return TimeSeries::from(t, values);
}

std::vector<double> sampled(std::size_t n, double (*f)(double)) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(static_cast<double>(i));
  return v;
}

double tone(double f, double t) { return std::cos(2.0 * kPi * f * t); }

// Best non-increasing step function by enumerating every partition into
// consecutive blocks; each block takes its weighted mean.
std::vector<double> isotonic_by_enumeration(const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = y.size();
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  for (unsigned long mask = 0; mask < (1ul << (n - 1)); ++mask) {
    std::vector<double> fit(n);
    std::size_t start = 0;
    double prev_mean = std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i) {
      const bool cut = i == n - 1 || (mask >> i) & 1ul;
      if (!cut) continue;
      double sw = 0, sy = 0;
      for (std::size_t j = start; j <= i; ++j) {
        sw += w[j];
        sy += w[j] * y[j];
      }
      const double mean = sy / sw;
      if (mean > prev_mean) feasible = false;
      for (std::size_t j = start; j <= i; ++j) fit[j] = mean;
      prev_mean = mean;
      start = i + 1;
    }
    if (!feasible) continue;
    double cost = 0;
    for (std::size_t j = 0; j < n; ++j) cost += w[j] * (y[j] - fit[j]) * (y[j] - fit[j]);
    if (cost < best_cost) {
      best_cost = cost;
      best = fit;
    }
  }
  return best;
}

// Same normalisation as power_spectrum, by the O(N²) definition.
std::vector<double> direct_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) {
    Complex s = 0;
    for (std::size_t j = 0; j < n; ++j) s += (x[j] - mean) * std::polar(1.0, -2.0 * kPi * k * j / n);
    p[k] = std::norm(s) / n * ((k == 0 || 2 * k == n) ? 1.0 : 2.0);
  }
  return p;
}

}  // namespace

TEST_CASE("isotonic fit examples") {
  const std::vector<double> dec = {5, 4, 4, 2, -1};
  CHECK(pava_nonincreasing(dec) == dec);
  const auto fit = pava_nonincreasing(std::vector<double>{3, 1, 2, 0});
  REQUIRE(fit.size() == 4);
  CHECK(fit[0] == doctest::Approx(3.0));
  CHECK(fit[1] == doctest::Approx(1.5));
  CHECK(fit[2] == doctest::Approx(1.5));
  CHECK(fit[3] == doctest::Approx(0.0));
  const auto weighted = pava_nonincreasing(std::vector<double>{1, 2}, std::vector<double>{3, 1});
  CHECK(weighted[0] == doctest::Approx(1.25));
  CHECK(weighted[1] == doctest::Approx(1.25));
}

TEST_CASE("isotonic fit matches exhaustive partition search") {
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
    std::vector<double> y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = testing::uniform(-1, 1) - 0.05 * i;
      w[i] = trial % 2 ? testing::uniform(0.1, 3.0) : 1.0;
    }
    const auto fast = pava_nonincreasing(y, w);
    const auto slow = isotonic_by_enumeration(y, w);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(fast[i] - slow[i]) <= 1e-9);
  }
}

TEST_CASE("MFBF fits are monotone non-increasing") {
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> y(40);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::exp(-0.05 * i) + 0.2 * testing::uniform(-1, 1);
    for (MfbfFamily f : {MfbfFamily::isotonic, MfbfFamily::exponential}) {
      const MonotoneFit fit = fit_mfbf(series(y), f);
      for (std::size_t i = 1; i < y.size(); ++i) CHECK(fit.fitted[i] <= fit.fitted[i - 1] + 1e-15);
      CHECK(fit.params.has_value() == (f == MfbfFamily::exponential));
    }
  }
}

TEST_CASE("exponential fit recovers a noiseless decay") {
  const auto y = sampled(100, [](double t) { return std::exp(-0.1 * t); });
  const MonotoneFit fit = fit_mfbf(series(y), MfbfFamily::exponential);
  REQUIRE(fit.params);
  CHECK(std::abs(fit.params->rate - 0.1) <= 1e-6);
  CHECK(std::abs(fit.params->amplitude - 1.0) <= 1e-6);
  CHECK(std::abs(fit.params->offset) <= 1e-6);
}

TEST_CASE("MFBF needs at least four samples") {
  CHECK_THROWS_AS(fit_mfbf(series({3, 2, 1}), MfbfFamily::isotonic), ParameterError);
  CHECK_NOTHROW(fit_mfbf(series({3, 2, 1, 0}), MfbfFamily::isotonic));
}

TEST_CASE("detrend examples") {
  const TimeSeries mono = series({4, 3, 3, 1, 0});
  TimeSeries r = detrend(mono, fit_mfbf(mono, MfbfFamily::isotonic));
  for (double v : r.values) CHECK(v == 0.0);
  CHECK(r.times == mono.times);

  const TimeSeries flat = series({2, 2, 2, 2, 2, 2});
  r = detrend(flat, fit_mfbf(flat, MfbfFamily::isotonic));
  for (double v : r.values) CHECK(v == 0.0);

  const auto y = sampled(100, [](double t) { return std::exp(-0.05 * t) + 0.1 * tone(0.25, t); });
  const TimeSeries s = series(y);
  r = detrend(s, fit_mfbf(s, MfbfFamily::exponential));
  double worst = 0;
  for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(r.values[i] - 0.1 * tone(0.25, i)));
  CHECK(worst <= 0.02);

  MonotoneFit wrong;
  wrong.fitted = {1, 2};
  CHECK_THROWS_AS(detrend(s, wrong), DimensionError);
}

TEST_CASE("isotonic residual carries no monotone component") {
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(30);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1.0 / (1 + i) + 0.3 * testing::uniform(-1, 1);
    const TimeSeries s = series(y);
    const MonotoneFit fit = fit_mfbf(s, MfbfFamily::isotonic);
    const TimeSeries r = detrend(s, fit);
    const auto again = pava_nonincreasing(r.values);
    const double fit_ss = std::inner_product(fit.fitted.begin(), fit.fitted.end(), fit.fitted.begin(), 0.0);
    const double again_ss = std::inner_product(again.begin(), again.end(), again.begin(), 0.0);
    CHECK(again_ss <= 1e-9 * fit_ss);
  }
}

TEST_CASE("power spectrum examples") {
  Spectrum sp = power_spectrum(series(std::vector<double>(20, 3.5)));
  REQUIRE(sp.power.size() == 11);
  for (double p : sp.power) CHECK(p < 1e-28);

  sp = power_spectrum(series(sampled(64, [](double t) { return tone(0.25, t); })));
  REQUIRE(sp.frequencies.size() == 33);
  const double total = std::accumulate(sp.power.begin(), sp.power.end(), 0.0);
  CHECK(sp.frequencies[16] == 0.25);
  CHECK(sp.power[16] >= 0.99 * total);

  sp = power_spectrum(series(sampled(64, [](double t) { return tone(0.25, t) + tone(0.03125, t); })));
  const double both = std::accumulate(sp.power.begin(), sp.power.end(), 0.0);
  CHECK(sp.frequencies[2] == 0.03125);
  CHECK(sp.power[2] + sp.power[16] >= 0.99 * both);
  CHECK(sp.power[2] == doctest::Approx(sp.power[16]));
}

TEST_CASE("spectrum length and frequency grid") {
  for (std::size_t n : {8u, 9u, 63u, 101u}) {
    std::vector<double> y(n);
    for (auto& v : y) v = testing::uniform(-1, 1);
    const Spectrum sp = power_spectrum(series(y));
    CHECK(sp.power.size() == n / 2 + 1);
    for (std::size_t k = 0; k < sp.frequencies.size(); ++k) {
      CHECK(sp.frequencies[k] == static_cast<double>(k) / n);
      CHECK(sp.power[k] >= 0.0);
    }
    CHECK(sp.frequencies.back() <= 0.5);
  }
}

TEST_CASE("power spectrum matches a direct DFT and satisfies Parseval") {
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 8 + static_cast<std::size_t>(trial) * 3;
    std::vector<double> y(n);
    for (auto& v : y) v = testing::uniform(-2, 2);
    const Spectrum sp = power_spectrum(series(y));
    const auto ref = direct_power(y);
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(sp.power[k] - ref[k]) <= 1e-9);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double var = 0;
    for (double v : y) var += (v - mean) * (v - mean) / n;
    CHECK(std::abs(std::accumulate(sp.power.begin(), sp.power.end(), 0.0) - n * var) <= 1e-9);
  }
}

TEST_CASE("power spectrum preconditions") {
  CHECK_THROWS_AS(power_spectrum(series({1, 2, 3, 4, 5, 6, 7})), ParameterError);
  const TimeSeries gappy = TimeSeries::from({0, 1, 2, 3, 5, 6, 7, 8}, {1, 2, 3, 4, 5, 6, 7, 8});
  CHECK_THROWS_AS(power_spectrum(gappy), ParameterError);
  const TimeSeries half = TimeSeries::from({0, .5, 1, 1.5, 2, 2.5, 3, 3.5}, {1, 2, 3, 4, 5, 6, 7, 8});
  CHECK_THROWS_AS(power_spectrum(half), ParameterError);
}

TEST_CASE("Hann window keeps a pure tone's peak in place") {
  const auto y = sampled(100, [](double t) { return tone(0.2, t); });
  const Spectrum sp = power_spectrum(series(y), SpectrumOptions{true});
  const auto peaks = find_peaks(sp);
  REQUIRE_FALSE(peaks.empty());
  CHECK(peaks[0].frequency == doctest::Approx(0.2));
}

TEST_CASE("time series validation") {
  CHECK_THROWS_AS(TimeSeries::from({0, 1}, {1}), DimensionError);
  CHECK_THROWS_AS(TimeSeries::from({0, 0}, {1, 2}), ParameterError);
  CHECK_THROWS_AS(TimeSeries::from({0, 1}, {1, std::nan("")}), ParameterError);
  CHECK_THROWS_AS(TimeSeries::from({0, 1}, {1, 2}, {1, 0}), ParameterError);
  CHECK_THROWS_AS(TimeSeries::from({0, 1}, {1, 2}, {1}), DimensionError);
}

TEST_CASE("peak finding examples") {
  Spectrum sp = power_spectrum(series(sampled(64, [](double t) { return tone(0.25, t); })));
  auto peaks = find_peaks(sp);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].frequency == 0.25);

  sp = power_spectrum(series(sampled(64, [](double t) { return tone(0.25, t) + 0.7 * tone(0.03125, t); })));
  peaks = find_peaks(sp);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].frequency == 0.25);
  CHECK(peaks[1].frequency == 0.03125);

  Spectrum falling;
  for (int k = 0; k < 10; ++k) {
    falling.frequencies.push_back(k / 18.0);
    falling.power.push_back(10.0 - k);
  }
  CHECK(find_peaks(falling).empty());
}

TEST_CASE("peak threshold, Nyquist edge and ordering") {
  Spectrum sp;
  sp.frequencies = {0, 0.1, 0.2, 0.3, 0.4, 0.5};
  sp.power = {9, 1, 3, 0.04, 0.01, 2};
  auto peaks = find_peaks(sp, 0.05);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].frequency == 0.2);
  CHECK(peaks[1].frequency == 0.5);
  peaks = find_peaks(sp, 0.3);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].frequency == 0.2);
  // Plateaus are not strict maxima.
  sp.power = {0, 1, 1, 0, 0, 0};
  CHECK(find_peaks(sp, 0.0).empty());
}

TEST_CASE("peak frequencies belong to the spectrum grid") {
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> y(50);
    for (auto& v : y) v = testing::uniform(-1, 1);
    const Spectrum sp = power_spectrum(series(y));
    for (const Peak& p : find_peaks(sp, 0.0)) {
      CHECK(std::find(sp.frequencies.begin(), sp.frequencies.end(), p.frequency) != sp.frequencies.end());
    }
  }
}

TEST_CASE("disambiguation pipeline on a synthetic two-source signal") {
  const auto y = sampled(100, [](double t) {
    return 0.6 * std::exp(-0.04 * t) + 0.15 * tone(0.25, t) + 0.1 * tone(0.03, t);
  });
  const DisambiguationReport r = disambiguate(series(y), MfbfFamily::exponential);
  REQUIRE(r.peaks.size() >= 2);
  CHECK(r.peaks[0].frequency == doctest::Approx(0.25));
  CHECK(r.peaks[1].frequency == doctest::Approx(0.03));
  REQUIRE(r.top_two_ratio);
  CHECK(*r.top_two_ratio == doctest::Approx(r.peaks[0].power / r.peaks[1].power));
  CHECK(family_name(MfbfFamily::isotonic) == "isotonic");
  CHECK(parse_family("exponential") == MfbfFamily::exponential);
  CHECK_FALSE(parse_family("linear"));
}
