#include "nmqw/spectral.hpp"

#include <complex>

#include <fftw3.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "nmqw/qops.hpp"

namespace nmqw {

namespace {

constexpr std::size_t kMaxFitIterations = 10000;
constexpr double kSpacingTolerance = 1e-9;

struct Block {
  double mean;
  double weight;
  std::size_t count;
};

struct FitData {
  const TimeSeries* series;
};

// Parameters x = (u, v, c) with amplitude u², rate v².
int exp_residual(const gsl_vector* x, void* params, gsl_vector* f) {
  const auto* s = static_cast<const FitData*>(params)->series;
  const double a = gsl_vector_get(x, 0) * gsl_vector_get(x, 0);
  const double b = gsl_vector_get(x, 1) * gsl_vector_get(x, 1);
  const double c = gsl_vector_get(x, 2);
  for (std::size_t i = 0; i < s->size(); ++i) {
    const double model = a * std::exp(-b * s->times[i]) + c;
    gsl_vector_set(f, i, std::sqrt(s->weight(i)) * (model - s->values[i]));
  }
  return GSL_SUCCESS;
}

int exp_jacobian(const gsl_vector* x, void* params, gsl_matrix* j) {
  const auto* s = static_cast<const FitData*>(params)->series;
  const double u = gsl_vector_get(x, 0);
  const double v = gsl_vector_get(x, 1);
  for (std::size_t i = 0; i < s->size(); ++i) {
    const double t = s->times[i];
    const double e = std::exp(-v * v * t);
    const double w = std::sqrt(s->weight(i));
    gsl_matrix_set(j, i, 0, w * 2.0 * u * e);
    gsl_matrix_set(j, i, 1, w * (-2.0 * u * u * v * t * e));
    gsl_matrix_set(j, i, 2, w);
  }
  return GSL_SUCCESS;
}

// Starting point from a line through log(values − min) on the positive entries.
ExponentialParams initial_guess(const TimeSeries& s) {
  const double lo = *std::min_element(s.values.begin(), s.values.end());
  const double hi = *std::max_element(s.values.begin(), s.values.end());
  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double y = s.values[i] - lo;
    if (!(y > 0.0)) continue;
    const double w = s.weight(i);
    const double ly = std::log(y);
    sw += w;
    st += w * s.times[i];
    sy += w * ly;
    stt += w * s.times[i] * s.times[i];
    sty += w * s.times[i] * ly;
    ++used;
  }
  ExponentialParams p{hi - lo, 0.0, lo};
  const double det = sw * stt - st * st;
  if (used >= 2 && det > 0.0) {
    const double slope = (sw * sty - st * sy) / det;
    const double intercept = (sy - slope * st) / sw;
    p.rate = std::max(0.0, -slope);
    p.amplitude = std::exp(intercept);
  }
  // A zero rate or amplitude sits on a stationary point of the u², v² map.
  const double span = s.times.back() - s.times.front();
  if (p.rate <= 0.0) p.rate = span > 0.0 ? 1.0 / span : 1.0;
  if (p.amplitude <= 0.0) p.amplitude = std::max(hi - lo, 1e-12);
  return p;
}

MonotoneFit fit_exponential(const TimeSeries& s) {
  const ExponentialParams guess = initial_guess(s);
  const std::size_t n = s.size();
  FitData data{&s};
  gsl_multifit_nlinear_fdf fdf;
  fdf.f = &exp_residual;
  fdf.df = &exp_jacobian;
  fdf.fvv = nullptr;
  fdf.n = n;
  fdf.p = 3;
  fdf.params = &data;

  gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
  auto deleter = [](gsl_multifit_nlinear_workspace* w) { gsl_multifit_nlinear_free(w); };
  std::unique_ptr<gsl_multifit_nlinear_workspace, decltype(deleter)> work(
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, n, 3), deleter);

  double x0[3] = {std::sqrt(guess.amplitude), std::sqrt(guess.rate), guess.offset};
  gsl_vector_view x = gsl_vector_view_array(x0, 3);
  gsl_multifit_nlinear_init(&x.vector, &fdf, work.get());

  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  int info = 0;
  const int status =
      gsl_multifit_nlinear_driver(kMaxFitIterations, 1e-12, 1e-12, 0.0, nullptr, nullptr, &info,
                                  work.get());
  gsl_set_error_handler(previous);

  const gsl_vector* best = gsl_multifit_nlinear_position(work.get());
  const double u = gsl_vector_get(best, 0);
  const double v = gsl_vector_get(best, 1);
  const double c = gsl_vector_get(best, 2);
  if (status != GSL_SUCCESS || !std::isfinite(u) || !std::isfinite(v) || !std::isfinite(c)) {
    std::ostringstream os;
    os << "exponential fit did not converge after " << gsl_multifit_nlinear_niter(work.get())
       << " iterations: " << gsl_strerror(status);
    throw FitFailure(os.str());
  }

  MonotoneFit fit;
  fit.family = MfbfFamily::exponential;
  fit.params = ExponentialParams{u * u, v * v, c};
  fit.fitted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.fitted[i] = u * u * std::exp(-v * v * s.times[i]) + c;
  }
  return fit;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

TimeSeries TimeSeries::from(std::vector<double> times, std::vector<double> values,
                            std::vector<double> weights) {
  if (times.size() != values.size()) {
    throw DimensionError("time series: times and values differ in length");
  }
  if (!weights.empty() && weights.size() != values.size()) {
    throw DimensionError("time series: weights and values differ in length");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !std::isfinite(times[i])) {
      throw ParameterError("time series: non-finite sample at index " + std::to_string(i));
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw ParameterError("time series: times must be strictly increasing");
    }
    if (!weights.empty() && !(weights[i] > 0.0)) {
      throw ParameterError("time series: weights must be positive");
    }
  }
  return TimeSeries{std::move(times), std::move(values), std::move(weights)};
}

std::string_view family_name(MfbfFamily family) {
  return family == MfbfFamily::isotonic ? "isotonic" : "exponential";
}

std::optional<MfbfFamily> parse_family(std::string_view name) {
  if (name == "isotonic") return MfbfFamily::isotonic;
  if (name == "exponential") return MfbfFamily::exponential;
  return std::nullopt;
}

std::vector<double> pava_nonincreasing(std::span<const double> values,
                                       std::span<const double> weights) {
  if (!weights.empty() && weights.size() != values.size()) {
    throw DimensionError("pava: weights and values differ in length");
  }
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    blocks.push_back({values[i], w, 1});
    // Non-increasing: pool while a block exceeds its predecessor.
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean < blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w_total = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / w_total;
      a.weight = w_total;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

MonotoneFit fit_mfbf(const TimeSeries& s, MfbfFamily family) {
  if (s.size() < 4) throw ParameterError("fit_mfbf: need at least 4 samples");
  if (family == MfbfFamily::exponential) return fit_exponential(s);
  MonotoneFit fit;
  fit.family = MfbfFamily::isotonic;
  fit.fitted = pava_nonincreasing(s.values, s.weights);
  return fit;
}

TimeSeries detrend(const TimeSeries& s, const MonotoneFit& fit) {
  if (fit.fitted.size() != s.size()) {
    throw DimensionError("detrend: fit length does not match series");
  }
  TimeSeries out = s;
  for (std::size_t i = 0; i < s.size(); ++i) out.values[i] -= fit.fitted[i];
  return out;
}

Spectrum power_spectrum(const TimeSeries& s, const SpectrumOptions& options) {
  const std::size_t n = s.size();
  if (n < 8) throw ParameterError("power_spectrum: need at least 8 samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(s.times[i] - s.times[i - 1] - 1.0) > kSpacingTolerance) {
      std::ostringstream os;
      os << "power_spectrum: non-uniform spacing between samples " << i - 1 << " and " << i;
      throw ParameterError(os.str());
    }
  }
  const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> in(n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (options.hann) w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
    in[i] = w * (s.values[i] - mean);
  }
  const std::size_t bins = n / 2 + 1;
  std::vector<std::complex<double>> out(bins);
  fftw_plan plan;
  {
    // Only fftw_execute is thread safe.
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum sp;
  sp.frequencies.resize(bins);
  sp.power.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    sp.frequencies[k] = static_cast<double>(k) / static_cast<double>(n);
    double p = std::norm(out[k]) / static_cast<double>(n);
    const bool nyquist = n % 2 == 0 && k == n / 2;
    if (k != 0 && !nyquist) p *= 2.0;
    sp.power[k] = p;
  }
  return sp;
}

std::vector<Peak> find_peaks(const Spectrum& sp, double min_prominence) {
  std::vector<Peak> peaks;
  const std::size_t n = sp.power.size();
  if (n < 2) return peaks;
  const double top = *std::max_element(sp.power.begin(), sp.power.end());
  if (!(top > 0.0)) return peaks;
  for (std::size_t k = 1; k < n; ++k) {
    const double p = sp.power[k];
    const bool above_left = p > sp.power[k - 1];
    const bool above_right = k + 1 == n || p > sp.power[k + 1];
    if (above_left && above_right && p >= min_prominence * top) {
      peaks.push_back({sp.frequencies[k], p});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.power > b.power; });
  return peaks;
}

DisambiguationReport disambiguate(const TimeSeries& s, MfbfFamily family, double min_prominence,
                                  const SpectrumOptions& options) {
  DisambiguationReport r;
  r.fit = fit_mfbf(s, family);
  r.residual = detrend(s, r.fit);
  r.spectrum = power_spectrum(r.residual, options);
  r.peaks = find_peaks(r.spectrum, min_prominence);
  if (r.peaks.size() >= 2) r.top_two_ratio = r.peaks[0].power / r.peaks[1].power;
  return r;
}

}  // namespace nmqw
