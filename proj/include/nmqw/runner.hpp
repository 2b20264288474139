#pragma once

// The four experiment pipelines behind the command-line tool. Each writes its
// files into out_dir (created if needed) and returns the paths written.

#include <string>
#include <string_view>
#include <vector>

#include "nmqw/config.hpp"

namespace nmqw {

inline constexpr std::string_view kVersion = "1.0.0";

// distribution.csv (step, x, probability) and variance.csv (step, variance).
std::vector<std::string> run_walk(const ExperimentConfig& cfg, const std::string& out_dir);

// <tag>.csv (step, value) per requested witness plus metadata.json.
std::vector<std::string> run_witness(const ExperimentConfig& cfg, const std::string& out_dir);

// choi.csv (t2, lambda3, lambda4, is_cp, invertible) for t2 = t1 + k·dt ≤ t2_max.
std::vector<std::string> run_choi_scan(const ExperimentConfig& cfg, const std::string& out_dir);

// fit.csv, residual.csv, spectrum.csv and peaks.json from a (step, value) CSV.
std::vector<std::string> run_spectrum(const std::string& input_csv, const SpectralSection& options,
                                      const std::string& out_dir);

}  // namespace nmqw
