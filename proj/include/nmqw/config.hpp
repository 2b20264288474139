#pragma once

// Experiment configuration: a single JSON document with every angle given in
// degrees. Unknown keys are rejected.

#include <string>
#include <string_view>
#include <vector>

#include "nmqw/noise.hpp"
#include "nmqw/spectral.hpp"
#include "nmqw/walk.hpp"
#include "nmqw/witness.hpp"

namespace nmqw {

// Stores the degrees as written; radians are converted once on construction.
class Angle {
 public:
  Angle() = default;
  static Angle degrees(double deg) { return Angle(deg); }

  double deg() const { return degrees_; }
  double rad() const { return radians_; }
  friend bool operator==(const Angle& a, const Angle& b) { return a.degrees_ == b.degrees_; }

 private:
  explicit Angle(double deg) : degrees_(deg), radians_(deg * kPi / 180.0) {}
  double degrees_ = 0.0;
  double radians_ = 0.0;
};

struct WalkSection {
  int steps = 100;
  Angle coin_angle = Angle::degrees(45.0);
  Angle delta = Angle::degrees(45.0);
  Angle eta = Angle::degrees(0.0);
  int initial_position = 0;
  friend bool operator==(const WalkSection&, const WalkSection&) = default;
};

struct TdPairSection {
  Angle delta1 = Angle::degrees(45.0);
  Angle eta1 = Angle::degrees(0.0);
  Angle delta2 = Angle::degrees(-45.0);
  Angle eta2 = Angle::degrees(0.0);
  friend bool operator==(const TdPairSection&, const TdPairSection&) = default;
};

struct SpectralSection {
  MfbfFamily family = MfbfFamily::exponential;
  double min_prominence = 0.05;
  bool hann = false;
  friend bool operator==(const SpectralSection&, const SpectralSection&) = default;
};

struct ChoiSection {
  double t1 = 1.0;
  double t2_max = 20.0;
  double dt = 0.1;
  friend bool operator==(const ChoiSection&, const ChoiSection&) = default;
};

struct DiscordSection {
  int grid = 32;
  Subsystem measured = Subsystem::coin;
  friend bool operator==(const DiscordSection&, const DiscordSection&) = default;
};

struct ExperimentConfig {
  WalkSection walk;
  NoiseModel noise = NoNoise{};
  EvolutionMode mode = EvolutionMode::one_shot;
  std::vector<WitnessKind> witnesses = {WitnessKind::trace_distance};
  TdPairSection td_pair;
  SpectralSection spectral;
  ChoiSection choi;
  DiscordSection discord;
  std::string output_dir = "out";
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  WalkConfig walk_config() const;
  WitnessOptions witness_options() const;
};

// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);  // IoError if unreadable

// Pretty-printed JSON that parse_config maps back to an equal config.
std::string echo_config(const ExperimentConfig& cfg);

}  // namespace nmqw
