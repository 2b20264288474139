#pragma once

// Non-Markovianity witnesses and coin-position correlation measures.
// All entropies and informations are in bits.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nmqw/noise.hpp"
#include "nmqw/qops.hpp"
#include "nmqw/walk.hpp"

namespace nmqw {

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);
// Same on plain Hermitian matrices (e.g. reduced states of NCP evolutions).
double trace_distance(const ComplexMatrix& rho1, const ComplexMatrix& rho2);

double mutual_information(const DensityMatrix& rho, Split split);
double mutual_information(const FactoredState& rho, Split split);

struct MidResult {
  double value = 0.0;
  // Some marginal has two support eigenvalues closer than 1e-9; the
  // computational-basis rule fixed the projectors.
  bool degenerate = false;
};

MidResult mid(const DensityMatrix& rho, Split split);
MidResult mid(const FactoredState& rho, Split split);

struct DiscordOptions {
  int grid = 32;             // θ × φ samples before refinement
  double tolerance = 1e-7;   // on the classical correlation J
  Subsystem measured = Subsystem::coin;
  friend bool operator==(const DiscordOptions&, const DiscordOptions&) = default;
};

struct DiscordResult {
  double value = 0.0;                   // I(ρ) − max J
  double classical_correlation = 0.0;   // max J
  double theta = 0.0;                   // optimal Bloch axis of the measured qubit
  double phi = 0.0;
};

// Rank-1 projective measurement on a two-level factor, optimised over the
// Bloch sphere. Measuring the position side requires split.position == 2.
DiscordResult discord(const DensityMatrix& rho, Split split, const DiscordOptions& options = {});
DiscordResult discord(const FactoredState& rho, Split split, const DiscordOptions& options = {});

double coin_entropy(const DensityMatrix& rho, Split split);
double coin_entropy(const FactoredState& rho, Split split);

// E[x²] − E[x]² for probabilities indexed from position min_x.
double variance(std::span<const double> probabilities, int min_x = 0);
double variance(const PositionDistribution& p);

enum class WitnessKind { trace_distance, mutual_information, mid, discord, entropy, variance };

std::string_view witness_name(WitnessKind kind);  // td, mi, mid, qd, entropy, variance
std::optional<WitnessKind> parse_witness(std::string_view name);

// Two initial coin states (δ, η) whose reduced coin states are compared.
struct TdPair {
  double delta1 = kPi / 4.0;
  double eta1 = 0.0;
  double delta2 = -kPi / 4.0;
  double eta2 = 0.0;
  friend bool operator==(const TdPair&, const TdPair&) = default;
};

struct WitnessOptions {
  TdPair td_pair;
  DiscordOptions discord;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct WitnessSeries {
  WitnessKind kind = WitnessKind::trace_distance;
  std::vector<int> steps;
  std::vector<double> values;
};

// Witness values for t = 0..cfg.steps. TD uses options.td_pair; every other
// witness uses the initial state of cfg.
WitnessSeries witness_series(const WalkConfig& cfg, const NoiseModel& noise, EvolutionMode mode,
                             WitnessKind kind, const WitnessOptions& options = {});

// Several witnesses from one evolution; output order follows `kinds`.
std::vector<WitnessSeries> witness_series(const WalkConfig& cfg, const NoiseModel& noise,
                                          EvolutionMode mode, std::span<const WitnessKind> kinds,
                                          const WitnessOptions& options = {});

}  // namespace nmqw
