#pragma once

// Discrete-time quantum walk of a qubit coin on a truncated 1-D lattice.

#include <string_view>
#include <vector>

#include "nmqw/noise.hpp"
#include "nmqw/qops.hpp"

namespace nmqw {

struct WalkConfig {
  int steps = 100;                  // T
  double coin_angle = kPi / 4.0;    // θ_c, radians
  double delta = kPi / 4.0;         // initial coin polar parameter, radians
  double eta = 0.0;                 // initial coin phase, radians
  int initial_position = 0;
  friend bool operator==(const WalkConfig&, const WalkConfig&) = default;
};

enum class EvolutionMode { noiseless, one_shot, stepwise };

std::string_view mode_name(EvolutionMode mode);

/// 2(T+1)+1 sites centred on the initial position, so a walk of T steps
/// never touches either edge site.
class Lattice {
 public:
  explicit Lattice(const WalkConfig& cfg);
  Lattice(int steps, int center);

  Index sites() const { return sites_; }
  int min_x() const { return min_x_; }
  int max_x() const { return min_x_ + static_cast<int>(sites_) - 1; }
  Split split() const { return {2, sites_}; }

  Index site(int x) const;
  int position(Index site) const { return min_x_ + static_cast<int>(site); }
  // Basis index of |coin⟩|x⟩.
  Index index(int coin, int x) const { return coin * sites_ + site(x); }

 private:
  Index sites_;
  int min_x_;
};

/// [[cos θ, sin θ], [sin θ, −cos θ]]
ComplexMatrix coin_operator(double theta);

/// Conditional shift on coin ⊗ position for `lattice_size` sites:
/// |0⟩⟨0|⊗Σ|x−1⟩⟨x| + |1⟩⟨1|⊗Σ|x+1⟩⟨x|, summed over interior sites.
ComplexMatrix shift_operator(Index lattice_size);

/// Ŵ = Ŝ(Ĉ ⊗ I) as a dense matrix.
ComplexMatrix walk_operator(Index lattice_size, double theta);

// (cos δ|0⟩ + e^{−iη} sin δ|1⟩) ⊗ |x₀⟩
PureState initial_state(const WalkConfig& cfg);
PureState initial_state(const WalkConfig& cfg, double delta, double eta);

// One application of Ŵ to a coin ⊗ position vector (sparse stencil).
// Throws EdgeAmplitudeError if amplitude on an edge site exceeds 1e-14.
ComplexVector apply_walk(const ComplexVector& v, const ComplexMatrix& coin, Index sites);

PureState evolve_noiseless(const WalkConfig& cfg, int t);
// States Ŵ^t|ψ(0)⟩ for t = 0..cfg.steps.
std::vector<PureState> noiseless_trajectory(const WalkConfig& cfg);
std::vector<PureState> noiseless_trajectory(const WalkConfig& cfg, double delta, double eta);

// Σ_j (K_j(t) ⊗ I)|ψ⟩⟨ψ|(K_j(t) ⊗ I)† kept as a rank ≤ 2 factor.
FactoredState apply_one_shot(const PureState& psi, const NoiseModel& noise, double t);

DensityMatrix evolve_one_shot(const WalkConfig& cfg, const NoiseModel& noise, int t);

// Walk step then the intermediate dephasing map E(s, s−1), for s = 1..t.
DensityMatrix evolve_stepwise(const WalkConfig& cfg, const NoiseModel& noise, int t);
// Stepwise states for t = 0..cfg.steps. Entries may fail positivity when an
// intermediate map is not completely positive.
std::vector<ComplexMatrix> stepwise_trajectory(const WalkConfig& cfg, const NoiseModel& noise,
                                               double delta, double eta);

DensityMatrix evolve(const WalkConfig& cfg, const NoiseModel& noise, EvolutionMode mode, int t);

struct PositionDistribution {
  int min_x = 0;
  std::vector<double> probabilities;  // indexed by site

  double at(int x) const;
};

PositionDistribution position_distribution(const DensityMatrix& rho, const Lattice& lattice);
PositionDistribution position_distribution(const PureState& psi, const Lattice& lattice);

}  // namespace nmqw
