#include "nmqw/walk.hpp"

#include <cmath>
#include <sstream>

#include "nmqw/divisibility.hpp"

namespace nmqw {

namespace {

constexpr double kEdgeAmplitude = 1e-14;

void require_step(const WalkConfig& cfg, int t) {
  if (cfg.steps < 0) throw ParameterError("walk: steps must be >= 0");
  if (t < 0 || t > cfg.steps) {
    std::ostringstream os;
    os << "walk: step " << t << " outside [0, " << cfg.steps << "]";
    throw ParameterError(os.str());
  }
}

void check_edges(const ComplexVector& v, Index sites) {
  for (Index c = 0; c < 2; ++c) {
    const double left = std::abs(v(c * sites));
    const double right = std::abs(v(c * sites + sites - 1));
    if (left >= kEdgeAmplitude || right >= kEdgeAmplitude) {
      std::ostringstream os;
      os << "walker amplitude reached the lattice edge (" << std::max(left, right)
         << "); lattice of " << sites << " sites is too small";
      throw EdgeAmplitudeError(os.str());
    }
  }
}

// W ρ W† through the column stencil: (W (W ρ)†)† .
ComplexMatrix conjugate_by_walk(const ComplexMatrix& rho, const ComplexMatrix& coin, Index sites) {
  ComplexMatrix left(rho.rows(), rho.cols());
  for (Index j = 0; j < rho.cols(); ++j) left.col(j) = apply_walk(rho.col(j), coin, sites);
  const ComplexMatrix left_adj = left.adjoint();
  ComplexMatrix both(rho.rows(), rho.cols());
  for (Index j = 0; j < rho.cols(); ++j) both.col(j) = apply_walk(left_adj.col(j), coin, sites);
  ComplexMatrix out = both.adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace

std::string_view mode_name(EvolutionMode mode) {
  switch (mode) {
    case EvolutionMode::noiseless:
      return "noiseless";
    case EvolutionMode::one_shot:
      return "one_shot";
    case EvolutionMode::stepwise:
      return "stepwise";
  }
  return "unknown";
}

Lattice::Lattice(const WalkConfig& cfg) : Lattice(cfg.steps, cfg.initial_position) {}

Lattice::Lattice(int steps, int center) {
  if (steps < 0) throw ParameterError("lattice: steps must be >= 0");
  sites_ = 2 * (static_cast<Index>(steps) + 1) + 1;
  min_x_ = center - (steps + 1);
}

Index Lattice::site(int x) const {
  if (x < min_x_ || x > max_x()) {
    std::ostringstream os;
    os << "position " << x << " outside lattice [" << min_x_ << ", " << max_x() << "]";
    throw DimensionError(os.str());
  }
  return static_cast<Index>(x - min_x_);
}

ComplexMatrix coin_operator(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  ComplexMatrix m(2, 2);
  m << c, s, s, -c;
  return m;
}

ComplexMatrix shift_operator(Index lattice_size) {
  if (lattice_size < 3 || lattice_size % 2 == 0) {
    throw DimensionError("shift_operator: lattice size must be odd and >= 3");
  }
  const Index n = lattice_size;
  ComplexMatrix s = ComplexMatrix::Zero(2 * n, 2 * n);
  for (Index x = 1; x + 1 < n; ++x) {
    s(x - 1, x) = 1.0;          // coin 0 moves left
    s(n + x + 1, n + x) = 1.0;  // coin 1 moves right
  }
  return s;
}

ComplexMatrix walk_operator(Index lattice_size, double theta) {
  return shift_operator(lattice_size) *
         kron(coin_operator(theta), ComplexMatrix::Identity(lattice_size, lattice_size));
}

PureState initial_state(const WalkConfig& cfg) { return initial_state(cfg, cfg.delta, cfg.eta); }

PureState initial_state(const WalkConfig& cfg, double delta, double eta) {
  const Lattice lattice(cfg);
  ComplexVector v = ComplexVector::Zero(2 * lattice.sites());
  v(lattice.index(0, cfg.initial_position)) = std::cos(delta);
  v(lattice.index(1, cfg.initial_position)) = std::polar(1.0, -eta) * std::sin(delta);
  return PureState(std::move(v));
}

ComplexVector apply_walk(const ComplexVector& v, const ComplexMatrix& coin, Index sites) {
  if (v.size() != 2 * sites) throw DimensionError("apply_walk: vector does not match lattice");
  const auto up = v.head(sites);
  const auto down = v.tail(sites);
  ComplexVector out = ComplexVector::Zero(v.size());
  // Interior sites only; edges are guarded below.
  const Index inner = sites - 2;
  out.segment(0, inner) = coin(0, 0) * up.segment(1, inner) + coin(0, 1) * down.segment(1, inner);
  out.segment(sites + 2, inner) =
      coin(1, 0) * up.segment(1, inner) + coin(1, 1) * down.segment(1, inner);
  check_edges(v, sites);
  check_edges(out, sites);
  return out;
}

PureState evolve_noiseless(const WalkConfig& cfg, int t) {
  require_step(cfg, t);
  const Lattice lattice(cfg);
  const ComplexMatrix coin = coin_operator(cfg.coin_angle);
  ComplexVector v = initial_state(cfg).amplitudes();
  for (int s = 0; s < t; ++s) v = apply_walk(v, coin, lattice.sites());
  return PureState(v / v.norm());
}

std::vector<PureState> noiseless_trajectory(const WalkConfig& cfg) {
  return noiseless_trajectory(cfg, cfg.delta, cfg.eta);
}

std::vector<PureState> noiseless_trajectory(const WalkConfig& cfg, double delta, double eta) {
  require_step(cfg, 0);
  const Lattice lattice(cfg);
  const ComplexMatrix coin = coin_operator(cfg.coin_angle);
  std::vector<PureState> out;
  out.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  out.push_back(initial_state(cfg, delta, eta));
  for (int s = 0; s < cfg.steps; ++s) {
    ComplexVector v = apply_walk(out.back().amplitudes(), coin, lattice.sites());
    out.emplace_back(v / v.norm());
  }
  return out;
}

FactoredState apply_one_shot(const PureState& psi, const NoiseModel& noise, double t) {
  FactoredState out;
  if (is_noiseless(noise)) {
    out.factor = psi.amplitudes();
    return out;
  }
  const auto kraus = kraus_at(noise, t);
  const Index half = psi.dim() / 2;
  out.factor.resize(psi.dim(), 2);
  for (Index j = 0; j < 2; ++j) {
    // (K ⊗ I)ψ for diagonal K scales the two coin halves.
    out.factor.col(j).head(half) = kraus[j](0, 0) * psi.amplitudes().head(half);
    out.factor.col(j).tail(half) = kraus[j](1, 1) * psi.amplitudes().tail(half);
  }
  return out;
}

DensityMatrix evolve_one_shot(const WalkConfig& cfg, const NoiseModel& noise, int t) {
  return apply_one_shot(evolve_noiseless(cfg, t), noise, static_cast<double>(t)).to_density();
}

std::vector<ComplexMatrix> stepwise_states(const WalkConfig& cfg, const NoiseModel& noise,
                                           double delta, double eta, int last_step) {
  require_step(cfg, last_step);
  for (int s = 1; s <= last_step; ++s) {
    const double k = decoherence_kernel(noise, static_cast<double>(s));
    if (std::abs(k) <= kInvertibilityThreshold) {
      std::ostringstream os;
      os << "stepwise evolution: " << model_name(noise) << " kernel vanishes at step " << s;
      throw NonInvertibleMapError(os.str());
    }
  }
  const Lattice lattice(cfg);
  const ComplexMatrix coin = coin_operator(cfg.coin_angle);
  const ComplexVector psi0 = initial_state(cfg, delta, eta).amplitudes();
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(last_step) + 1);
  out.push_back(psi0 * psi0.adjoint());
  for (int s = 1; s <= last_step; ++s) {
    ComplexMatrix rho = conjugate_by_walk(out.back(), coin, lattice.sites());
    if (!is_noiseless(noise)) {
      const KernelRatio r = kernel_ratio(noise, s - 1.0, static_cast<double>(s));
      rho = apply_signed_on_coin(rho, intermediate_kraus(r), lattice.split());
      rho = 0.5 * (rho + rho.adjoint()).eval();
    }
    out.push_back(std::move(rho));
  }
  return out;
}

std::vector<ComplexMatrix> stepwise_trajectory(const WalkConfig& cfg, const NoiseModel& noise,
                                               double delta, double eta) {
  return stepwise_states(cfg, noise, delta, eta, cfg.steps);
}

DensityMatrix evolve_stepwise(const WalkConfig& cfg, const NoiseModel& noise, int t) {
  std::vector<ComplexMatrix> states = stepwise_states(cfg, noise, cfg.delta, cfg.eta, t);
  return DensityMatrix(std::move(states.back()), 1e-10);
}

DensityMatrix evolve(const WalkConfig& cfg, const NoiseModel& noise, EvolutionMode mode, int t) {
  switch (mode) {
    case EvolutionMode::noiseless:
      return DensityMatrix::from_pure(evolve_noiseless(cfg, t));
    case EvolutionMode::one_shot:
      return evolve_one_shot(cfg, noise, t);
    case EvolutionMode::stepwise:
      return evolve_stepwise(cfg, noise, t);
  }
  throw ParameterError("evolve: unknown mode");
}

double PositionDistribution::at(int x) const {
  const int s = x - min_x;
  if (s < 0 || s >= static_cast<int>(probabilities.size())) return 0.0;
  return probabilities[static_cast<std::size_t>(s)];
}

PositionDistribution position_distribution(const DensityMatrix& rho, const Lattice& lattice) {
  if (rho.dim() != 2 * lattice.sites()) {
    throw DimensionError("position_distribution: state does not match lattice");
  }
  PositionDistribution out;
  out.min_x = lattice.min_x();
  out.probabilities.resize(static_cast<std::size_t>(lattice.sites()));
  const Index n = lattice.sites();
  for (Index s = 0; s < n; ++s) {
    out.probabilities[static_cast<std::size_t>(s)] =
        rho.matrix()(s, s).real() + rho.matrix()(n + s, n + s).real();
  }
  return out;
}

PositionDistribution position_distribution(const PureState& psi, const Lattice& lattice) {
  if (psi.dim() != 2 * lattice.sites()) {
    throw DimensionError("position_distribution: state does not match lattice");
  }
  PositionDistribution out;
  out.min_x = lattice.min_x();
  out.probabilities.resize(static_cast<std::size_t>(lattice.sites()));
  const Index n = lattice.sites();
  for (Index s = 0; s < n; ++s) {
    out.probabilities[static_cast<std::size_t>(s)] =
        std::norm(psi.amplitudes()(s)) + std::norm(psi.amplitudes()(n + s));
  }
  return out;
}

}  // namespace nmqw
