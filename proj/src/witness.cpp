#include "nmqw/witness.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

namespace nmqw {

namespace {

void require_dims(Index dim, Split split, const char* what) {
  if (split.coin <= 0 || split.position <= 0 || split.total() != dim) {
    std::ostringstream os;
    os << what << ": split " << split.coin << "x" << split.position << " does not factor "
       << dim;
    throw DimensionError(os.str());
  }
}

double entropy_of(const ComplexMatrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  const RealVector ev = hermitian_eigenvalues(0.5 * (hermitian + hermitian.adjoint()));
  return entropy_bits(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

// Rows of the factor belonging to coin value c.
auto coin_block(const ComplexMatrix& factor, Index c, Index dp) { return factor.middleRows(c * dp, dp); }

ComplexMatrix reduced_coin(const FactoredState& rho, Split split) {
  ComplexMatrix out(split.coin, split.coin);
  for (Index i = 0; i < split.coin; ++i) {
    for (Index j = 0; j < split.coin; ++j) {
      out(i, j) = coin_block(rho.factor, i, split.position)
                      .cwiseProduct(coin_block(rho.factor, j, split.position).conjugate())
                      .sum();
    }
  }
  return out;
}

// ρ_p = B·B† with the coin blocks side by side.
ComplexMatrix position_factor(const FactoredState& rho, Split split) {
  ComplexMatrix b(split.position, split.coin * rho.rank());
  for (Index c = 0; c < split.coin; ++c) {
    b.middleCols(c * rho.rank(), rho.rank()) = coin_block(rho.factor, c, split.position);
  }
  return b;
}

// Rotate every degenerate eigenspace (eigenvalue gap < kDegeneracyGap) onto the
// span of computational basis vectors, taken in ascending index order.
ComplexMatrix canonical_basis(const RealVector& values, const ComplexMatrix& vectors,
                              bool& degenerate) {
  ComplexMatrix out = vectors;
  const Index n = values.size();
  Index begin = 0;
  while (begin < n) {
    Index end = begin + 1;
    while (end < n && std::abs(values(end - 1) - values(end)) < kDegeneracyGap) ++end;
    const Index m = end - begin;
    if (m > 1) {
      degenerate = true;
      const ComplexMatrix q = vectors.middleCols(begin, m);
      Index chosen = 0;
      for (Index i = 0; i < q.rows() && chosen < m; ++i) {
        ComplexVector w = q * q.row(i).adjoint();
        for (Index k = 0; k < chosen; ++k) {
          const auto prev = out.col(begin + k);
          w -= prev * prev.dot(w);
        }
        const double norm = w.norm();
        if (norm > 1e-8) out.col(begin + chosen++) = w / norm;
      }
    }
    begin = end;
  }
  return out;
}

struct Marginal {
  RealVector values;
  ComplexMatrix vectors;
};

Marginal coin_marginal(const FactoredState& rho, Split split) {
  const HermitianEigensystem es = hermitian_eigensystem(reduced_coin(rho, split));
  return {es.values, es.vectors};
}

// Support eigenpairs of ρ_p from the Gram matrix of its factor.
Marginal position_support(const FactoredState& rho, Split split) {
  const ComplexMatrix b = position_factor(rho, split);
  ComplexMatrix gram = b.adjoint() * b;
  gram = 0.5 * (gram + gram.adjoint()).eval();
  const HermitianEigensystem es = hermitian_eigensystem(gram);
  Index support = 0;
  while (support < es.values.size() && es.values(support) > kEntropyCutoff) ++support;
  Marginal out;
  out.values = es.values.head(support);
  out.vectors.resize(split.position, support);
  for (Index k = 0; k < support; ++k) {
    out.vectors.col(k) = b * es.vectors.col(k) / std::sqrt(es.values(k));
  }
  return out;
}

// (⟨m| ⊗ I)·F for a coin vector m.
ComplexMatrix project_coin(const FactoredState& rho, Split split, const ComplexVector& m) {
  ComplexMatrix out = ComplexMatrix::Zero(split.position, rho.rank());
  for (Index c = 0; c < split.coin; ++c) {
    out += std::conj(m(c)) * coin_block(rho.factor, c, split.position);
  }
  return out;
}

ComplexVector bloch_vector(double theta, double phi) {
  ComplexVector m(2);
  m << std::cos(0.5 * theta), std::polar(1.0, phi) * std::sin(0.5 * theta);
  return m;
}

// Σ_i p_i S(ρ_p | outcome i) for the measurement {|m⟩, |m⊥⟩} on the coin.
double conditional_entropy(const FactoredState& rho, Split split, double theta, double phi) {
  const ComplexVector m = bloch_vector(theta, phi);
  ComplexVector m_perp(2);
  m_perp << -std::conj(m(1)), std::conj(m(0));
  double total = 0.0;
  for (const ComplexVector* v : {&m, static_cast<const ComplexVector*>(&m_perp)}) {
    const ComplexMatrix branch = project_coin(rho, split, *v);
    const ComplexMatrix gram = branch.adjoint() * branch;
    const double p = gram.trace().real();
    if (p > kEntropyCutoff) total += p * entropy_of(gram / p);
  }
  return total;
}

struct DiscordContext {
  const FactoredState* rho;
  Split split;
};

double discord_objective(const gsl_vector* x, void* params) {
  const auto* ctx = static_cast<const DiscordContext*>(params);
  return conditional_entropy(*ctx->rho, ctx->split, gsl_vector_get(x, 0), gsl_vector_get(x, 1));
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* s) const { gsl_multimin_fminimizer_free(s); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

// Bloch angles of (θ, φ) folded back to θ ∈ [0, π], φ ∈ [0, 2π).
std::pair<double, double> normalise_angles(double theta, double phi) {
  const double x = std::sin(theta) * std::cos(phi);
  const double y = std::sin(theta) * std::sin(phi);
  const double z = std::cos(theta);
  const double t = std::acos(std::clamp(z, -1.0, 1.0));
  double p = std::atan2(y, x);
  if (p < 0.0) p += 2.0 * kPi;
  return {t, p};
}

FactoredState swap_factors(const FactoredState& rho, Split split) {
  FactoredState out;
  out.factor.resize(rho.factor.rows(), rho.factor.cols());
  for (Index c = 0; c < split.coin; ++c) {
    for (Index x = 0; x < split.position; ++x) {
      out.factor.row(x * split.coin + c) = rho.factor.row(c * split.position + x);
    }
  }
  return out;
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  jobs.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += threads) body(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

std::vector<double> site_probabilities(const FactoredState& rho, Index sites) {
  std::vector<double> p(static_cast<std::size_t>(sites), 0.0);
  for (Index c = 0; c < 2; ++c) {
    const auto block = coin_block(rho.factor, c, sites);
    for (Index s = 0; s < sites; ++s) p[static_cast<std::size_t>(s)] += block.row(s).squaredNorm();
  }
  return p;
}

double evaluate_state(WitnessKind kind, const FactoredState& rho, const Lattice& lattice,
                      const DiscordOptions& discord_options) {
  const Split split = lattice.split();
  switch (kind) {
    case WitnessKind::mutual_information:
      return mutual_information(rho, split);
    case WitnessKind::mid:
      return mid(rho, split).value;
    case WitnessKind::discord:
      return discord(rho, split, discord_options).value;
    case WitnessKind::entropy:
      return coin_entropy(rho, split);
    case WitnessKind::variance: {
      const auto p = site_probabilities(rho, lattice.sites());
      return variance(p, lattice.min_x());
    }
    case WitnessKind::trace_distance:
      break;
  }
  throw ParameterError("evaluate_state: trace distance needs two states");
}

}  // namespace

double trace_distance(const ComplexMatrix& rho1, const ComplexMatrix& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols()) {
    throw DimensionError("trace_distance: states have different dimensions");
  }
  return 0.5 * trace_norm(rho1 - rho2);
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  return trace_distance(rho1.matrix(), rho2.matrix());
}

double mutual_information(const FactoredState& rho, Split split) {
  require_dims(rho.dim(), split, "mutual_information");
  const double s_coin = entropy_of(reduced_coin(rho, split));
  const ComplexMatrix b = position_factor(rho, split);
  const double s_pos = entropy_of(b.adjoint() * b);
  return s_coin + s_pos - von_neumann_entropy(rho);
}

double mutual_information(const DensityMatrix& rho, Split split) {
  require_dims(rho.dim(), split, "mutual_information");
  return mutual_information(factorize(rho), split);
}

MidResult mid(const FactoredState& rho, Split split) {
  require_dims(rho.dim(), split, "mid");
  MidResult out;
  const Marginal coin = coin_marginal(rho, split);
  const ComplexMatrix coin_basis = canonical_basis(coin.values, coin.vectors, out.degenerate);
  const Marginal pos = position_support(rho, split);
  // Null-space projectors of ρ_p carry zero joint probability and are skipped.
  const ComplexMatrix pos_basis = canonical_basis(pos.values, pos.vectors, out.degenerate);

  const Index np = pos_basis.cols();
  std::vector<double> joint;
  joint.reserve(static_cast<std::size_t>(split.coin * np));
  std::vector<double> p_coin(static_cast<std::size_t>(split.coin), 0.0);
  std::vector<double> p_pos(static_cast<std::size_t>(np), 0.0);
  for (Index i = 0; i < split.coin; ++i) {
    const ComplexMatrix branch = project_coin(rho, split, coin_basis.col(i));
    const ComplexMatrix amps = pos_basis.adjoint() * branch;
    for (Index k = 0; k < np; ++k) {
      const double p = amps.row(k).squaredNorm();
      joint.push_back(p);
      p_coin[static_cast<std::size_t>(i)] += p;
      p_pos[static_cast<std::size_t>(k)] += p;
    }
  }
  const double classical = entropy_bits(p_coin) + entropy_bits(p_pos) - entropy_bits(joint);
  out.value = mutual_information(rho, split) - classical;
  return out;
}

MidResult mid(const DensityMatrix& rho, Split split) {
  require_dims(rho.dim(), split, "mid");
  return mid(factorize(rho), split);
}

DiscordResult discord(const FactoredState& rho_in, Split split_in, const DiscordOptions& options) {
  require_dims(rho_in.dim(), split_in, "discord");
  FactoredState swapped;
  const FactoredState* rho = &rho_in;
  Split split = split_in;
  if (options.measured == Subsystem::position) {
    swapped = swap_factors(rho_in, split_in);
    rho = &swapped;
    split = Split{split_in.position, split_in.coin};
  }
  if (split.coin != 2) {
    throw DimensionError("discord: the measured subsystem must be two-dimensional");
  }
  if (options.grid < 2) throw ParameterError("discord: grid must have at least 2 points per axis");

  const double s_marginal = entropy_of([&] {
    const ComplexMatrix b = position_factor(*rho, split);
    return ComplexMatrix(b.adjoint() * b);
  }());
  const double info = mutual_information(*rho, split);

  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  double best_phi = 0.0;
  auto consider = [&](double theta, double phi) {
    const double h = conditional_entropy(*rho, split, theta, phi);
    if (h < best) {
      best = h;
      best_theta = theta;
      best_phi = phi;
    }
  };
  const int n = options.grid;
  for (int i = 0; i < n; ++i) {
    const double theta = kPi * i / (n - 1);
    for (int j = 0; j < n; ++j) consider(theta, 2.0 * kPi * j / n);
  }
  // The marginal eigenbasis is the measurement used by MID; seeding it keeps
  // the optimum at least as good.
  {
    const Marginal m = coin_marginal(*rho, split);
    const ComplexVector v = m.vectors.col(0);
    const double theta = 2.0 * std::atan2(std::abs(v(1)), std::abs(v(0)));
    const double phi = std::arg(v(1)) - std::arg(v(0));
    consider(theta, phi);
  }

  DiscordContext ctx{rho, split};
  gsl_multimin_function fn{&discord_objective, 2, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2));
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(2));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(2));
  gsl_vector_set(x.get(), 0, best_theta);
  gsl_vector_set(x.get(), 1, best_phi);
  gsl_vector_set(step.get(), 0, 0.5 * kPi / (n - 1));
  gsl_vector_set(step.get(), 1, kPi / n);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());
  // J is quadratic at its maximum, so a simplex of size √tol resolves J to tol.
  const double size_tol = std::sqrt(options.tolerance) * 1e-2;
  for (int iter = 0; iter < 1000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), size_tol) ==
        GSL_SUCCESS) {
      break;
    }
  }
  if (solver->fval < best) {
    best = solver->fval;
    best_theta = gsl_vector_get(solver->x, 0);
    best_phi = gsl_vector_get(solver->x, 1);
  }

  DiscordResult out;
  out.classical_correlation = s_marginal - best;
  out.value = info - out.classical_correlation;
  std::tie(out.theta, out.phi) = normalise_angles(best_theta, best_phi);
  return out;
}

DiscordResult discord(const DensityMatrix& rho, Split split, const DiscordOptions& options) {
  require_dims(rho.dim(), split, "discord");
  return discord(factorize(rho), split, options);
}

double coin_entropy(const DensityMatrix& rho, Split split) {
  return von_neumann_entropy(partial_trace(rho, split, Subsystem::coin));
}

double coin_entropy(const FactoredState& rho, Split split) {
  require_dims(rho.dim(), split, "coin_entropy");
  return entropy_of(reduced_coin(rho, split));
}

double variance(std::span<const double> probabilities, int min_x) {
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double x = static_cast<double>(min_x) + static_cast<double>(i);
    mean += probabilities[i] * x;
    second += probabilities[i] * x * x;
  }
  return second - mean * mean;
}

double variance(const PositionDistribution& p) { return variance(p.probabilities, p.min_x); }

std::string_view witness_name(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::trace_distance:
      return "td";
    case WitnessKind::mutual_information:
      return "mi";
    case WitnessKind::mid:
      return "mid";
    case WitnessKind::discord:
      return "qd";
    case WitnessKind::entropy:
      return "entropy";
    case WitnessKind::variance:
      return "variance";
  }
  return "unknown";
}

std::optional<WitnessKind> parse_witness(std::string_view name) {
  for (WitnessKind k : {WitnessKind::trace_distance, WitnessKind::mutual_information,
                        WitnessKind::mid, WitnessKind::discord, WitnessKind::entropy,
                        WitnessKind::variance}) {
    if (witness_name(k) == name) return k;
  }
  return std::nullopt;
}

WitnessSeries witness_series(const WalkConfig& cfg, const NoiseModel& noise, EvolutionMode mode,
                             WitnessKind kind, const WitnessOptions& options) {
  const WitnessKind kinds[] = {kind};
  return witness_series(cfg, noise, mode, kinds, options).front();
}

std::vector<WitnessSeries> witness_series(const WalkConfig& cfg, const NoiseModel& noise,
                                          EvolutionMode mode, std::span<const WitnessKind> kinds,
                                          const WitnessOptions& options) {
  validate(noise);
  const Lattice lattice(cfg);
  const Split split = lattice.split();
  const std::size_t n = static_cast<std::size_t>(cfg.steps) + 1;
  const bool wants_td = std::find(kinds.begin(), kinds.end(), WitnessKind::trace_distance) != kinds.end();
  const bool wants_state = std::any_of(kinds.begin(), kinds.end(), [](WitnessKind k) {
    return k != WitnessKind::trace_distance;
  });
  const TdPair& pair = options.td_pair;

  std::vector<WitnessSeries> out(kinds.size());
  for (std::size_t w = 0; w < kinds.size(); ++w) {
    out[w].kind = kinds[w];
    out[w].steps.resize(n);
    out[w].values.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) out[w].steps[t] = static_cast<int>(t);
  }

  if (mode == EvolutionMode::stepwise) {
    // Sequential in t; states may be non-positive when an intermediate map is NCP.
    std::vector<ComplexMatrix> main_traj;
    if (wants_state) main_traj = stepwise_trajectory(cfg, noise, cfg.delta, cfg.eta);
    std::vector<ComplexMatrix> td1;
    std::vector<ComplexMatrix> td2;
    if (wants_td) {
      td1 = stepwise_trajectory(cfg, noise, pair.delta1, pair.eta1);
      td2 = stepwise_trajectory(cfg, noise, pair.delta2, pair.eta2);
    }
    for (std::size_t t = 0; t < n; ++t) {
      std::optional<FactoredState> factored;
      for (std::size_t w = 0; w < kinds.size(); ++w) {
        double value = 0.0;
        if (kinds[w] == WitnessKind::trace_distance) {
          value = trace_distance(partial_trace(td1[t], split, Subsystem::coin),
                                 partial_trace(td2[t], split, Subsystem::coin));
        } else if (kinds[w] == WitnessKind::variance) {
          std::vector<double> p(static_cast<std::size_t>(lattice.sites()));
          for (Index s = 0; s < lattice.sites(); ++s) {
            p[static_cast<std::size_t>(s)] =
                main_traj[t](s, s).real() + main_traj[t](lattice.sites() + s, lattice.sites() + s).real();
          }
          value = variance(p, lattice.min_x());
        } else {
          if (!factored) factored = factorize(DensityMatrix(main_traj[t], 1e-10));
          value = evaluate_state(kinds[w], *factored, lattice, options.discord);
        }
        out[w].values[t] = value;
      }
    }
  } else {
    const NoiseModel effective = mode == EvolutionMode::noiseless ? NoiseModel{NoNoise{}} : noise;
    std::vector<PureState> main_traj;
    if (wants_state) main_traj = noiseless_trajectory(cfg, cfg.delta, cfg.eta);
    std::vector<PureState> td1;
    std::vector<PureState> td2;
    if (wants_td) {
      td1 = noiseless_trajectory(cfg, pair.delta1, pair.eta1);
      td2 = noiseless_trajectory(cfg, pair.delta2, pair.eta2);
    }
    parallel_for(n, options.threads, [&](std::size_t t) {
      const double time = static_cast<double>(t);
      std::optional<FactoredState> state;
      if (wants_state) state = apply_one_shot(main_traj[t], effective, time);
      for (std::size_t w = 0; w < kinds.size(); ++w) {
        double value = 0.0;
        if (kinds[w] == WitnessKind::trace_distance) {
          value = trace_distance(reduced_coin(apply_one_shot(td1[t], effective, time), split),
                                 reduced_coin(apply_one_shot(td2[t], effective, time), split));
        } else {
          value = evaluate_state(kinds[w], *state, lattice, options.discord);
        }
        out[w].values[t] = value;
      }
    });
  }

  for (const auto& series : out) {
    for (std::size_t t = 0; t < n; ++t) {
      if (!std::isfinite(series.values[t])) {
        std::ostringstream os;
        os << witness_name(series.kind) << " is not finite at step " << t;
        throw NumericalError(os.str());
      }
    }
  }
  return out;
}

}  // namespace nmqw
