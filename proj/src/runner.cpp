#include "nmqw/runner.hpp"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <system_error>

#include "json.hpp"
#include "nmqw/csv.hpp"
#include "nmqw/divisibility.hpp"

namespace nmqw {

namespace {

using nlohmann::json;

std::string prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

std::string in_dir(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Position probabilities per step, indexed by lattice site.
std::vector<std::vector<double>> distributions(const ExperimentConfig& cfg) {
  const WalkConfig walk = cfg.walk_config();
  const Lattice lattice(walk);
  std::vector<std::vector<double>> out;
  if (cfg.mode == EvolutionMode::stepwise) {
    const auto states = stepwise_trajectory(walk, cfg.noise, walk.delta, walk.eta);
    const Index n = lattice.sites();
    for (const auto& rho : states) {
      std::vector<double> p(static_cast<std::size_t>(n));
      for (Index s = 0; s < n; ++s) {
        p[static_cast<std::size_t>(s)] = rho(s, s).real() + rho(n + s, n + s).real();
      }
      out.push_back(std::move(p));
    }
    return out;
  }
  // Coin dephasing applied once leaves the position marginal untouched.
  for (const auto& psi : noiseless_trajectory(walk)) {
    out.push_back(position_distribution(psi, lattice).probabilities);
  }
  return out;
}

}  // namespace

std::vector<std::string> run_walk(const ExperimentConfig& cfg, const std::string& out_dir) {
  prepare_dir(out_dir);
  const Lattice lattice(cfg.walk_config());
  const int x0 = cfg.walk.initial_position;
  const auto dists = distributions(cfg);

  CsvTable dist{{"step", "x", "probability"}, {}};
  CsvTable var{{"step", "variance"}, {}};
  for (std::size_t t = 0; t < dists.size(); ++t) {
    const int step = static_cast<int>(t);
    for (int x = x0 - step; x <= x0 + step; x += 2) {
      dist.rows.push_back({static_cast<double>(step), static_cast<double>(x),
                           dists[t][static_cast<std::size_t>(lattice.site(x))]});
    }
    var.rows.push_back({static_cast<double>(step), variance(dists[t], lattice.min_x())});
  }
  const std::string dist_path = in_dir(out_dir, "distribution.csv");
  const std::string var_path = in_dir(out_dir, "variance.csv");
  write_csv(dist_path, dist);
  write_csv(var_path, var);
  return {dist_path, var_path};
}

std::vector<std::string> run_witness(const ExperimentConfig& cfg, const std::string& out_dir) {
  prepare_dir(out_dir);
  const auto series = witness_series(cfg.walk_config(), cfg.noise, cfg.mode, cfg.witnesses,
                                     cfg.witness_options());
  std::vector<std::string> written;
  json tags = json::array();
  for (const auto& s : series) {
    CsvTable table{{"step", "value"}, {}};
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      table.rows.push_back({static_cast<double>(s.steps[i]), s.values[i]});
    }
    const std::string name = std::string(witness_name(s.kind));
    written.push_back(in_dir(out_dir, name + ".csv"));
    write_csv(written.back(), table);
    tags.push_back(name);
  }
  json meta;
  meta["artifact"] = "nmqw";
  meta["version"] = std::string(kVersion);
  meta["timestamp"] = utc_timestamp();
  meta["witnesses"] = tags;
  meta["config"] = json::parse(echo_config(cfg));
  written.push_back(in_dir(out_dir, "metadata.json"));
  write_text(written.back(), meta.dump(2) + "\n");
  return written;
}

std::vector<std::string> run_choi_scan(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (is_noiseless(cfg.noise)) throw ConfigError("config key 'noise': choi scan needs a noise model");
  prepare_dir(out_dir);
  std::vector<double> grid;
  for (int k = 1;; ++k) {
    const double t2 = cfg.choi.t1 + k * cfg.choi.dt;
    if (t2 > cfg.choi.t2_max + 1e-9 * cfg.choi.dt) break;
    grid.push_back(t2);
  }
  const ChoiScanReport report = cp_divisibility_scan(cfg.noise, cfg.choi.t1, grid);
  CsvTable table{{"t2", "lambda3", "lambda4", "is_cp", "invertible"}, {}};
  for (const auto& p : report.points) {
    table.rows.push_back({p.t2, p.lambda3, p.lambda4, p.is_cp ? 1.0 : 0.0, p.invertible ? 1.0 : 0.0});
  }
  const std::string path = in_dir(out_dir, "choi.csv");
  write_csv(path, table);
  return {path};
}

std::vector<std::string> run_spectrum(const std::string& input_csv, const SpectralSection& options,
                                      const std::string& out_dir) {
  const CsvTable input = read_csv(input_csv);
  if (input.header.size() != 2) {
    throw CsvError(input_csv, 1, "expected two columns (step, value)");
  }
  std::vector<double> steps;
  std::vector<double> values;
  for (std::size_t i = 0; i < input.rows.size(); ++i) {
    const double step = input.rows[i][0];
    const double value = input.rows[i][1];
    if (!std::isfinite(step) || !std::isfinite(value)) {
      throw CsvError(input_csv, i + 2, "non-finite value");
    }
    if (!steps.empty() && std::abs(step - steps.back() - 1.0) > 1e-9) {
      throw CsvError(input_csv, i + 2, "steps must increase by exactly 1");
    }
    steps.push_back(step);
    values.push_back(value);
  }
  const TimeSeries series = TimeSeries::from(std::move(steps), std::move(values));
  const DisambiguationReport r =
      disambiguate(series, options.family, options.min_prominence, SpectrumOptions{options.hann});

  prepare_dir(out_dir);
  CsvTable fit{{"step", "fit"}, {}};
  CsvTable residual{{"step", "residual"}, {}};
  for (std::size_t i = 0; i < series.size(); ++i) {
    fit.rows.push_back({series.times[i], r.fit.fitted[i]});
    residual.rows.push_back({series.times[i], r.residual.values[i]});
  }
  CsvTable spectrum{{"frequency", "power"}, {}};
  double top = 0.0;
  for (std::size_t k = 0; k < r.spectrum.power.size(); ++k) {
    spectrum.rows.push_back({r.spectrum.frequencies[k], r.spectrum.power[k]});
    top = std::max(top, r.spectrum.power[k]);
  }
  json peaks = json::array();
  for (const Peak& p : r.peaks) {
    peaks.push_back({{"frequency", p.frequency}, {"power", p.power}, {"relative_power", p.power / top}});
  }
  const std::vector<std::string> paths = {in_dir(out_dir, "fit.csv"), in_dir(out_dir, "residual.csv"),
                                          in_dir(out_dir, "spectrum.csv"), in_dir(out_dir, "peaks.json")};
  write_csv(paths[0], fit);
  write_csv(paths[1], residual);
  write_csv(paths[2], spectrum);
  write_text(paths[3], peaks.dump(2) + "\n");
  return paths;
}

}  // namespace nmqw
