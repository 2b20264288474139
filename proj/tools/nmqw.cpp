// Command-line front end: walk, witness, choi and spectrum subcommands.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure,
// 4 I/O error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nmqw/runner.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Common {
  std::string config_path;
  std::string out_dir;
  long long seed = 0;  // reserved; evolution is deterministic
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON experiment configuration");
  cmd->add_option("--out", c.out_dir, "output directory (overrides output_dir)");
  cmd->add_option("--seed", c.seed, "reserved, has no effect");
}

nmqw::ExperimentConfig load(const Common& c) {
  nmqw::ExperimentConfig cfg = c.config_path.empty() ? nmqw::ExperimentConfig{}
                                                     : nmqw::load_config(c.config_path);
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  return cfg;
}

void report(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy discrete-time quantum walk experiments"};
  app.require_subcommand(1);

  Common walk_opts, witness_opts, choi_opts, spectrum_opts;
  auto* walk = app.add_subcommand("walk", "position distribution and variance per step");
  add_common(walk, walk_opts);
  auto* witness = app.add_subcommand("witness", "witness series (td, mi, mid, qd, entropy, variance)");
  add_common(witness, witness_opts);

  auto* choi = app.add_subcommand("choi", "Choi eigenvalues of intermediate maps from t1");
  add_common(choi, choi_opts);
  std::optional<double> t1, t2_max, dt;
  choi->add_option("--t1", t1, "start of the intermediate interval");
  choi->add_option("--t2-max", t2_max, "last t2 of the grid");
  choi->add_option("--dt", dt, "grid spacing");

  auto* spectrum = app.add_subcommand("spectrum", "MFBF detrending and power spectrum of a series");
  add_common(spectrum, spectrum_opts);
  std::string input;
  std::optional<std::string> family;
  std::optional<double> prominence;
  bool hann = false;
  spectrum->add_option("input", input, "CSV with (step, value) columns")->required();
  spectrum->add_option("--family", family, "isotonic or exponential");
  spectrum->add_option("--min-prominence", prominence, "peak threshold as a fraction of max power");
  spectrum->add_flag("--hann", hann, "apply a Hann window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*walk) {
      const auto cfg = load(walk_opts);
      report(nmqw::run_walk(cfg, cfg.output_dir));
    } else if (*witness) {
      const auto cfg = load(witness_opts);
      report(nmqw::run_witness(cfg, cfg.output_dir));
    } else if (*choi) {
      auto cfg = load(choi_opts);
      if (t1) cfg.choi.t1 = *t1;
      if (t2_max) cfg.choi.t2_max = *t2_max;
      if (dt) cfg.choi.dt = *dt;
      if (!(cfg.choi.t1 >= 0.0) || !(cfg.choi.dt > 0.0) || !(cfg.choi.t2_max > cfg.choi.t1)) {
        throw nmqw::ConfigError("choi: need t1 >= 0, dt > 0 and t2_max > t1");
      }
      report(nmqw::run_choi_scan(cfg, cfg.output_dir));
    } else if (*spectrum) {
      auto cfg = load(spectrum_opts);
      if (family) {
        const auto f = nmqw::parse_family(*family);
        if (!f) throw nmqw::ConfigError("--family: expected isotonic or exponential");
        cfg.spectral.family = *f;
      }
      if (prominence) {
        if (!(*prominence >= 0.0 && *prominence <= 1.0)) {
          throw nmqw::ConfigError("--min-prominence: must lie in [0, 1]");
        }
        cfg.spectral.min_prominence = *prominence;
      }
      if (hann) cfg.spectral.hann = true;
      report(nmqw::run_spectrum(input, cfg.spectral, cfg.output_dir));
    }
  } catch (const nmqw::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const nmqw::CsvError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const nmqw::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const nmqw::DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const nmqw::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const nmqw::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
