#include "nmqw/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace nmqw {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view key, const std::string& msg) {
  throw ConfigError("config key '" + std::string(key) + "': " + msg);
}

std::string join(std::string_view where, std::string_view key) {
  return where.empty() ? std::string(key) : std::string(where) + "." + std::string(key);
}

const json& require_object(const json& j, std::string_view where) {
  if (!j.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
  return j;
}

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail(join(where, item.key()), "unknown key");
    }
  }
}

bool read_number(const json& obj, std::string_view where, const char* key, double& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (!it->is_number()) fail(join(where, key), "expected a number");
  out = it->get<double>();
  return true;
}

void read_int(const json& obj, std::string_view where, const char* key, int& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer()) fail(join(where, key), "expected an integer");
  const auto v = it->get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    fail(join(where, key), "integer out of range");
  }
  out = static_cast<int>(v);
}

void read_bool(const json& obj, std::string_view where, const char* key, bool& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_boolean()) fail(join(where, key), "expected true or false");
  out = it->get<bool>();
}

bool read_string(const json& obj, std::string_view where, const char* key, std::string& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (!it->is_string()) fail(join(where, key), "expected a string");
  out = it->get<std::string>();
  return true;
}

void read_angle(const json& obj, std::string_view where, const char* key, Angle& out) {
  double deg = 0.0;
  if (read_number(obj, where, key, deg)) out = Angle::degrees(deg);
}

NoiseModel parse_noise(const json& j) {
  require_object(j, "noise");
  std::string model = "none";
  read_string(j, "noise", "model", model);
  // Every present parameter is range-checked before missing ones are defaulted.
  auto positive = [&](const char* key, double fallback) {
    double v = fallback;
    if (read_number(j, "noise", key, v) && !(v > 0.0)) fail(join("noise", key), "must be > 0");
    return v;
  };
  auto nonnegative = [&](const char* key, double fallback) {
    double v = fallback;
    if (read_number(j, "noise", key, v) && !(v >= 0.0)) fail(join("noise", key), "must be >= 0");
    return v;
  };
  NoiseModel out;
  if (model == "none") {
    check_keys(j, "noise", {"model"});
    out = NoNoise{};
  } else if (model == "rtn") {
    check_keys(j, "noise", {"model", "a", "gamma"});
    const double gamma = positive("gamma", 0.001);
    out = RtnParams{nonnegative("a", 0.08), gamma};
  } else if (model == "oun") {
    check_keys(j, "noise", {"model", "Gamma", "gamma"});
    const double gamma = positive("gamma", 0.01);
    out = OunParams{nonnegative("Gamma", 0.1), gamma};
  } else if (model == "pln") {
    check_keys(j, "noise", {"model", "Gamma", "gamma", "alpha"});
    const double gamma = positive("gamma", 0.01);
    const double relaxation = nonnegative("Gamma", 0.1);
    double alpha = 2.0;
    if (read_number(j, "noise", "alpha", alpha) && !(alpha > 1.0)) fail("noise.alpha", "must be > 1");
    out = PlnParams{relaxation, gamma, alpha};
  } else {
    fail("noise.model", "expected one of none, rtn, oun, pln (got '" + model + "')");
  }
  try {
    validate(out);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config key 'noise': ") + e.what());
  }
  return out;
}

json noise_to_json(const NoiseModel& noise) {
  json j;
  j["model"] = std::string(model_name(noise));
  if (const auto* p = std::get_if<RtnParams>(&noise)) {
    j["a"] = p->a;
    j["gamma"] = p->gamma;
  } else if (const auto* p = std::get_if<OunParams>(&noise)) {
    j["Gamma"] = p->relaxation;
    j["gamma"] = p->gamma;
  } else if (const auto* p = std::get_if<PlnParams>(&noise)) {
    j["Gamma"] = p->relaxation;
    j["gamma"] = p->gamma;
    j["alpha"] = p->alpha;
  }
  return j;
}

EvolutionMode parse_mode(const std::string& s) {
  for (EvolutionMode m : {EvolutionMode::noiseless, EvolutionMode::one_shot, EvolutionMode::stepwise}) {
    if (mode_name(m) == s) return m;
  }
  fail("mode", "expected one of noiseless, one_shot, stepwise (got '" + s + "')");
}

}  // namespace

WalkConfig ExperimentConfig::walk_config() const {
  WalkConfig w;
  w.steps = walk.steps;
  w.coin_angle = walk.coin_angle.rad();
  w.delta = walk.delta.rad();
  w.eta = walk.eta.rad();
  w.initial_position = walk.initial_position;
  return w;
}

WitnessOptions ExperimentConfig::witness_options() const {
  WitnessOptions o;
  o.td_pair = {td_pair.delta1.rad(), td_pair.eta1.rad(), td_pair.delta2.rad(), td_pair.eta2.rad()};
  o.discord.grid = discord.grid;
  o.discord.measured = discord.measured;
  return o;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "");
  check_keys(root, "", {"walk", "noise", "mode", "witnesses", "td_pair", "spectral", "choi",
                        "discord", "output_dir"});
  ExperimentConfig cfg;

  if (const auto it = root.find("walk"); it != root.end()) {
    const json& w = require_object(*it, "walk");
    check_keys(w, "walk", {"steps", "coin_angle", "delta", "eta", "initial_position"});
    read_int(w, "walk", "steps", cfg.walk.steps);
    if (cfg.walk.steps < 0) fail("walk.steps", "must be >= 0");
    read_angle(w, "walk", "coin_angle", cfg.walk.coin_angle);
    read_angle(w, "walk", "delta", cfg.walk.delta);
    read_angle(w, "walk", "eta", cfg.walk.eta);
    read_int(w, "walk", "initial_position", cfg.walk.initial_position);
  }

  if (const auto it = root.find("noise"); it != root.end()) cfg.noise = parse_noise(*it);

  if (std::string mode; read_string(root, "", "mode", mode)) cfg.mode = parse_mode(mode);

  if (const auto it = root.find("witnesses"); it != root.end()) {
    if (!it->is_array() || it->empty()) fail("witnesses", "expected a non-empty array of names");
    cfg.witnesses.clear();
    for (const json& name : *it) {
      if (!name.is_string()) fail("witnesses", "expected witness names as strings");
      const auto kind = parse_witness(name.get<std::string>());
      if (!kind) {
        fail("witnesses", "unknown witness '" + name.get<std::string>() +
                              "' (expected td, mi, mid, qd, entropy, variance)");
      }
      if (std::find(cfg.witnesses.begin(), cfg.witnesses.end(), *kind) != cfg.witnesses.end()) {
        fail("witnesses", "duplicate witness '" + name.get<std::string>() + "'");
      }
      cfg.witnesses.push_back(*kind);
    }
  }

  if (const auto it = root.find("td_pair"); it != root.end()) {
    const json& p = require_object(*it, "td_pair");
    check_keys(p, "td_pair", {"delta1", "eta1", "delta2", "eta2"});
    read_angle(p, "td_pair", "delta1", cfg.td_pair.delta1);
    read_angle(p, "td_pair", "eta1", cfg.td_pair.eta1);
    read_angle(p, "td_pair", "delta2", cfg.td_pair.delta2);
    read_angle(p, "td_pair", "eta2", cfg.td_pair.eta2);
  }

  if (const auto it = root.find("spectral"); it != root.end()) {
    const json& s = require_object(*it, "spectral");
    check_keys(s, "spectral", {"family", "min_prominence", "hann"});
    if (std::string family; read_string(s, "spectral", "family", family)) {
      const auto f = parse_family(family);
      if (!f) fail("spectral.family", "expected isotonic or exponential (got '" + family + "')");
      cfg.spectral.family = *f;
    }
    if (read_number(s, "spectral", "min_prominence", cfg.spectral.min_prominence) &&
        !(cfg.spectral.min_prominence >= 0.0 && cfg.spectral.min_prominence <= 1.0)) {
      fail("spectral.min_prominence", "must lie in [0, 1]");
    }
    read_bool(s, "spectral", "hann", cfg.spectral.hann);
  }

  if (const auto it = root.find("choi"); it != root.end()) {
    const json& c = require_object(*it, "choi");
    check_keys(c, "choi", {"t1", "t2_max", "dt"});
    read_number(c, "choi", "t1", cfg.choi.t1);
    read_number(c, "choi", "t2_max", cfg.choi.t2_max);
    read_number(c, "choi", "dt", cfg.choi.dt);
    if (!(cfg.choi.t1 >= 0.0)) fail("choi.t1", "must be >= 0");
    if (!(cfg.choi.dt > 0.0)) fail("choi.dt", "must be > 0");
    if (!(cfg.choi.t2_max > cfg.choi.t1)) fail("choi.t2_max", "must exceed choi.t1");
  }

  if (const auto it = root.find("discord"); it != root.end()) {
    const json& d = require_object(*it, "discord");
    check_keys(d, "discord", {"grid", "measured"});
    read_int(d, "discord", "grid", cfg.discord.grid);
    if (cfg.discord.grid < 2) fail("discord.grid", "must be >= 2");
    if (std::string measured; read_string(d, "discord", "measured", measured)) {
      if (measured == "coin") {
        cfg.discord.measured = Subsystem::coin;
      } else if (measured == "position") {
        cfg.discord.measured = Subsystem::position;
      } else {
        fail("discord.measured", "expected coin or position");
      }
    }
  }

  if (read_string(root, "", "output_dir", cfg.output_dir) && cfg.output_dir.empty()) {
    fail("output_dir", "must not be empty");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string echo_config(const ExperimentConfig& cfg) {
  json root;
  root["walk"] = {{"steps", cfg.walk.steps},
                  {"coin_angle", cfg.walk.coin_angle.deg()},
                  {"delta", cfg.walk.delta.deg()},
                  {"eta", cfg.walk.eta.deg()},
                  {"initial_position", cfg.walk.initial_position}};
  root["noise"] = noise_to_json(cfg.noise);
  root["mode"] = std::string(mode_name(cfg.mode));
  json names = json::array();
  for (WitnessKind k : cfg.witnesses) names.push_back(std::string(witness_name(k)));
  root["witnesses"] = names;
  root["td_pair"] = {{"delta1", cfg.td_pair.delta1.deg()},
                     {"eta1", cfg.td_pair.eta1.deg()},
                     {"delta2", cfg.td_pair.delta2.deg()},
                     {"eta2", cfg.td_pair.eta2.deg()}};
  root["spectral"] = {{"family", std::string(family_name(cfg.spectral.family))},
                      {"min_prominence", cfg.spectral.min_prominence},
                      {"hann", cfg.spectral.hann}};
  root["choi"] = {{"t1", cfg.choi.t1}, {"t2_max", cfg.choi.t2_max}, {"dt", cfg.choi.dt}};
  root["discord"] = {{"grid", cfg.discord.grid},
                     {"measured", cfg.discord.measured == Subsystem::coin ? "coin" : "position"}};
  root["output_dir"] = cfg.output_dir;
  return root.dump(2);
}

}  // namespace nmqw
