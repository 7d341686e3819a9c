#include "lasalt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "lasalt/io.hpp"
#include "lasalt/ops.hpp"

using nlohmann::json;

namespace lasalt {

namespace {

void reject_unknown(const json& obj, const char* where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError(std::string("unknown key \"") + it.key() + "\" in " +
                        where);
  }
}

InitialCondition parse_ic(const json& obj, const char* where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  InitialCondition ic;
  if (obj.contains("file")) {
    reject_unknown(obj, where, {"file"});
    ic.preset.clear();
    ic.file = obj.at("file").get<std::string>();
    return ic;
  }
  ic.preset = obj.value("preset", "zero");
  if (ic.preset == "zero") {
    reject_unknown(obj, where, {"preset"});
  } else if (ic.preset == "taylor_green") {
    reject_unknown(obj, where, {"preset", "a"});
    ic.params["a"] = obj.value("a", 1.0);
  } else if (ic.preset == "theta_blob") {
    reject_unknown(obj, where, {"preset", "cx", "cy", "r", "amp"});
    ic.params["cx"] = obj.value("cx", kTwoPi / 2);
    ic.params["cy"] = obj.value("cy", kTwoPi / 2);
    ic.params["r"] = obj.value("r", 0.5);
    ic.params["amp"] = obj.value("amp", 1.0);
  } else {
    throw ConfigError("unknown initial-condition preset \"" + ic.preset +
                      "\" in " + where);
  }
  return ic;
}

NoiseSpec parse_noise(const json& obj) {
  NoiseSpec spec;
  if (!obj.is_object()) throw ConfigError("noise must be an object");
  if (obj.contains("preset")) {
    reject_unknown(obj, "noise", {"preset", "eps"});
    const std::string preset = obj.at("preset").get<std::string>();
    if (preset != "canonical")
      throw ConfigError("unknown noise preset \"" + preset + "\"");
    return NoiseSpec::canonical(obj.value("eps", 0.1));
  }
  reject_unknown(obj, "noise", {"xis"});
  for (const json& xj : obj.value("xis", json::array())) {
    reject_unknown(xj, "noise.xis[]", {"constant", "modes"});
    XiSpec xi;
    if (xj.contains("constant")) {
      xi.constant[0] = xj.at("constant").at(0).get<double>();
      xi.constant[1] = xj.at("constant").at(1).get<double>();
    }
    for (const json& mj : xj.value("modes", json::array())) {
      reject_unknown(mj, "noise.xis[].modes[]",
                     {"component", "kx", "ky", "amp_cos", "amp_sin"});
      NoiseMode m;
      m.component = mj.value("component", 1);
      if (m.component != 1 && m.component != 2)
        throw ConfigError("noise mode component must be 1 or 2");
      m.kx = mj.value("kx", 0);
      m.ky = mj.value("ky", 0);
      m.amp_cos = mj.value("amp_cos", 0.0);
      m.amp_sin = mj.value("amp_sin", 0.0);
      xi.modes.push_back(m);
    }
    spec.xis.push_back(std::move(xi));
  }
  return spec;
}

json dump_ic(const InitialCondition& ic) {
  json obj;
  if (!ic.file.empty()) {
    obj["file"] = ic.file;
    return obj;
  }
  obj["preset"] = ic.preset;
  for (const auto& [k, v] : ic.params) obj[k] = v;
  return obj;
}

json dump_noise(const NoiseSpec& spec) {
  json xis = json::array();
  for (const XiSpec& xi : spec.xis) {
    json xj;
    xj["constant"] = {xi.constant[0], xi.constant[1]};
    json modes = json::array();
    for (const NoiseMode& m : xi.modes)
      modes.push_back({{"component", m.component},
                       {"kx", m.kx},
                       {"ky", m.ky},
                       {"amp_cos", m.amp_cos},
                       {"amp_sin", m.amp_sin}});
    xj["modes"] = std::move(modes);
    xis.push_back(std::move(xj));
  }
  return json{{"xis", std::move(xis)}};
}

void validate(const RunConfig& cfg) {
  if (cfg.grid_n < 8 || cfg.grid_n % 2 != 0)
    throw ConfigError("grid.n must be even and at least 8");
  if (!(cfg.length > 0.0)) throw ConfigError("grid.length must be positive");
  if (!(cfg.dt > 0.0)) throw ConfigError("solver.dt must be positive");
  if (!(cfg.t_end > 0.0)) throw ConfigError("solver.t_end must be positive");
  if (cfg.save_every < 1) throw ConfigError("solver.save_every must be >= 1");
  if (cfg.members < 1) throw ConfigError("ensemble.members must be >= 1");
  if (cfg.moments_P < 2 || cfg.moments_P > 6)
    throw ConfigError("ensemble.moments_P must lie in [2, 6]");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"grid", "physics", "noise", "initial", "solver", "ensemble",
                  "output"});
  RunConfig cfg;
  if (root.contains("grid")) {
    const json& grid = root["grid"];
    reject_unknown(grid, "grid", {"n", "length", "dealias_fraction"});
    cfg.grid_n = grid.value("n", cfg.grid_n);
    cfg.length = grid.value("length", cfg.length);
    cfg.dealias_fraction = grid.value("dealias_fraction", cfg.dealias_fraction);
  }
  if (root.contains("physics")) {
    reject_unknown(root["physics"], "physics", {"g"});
    cfg.g = root["physics"].value("g", cfg.g);
  }
  if (root.contains("noise")) cfg.noise = parse_noise(root["noise"]);
  if (root.contains("initial")) {
    const json& init = root["initial"];
    reject_unknown(init, "initial", {"omega", "theta", "ubar"});
    if (init.contains("omega")) cfg.ic_omega = parse_ic(init["omega"], "initial.omega");
    if (init.contains("theta")) cfg.ic_theta = parse_ic(init["theta"], "initial.theta");
    if (init.contains("ubar")) {
      cfg.ubar0[0] = init["ubar"].at(0).get<double>();
      cfg.ubar0[1] = init["ubar"].at(1).get<double>();
    }
  }
  if (root.contains("solver")) {
    const json& s = root["solver"];
    reject_unknown(s, "solver",
                   {"dt", "t_end", "save_every", "scheme", "enable_u_equation"});
    cfg.dt = s.value("dt", cfg.dt);
    cfg.t_end = s.value("t_end", cfg.t_end);
    cfg.save_every = s.value("save_every", cfg.save_every);
    const std::string scheme = s.value("scheme", "strat");
    if (scheme == "strat")
      cfg.scheme = SpdeScheme::stratonovich;
    else if (scheme == "ito")
      cfg.scheme = SpdeScheme::ito;
    else
      throw ConfigError("solver.scheme must be \"strat\" or \"ito\"");
    cfg.enable_u = s.value("enable_u_equation", cfg.enable_u);
  }
  if (root.contains("ensemble")) {
    const json& e = root["ensemble"];
    reject_unknown(e, "ensemble", {"members", "seed", "moments_P"});
    cfg.members = e.value("members", cfg.members);
    cfg.seed = e.value("seed", cfg.seed);
    cfg.moments_P = e.value("moments_P", cfg.moments_P);
  }
  if (root.contains("output")) {
    reject_unknown(root["output"], "output", {"directory"});
    cfg.output_dir = root["output"].value("directory", cfg.output_dir);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string serialize_config(const RunConfig& cfg) {
  json root;
  root["grid"] = {{"n", cfg.grid_n},
                  {"length", cfg.length},
                  {"dealias_fraction", cfg.dealias_fraction}};
  root["physics"] = {{"g", cfg.g}};
  root["noise"] = dump_noise(cfg.noise);
  root["initial"] = {{"omega", dump_ic(cfg.ic_omega)},
                     {"theta", dump_ic(cfg.ic_theta)},
                     {"ubar", {cfg.ubar0[0], cfg.ubar0[1]}}};
  root["solver"] = {
      {"dt", cfg.dt},
      {"t_end", cfg.t_end},
      {"save_every", cfg.save_every},
      {"scheme", cfg.scheme == SpdeScheme::stratonovich ? "strat" : "ito"},
      {"enable_u_equation", cfg.enable_u}};
  root["ensemble"] = {{"members", cfg.members},
                      {"seed", cfg.seed},
                      {"moments_P", cfg.moments_P}};
  root["output"] = {{"directory", cfg.output_dir}};
  return root.dump(2);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

GridPtr make_grid_from(const RunConfig& cfg) {
  return make_grid(cfg.grid_n, cfg.length, cfg.dealias_fraction);
}

ScalarField make_initial_field(const InitialCondition& ic,
                               const GridPtr& grid) {
  ScalarField f(grid);
  if (!ic.file.empty()) return scalar_from(read_lsf1(ic.file), grid);
  const int n = grid->n();
  const double L = grid->length();
  if (ic.preset == "zero") return f;
  if (ic.preset == "taylor_green") {
    const double a = ic.params.at("a");
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        f.at(i, j) = a * (std::cos(kTwoPi * grid->x(i) / L) +
                          std::cos(kTwoPi * grid->y(j) / L));
    return f;  // mean-free by construction
  }
  if (ic.preset == "theta_blob") {
    const double cx = ic.params.at("cx"), cy = ic.params.at("cy");
    const double r = ic.params.at("r"), amp = ic.params.at("amp");
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int px = -1; px <= 1; ++px)
          for (int py = -1; py <= 1; ++py) {
            const double dx = grid->x(i) - cx + px * L;
            const double dy = grid->y(j) - cy + py * L;
            acc += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * r * r));
          }
        f.at(i, j) = acc;
      }
    return f;
  }
  throw ConfigError("unknown initial-condition preset \"" + ic.preset + "\"");
}

NoiseBasis make_noise_from(const RunConfig& cfg, const GridPtr& grid) {
  return build_noise_basis(cfg.noise, grid);
}

}  // namespace lasalt
