#include "hydrolab/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hydrolab {

namespace {

constexpr std::array kTopLevelKeys = {"schema_version", "seed",     "rate",     "p",
                                      "environment",    "flux",     "riemann",  "experiment",
                                      "simulate",       "interface", "godunov", "description"};

}  // namespace

nlohmann::json to_json(const JumpRateSpec& g) {
  if (g.prefix().empty()) return {{"kind", "mm1"}};
  return {{"kind", "table"}, {"values", g.prefix()}};
}

JumpRateSpec rate_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", std::string("mm1"));
  if (kind == "mm1") return JumpRateSpec::mm1();
  if (kind == "k_server") return JumpRateSpec::k_server(j.at("k").get<int>());
  if (kind == "table") return JumpRateSpec(j.at("values").get<std::vector<double>>());
  throw std::invalid_argument("unknown rate kind " + kind);
}

nlohmann::json to_json(const EnvironmentSource& src) {
  if (std::holds_alternative<HomogeneousEnv>(src)) return {{"kind", "homogeneous"}};
  if (const auto* d = std::get_if<DeterministicEnvSpec>(&src)) {
    nlohmann::json j = to_json(*d);
    j["kind"] = "deterministic";
    return j;
  }
  const auto& iid = std::get<IidEnv>(src);
  nlohmann::json j = {{"kind", "iid"}, {"law", to_json(iid.law)}, {"seed", iid.seed}};
  j["floor"] = iid.floor ? nlohmann::json(*iid.floor) : nlohmann::json(nullptr);
  return j;
}

EnvironmentSource environment_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", std::string("homogeneous"));
  if (kind == "homogeneous") return HomogeneousEnv{};
  if (kind == "deterministic") return deterministic_spec_from_json(j);
  if (kind == "iid") {
    IidEnv e;
    e.law = disorder_from_json(j.at("law"));
    e.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("floor") && !j.at("floor").is_null()) e.floor = j.at("floor").get<double>();
    return e;
  }
  throw std::invalid_argument("unknown environment kind " + kind);
}

std::string mode_name(EquilibriumMode mode) {
  switch (mode) {
    case EquilibriumMode::stationary: return "stationary";
    case EquilibriumMode::pseudo: return "pseudo";
    case EquilibriumMode::completed: return "completed";
  }
  return "completed";
}

EquilibriumMode mode_from_name(const std::string& name) {
  if (name == "stationary") return EquilibriumMode::stationary;
  if (name == "pseudo") return EquilibriumMode::pseudo;
  if (name == "completed") return EquilibriumMode::completed;
  throw std::invalid_argument("unknown equilibrium mode " + name);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json flux = {{"grid_points", cfg.flux.grid_points}};
  flux["max_density"] = cfg.flux.max_density ? nlohmann::json(*cfg.flux.max_density) : nlohmann::json(nullptr);
  nlohmann::json exp = {{"scales", cfg.scales},
                        {"horizon", cfg.horizon},
                        {"window", {cfg.window_lo, cfg.window_hi}},
                        {"replicas", cfg.replicas},
                        {"mode", mode_name(cfg.mode)},
                        {"observer_speed", cfg.observer_speed},
                        {"margin_speed", cfg.margin_speed},
                        {"front_tolerance", cfg.front_tolerance},
                        {"threads", cfg.threads}};
  exp["block"] = cfg.block ? nlohmann::json(*cfg.block) : nlohmann::json(nullptr);
  exp["delta"] = cfg.delta ? nlohmann::json(*cfg.delta) : nlohmann::json(nullptr);
  return {{"schema_version", kConfigSchemaVersion},
          {"seed", cfg.seed},
          {"rate", to_json(cfg.rate)},
          {"p", cfg.p},
          {"environment", to_json(cfg.environment)},
          {"flux", flux},
          {"riemann", {{"lambda", cfg.lambda}, {"rho", cfg.rho}, {"u", cfg.u}}},
          {"experiment", exp}};
}

ExperimentConfig experiment_from_json(const nlohmann::json& doc) {
  check_schema(doc);
  ExperimentConfig cfg;
  cfg.seed = doc.value("seed", cfg.seed);
  if (doc.contains("rate")) cfg.rate = rate_from_json(doc.at("rate"));
  cfg.p = doc.value("p", cfg.p);
  if (doc.contains("environment")) cfg.environment = environment_from_json(doc.at("environment"));
  if (doc.contains("flux")) {
    const auto& f = doc.at("flux");
    cfg.flux.grid_points = f.value("grid_points", cfg.flux.grid_points);
    if (f.contains("max_density") && !f.at("max_density").is_null())
      cfg.flux.max_density = f.at("max_density").get<double>();
  }
  if (doc.contains("riemann")) {
    const auto& r = doc.at("riemann");
    cfg.lambda = r.value("lambda", cfg.lambda);
    cfg.rho = r.value("rho", cfg.rho);
    cfg.u = r.value("u", cfg.u);
  }
  if (doc.contains("experiment")) {
    const auto& e = doc.at("experiment");
    cfg.scales = e.value("scales", cfg.scales);
    cfg.horizon = e.value("horizon", cfg.horizon);
    if (e.contains("window")) {
      cfg.window_lo = e.at("window").at(0).get<double>();
      cfg.window_hi = e.at("window").at(1).get<double>();
    }
    if (e.contains("block") && !e.at("block").is_null()) cfg.block = e.at("block").get<std::int64_t>();
    cfg.replicas = e.value("replicas", cfg.replicas);
    if (e.contains("mode")) cfg.mode = mode_from_name(e.at("mode").get<std::string>());
    if (e.contains("delta") && !e.at("delta").is_null()) cfg.delta = e.at("delta").get<double>();
    cfg.observer_speed = e.value("observer_speed", cfg.observer_speed);
    cfg.margin_speed = e.value("margin_speed", cfg.margin_speed);
    cfg.front_tolerance = e.value("front_tolerance", cfg.front_tolerance);
    cfg.threads = e.value("threads", cfg.threads);
  }
  cfg.validate();
  return cfg;
}

void check_schema(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  const int version = doc.value("schema_version", 0);
  if (version != kConfigSchemaVersion)
    throw std::invalid_argument("unsupported config schema_version " + std::to_string(version));
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : kTopLevelKeys) known = known || key == k;
    if (!known) throw std::invalid_argument("unknown config key " + key);
  }
}

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, true, true);
  check_schema(doc);
  return doc;
}

std::string config_digest(const nlohmann::json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hydrolab
