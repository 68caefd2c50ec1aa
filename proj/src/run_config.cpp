#include "nchl/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nchl/errors.hpp"

namespace nchl {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path, "required field is missing");
  return obj.at(key);
}

const json& object_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_object()) throw ConfigError(path, "must be an object");
  return v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t positive(const json& v, const std::string& path) {
  const auto i = integer(v, path);
  if (i < 1) throw ConfigError(path, "must be >= 1");
  return i;
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "must be a string");
  return v.get<std::string>();
}

void parse_strategy(const json& s, RunConfig& cfg) {
  const std::string name = text(require(s, "name", "strategy.name"), "strategy.name");
  if (name == "es1") {
    reject_unknown(s, "strategy", {"name", "population_size", "elites", "sigma", "generations"});
    cfg.strategy = Strategy::kEs1;
    Es1Config& e = cfg.es1;
    if (s.contains("population_size")) {
      e.population_size = static_cast<int>(positive(s["population_size"], "strategy.population_size"));
    }
    e.elites = s.contains("elites")
                   ? static_cast<int>(positive(s["elites"], "strategy.elites"))
                   : std::max(1, e.population_size / 2);
    if (e.elites > e.population_size) {
      throw ConfigError("strategy.elites", "must not exceed strategy.population_size");
    }
    if (s.contains("sigma")) e.sigma = number(s["sigma"], "strategy.sigma");
    if (!(e.sigma > 0)) throw ConfigError("strategy.sigma", "must be > 0");
    if (s.contains("generations")) {
      const auto g = integer(s["generations"], "strategy.generations");
      if (g < 0) throw ConfigError("strategy.generations", "must be >= 0");
      e.generations = static_cast<int>(g);
    }
  } else if (name == "es2") {
    reject_unknown(s, "strategy", {"name", "population_size", "sigma", "lr", "sigma_decay",
                                   "lr_decay", "generations"});
    cfg.strategy = Strategy::kEs2;
    Es2Config& e = cfg.es2;
    if (s.contains("population_size")) {
      e.population_size = static_cast<int>(positive(s["population_size"], "strategy.population_size"));
    }
    if (e.population_size < 2 || e.population_size % 2 != 0) {
      throw ConfigError("strategy.population_size", "must be even and >= 2 for mirrored sampling");
    }
    if (s.contains("sigma")) e.sigma = number(s["sigma"], "strategy.sigma");
    if (s.contains("lr")) e.lr = number(s["lr"], "strategy.lr");
    if (s.contains("sigma_decay")) e.sigma_decay = number(s["sigma_decay"], "strategy.sigma_decay");
    if (s.contains("lr_decay")) e.lr_decay = number(s["lr_decay"], "strategy.lr_decay");
    if (!(e.sigma > 0)) throw ConfigError("strategy.sigma", "must be > 0");
    if (!(e.lr > 0)) throw ConfigError("strategy.lr", "must be > 0");
    if (!(e.sigma_decay > 0 && e.sigma_decay <= 1)) {
      throw ConfigError("strategy.sigma_decay", "must be in (0, 1]");
    }
    if (!(e.lr_decay > 0 && e.lr_decay <= 1)) {
      throw ConfigError("strategy.lr_decay", "must be in (0, 1]");
    }
    if (s.contains("generations")) {
      const auto g = integer(s["generations"], "strategy.generations");
      if (g < 0) throw ConfigError("strategy.generations", "must be >= 0");
      e.generations = static_cast<int>(g);
    }
  } else {
    throw ConfigError("strategy.name", "expected \"es1\" or \"es2\", got \"" + name + "\"");
  }
}

RunConfig parse_config_object(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "must be a JSON object");
  reject_unknown(doc, "", {"schema_version", "scheme", "eta", "topology", "init", "memory_window",
                           "environment", "strategy", "seed", "episode_steps",
                           "episodes_per_eval", "output_dir"});
  RunConfig cfg;

  const auto version = integer(require(doc, "schema_version", "schema_version"), "schema_version");
  if (version != kConfigSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version " + std::to_string(version) +
                                            " (expected " +
                                            std::to_string(kConfigSchemaVersion) + ")");
  }

  try {
    cfg.scheme = parse_scheme(text(require(doc, "scheme", "scheme"), "scheme"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("scheme", e.what());
  }

  if (doc.contains("eta")) {
    const json& eta = doc["eta"];
    if (!eta.is_object()) throw ConfigError("eta", "must be an object");
    reject_unknown(eta, "eta", {"mode", "value"});
    const std::string mode = text(require(eta, "mode", "eta.mode"), "eta.mode");
    if (mode == "evolved") {
      if (eta.contains("value")) throw ConfigError("eta.value", "only valid with eta.mode = fixed");
      cfg.eta = EtaMode::evolving();
    } else if (mode == "fixed") {
      cfg.eta = EtaMode::fixed(eta.contains("value") ? number(eta["value"], "eta.value") : 0.1);
    } else {
      throw ConfigError("eta.mode", "expected \"evolved\" or \"fixed\", got \"" + mode + "\"");
    }
  }

  const json& topo = require(doc, "topology", "topology");
  if (!topo.is_array()) throw ConfigError("topology", "must be an array of layer sizes");
  std::vector<int> sizes;
  for (std::size_t k = 0; k < topo.size(); ++k) {
    sizes.push_back(static_cast<int>(positive(topo[k], "topology[" + std::to_string(k) + "]")));
  }
  if (sizes.size() < 2) throw ConfigError("topology", "needs at least an input and an output layer");
  cfg.topology = Topology(sizes);

  const bool weightless = cfg.scheme == Scheme::kWeightlessNeuronCentric;
  cfg.init = weightless ? WeightInit::zeros() : WeightInit{};
  if (doc.contains("init")) {
    const json& init = doc["init"];
    if (!init.is_object()) throw ConfigError("init", "must be an object");
    reject_unknown(init, "init", {"mode", "low", "high"});
    const std::string mode = text(require(init, "mode", "init.mode"), "init.mode");
    if (mode == "zeros") {
      if (init.contains("low") || init.contains("high")) {
        throw ConfigError("init", "low/high only apply to init.mode = uniform");
      }
      cfg.init = WeightInit::zeros();
    } else if (mode == "uniform") {
      const double lo = init.contains("low") ? number(init["low"], "init.low") : -0.1;
      const double hi = init.contains("high") ? number(init["high"], "init.high") : 0.1;
      if (!(lo < hi)) throw ConfigError("init.low", "must be below init.high");
      cfg.init = WeightInit::uniform(lo, hi);
    } else {
      throw ConfigError("init.mode", "expected \"zeros\" or \"uniform\", got \"" + mode + "\"");
    }
  }
  if (weightless && cfg.init.mode != WeightInit::Mode::kZeros) {
    throw ConfigError("init.mode",
                      "scheme = weightless_neuron_centric stores no weights and requires "
                      "init.mode = zeros (conflicting fields: scheme, init.mode)");
  }

  if (doc.contains("memory_window")) {
    if (!weightless) {
      throw ConfigError("memory_window", "only valid with scheme = weightless_neuron_centric");
    }
    cfg.memory_window = static_cast<std::size_t>(positive(doc["memory_window"], "memory_window"));
  } else if (weightless) {
    throw ConfigError("memory_window", "required for scheme = weightless_neuron_centric");
  }

  const json& env = object_at(doc, "environment", "environment");
  reject_unknown(env, "environment", {"name", "constants"});
  cfg.env.name = text(require(env, "name", "environment.name"), "environment.name");
  if (env.contains("constants")) {
    const json& c = env["constants"];
    if (!c.is_object()) throw ConfigError("environment.constants", "must be an object");
    for (const auto& [key, value] : c.items()) {
      cfg.env.constants[key] = number(value, "environment.constants." + key);
    }
  }
  // Resolves the name and every constant; throws ConfigError on bad input.
  const std::size_t obs = env_observation_dim(cfg.env);
  const std::size_t act = env_action_dim(cfg.env);
  if (static_cast<std::size_t>(cfg.topology.input_size()) != obs ||
      static_cast<std::size_t>(cfg.topology.output_size()) != act) {
    throw ConfigError("topology", "input/output sizes " + std::to_string(cfg.topology.input_size()) +
                                      "/" + std::to_string(cfg.topology.output_size()) +
                                      " do not match environment " + cfg.env.name +
                                      " observation/action dims " + std::to_string(obs) + "/" +
                                      std::to_string(act));
  }

  parse_strategy(object_at(doc, "strategy", "strategy"), cfg);

  const json& seed = require(doc, "seed", "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw ConfigError("seed", "must be a non-negative integer");
  }
  cfg.set_seed(seed.get<std::uint64_t>());

  if (doc.contains("episode_steps")) {
    cfg.episode_steps = static_cast<std::size_t>(positive(doc["episode_steps"], "episode_steps"));
  }
  if (doc.contains("episodes_per_eval")) {
    cfg.episodes_per_eval =
        static_cast<std::size_t>(positive(doc["episodes_per_eval"], "episodes_per_eval"));
  }
  if (doc.contains("output_dir")) cfg.output_dir = text(doc["output_dir"], "output_dir");
  return cfg;
}

}  // namespace

EvalSpec RunConfig::eval_spec() const {
  EvalSpec s;
  s.env = env;
  s.episode_steps = episode_steps;
  s.episodes = episodes_per_eval;
  s.init = init;
  s.memory_window = memory_window;
  s.seed = seed;
  return s;
}

int RunConfig::generations() const {
  return strategy == Strategy::kEs1 ? es1.generations : es2.generations;
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  es1.seed = s;
  es2.seed = s;
}

std::string RunConfig::to_json() const {
  json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["scheme"] = std::string(to_string(scheme));
  doc["eta"] = eta.evolved ? json{{"mode", "evolved"}} : json{{"mode", "fixed"}, {"value", eta.value}};
  doc["topology"] = topology.layer_sizes();
  doc["init"] = init.mode == WeightInit::Mode::kZeros
                    ? json{{"mode", "zeros"}}
                    : json{{"mode", "uniform"}, {"low", init.low}, {"high", init.high}};
  if (scheme == Scheme::kWeightlessNeuronCentric) doc["memory_window"] = memory_window;
  json constants = json::object();
  for (const auto& [k, v] : resolved_constants(env)) constants[k] = v;
  doc["environment"] = {{"name", env.name}, {"constants", constants}};
  if (strategy == Strategy::kEs1) {
    doc["strategy"] = {{"name", "es1"},
                       {"population_size", es1.population_size},
                       {"elites", es1.elites},
                       {"sigma", es1.sigma},
                       {"generations", es1.generations}};
  } else {
    doc["strategy"] = {{"name", "es2"},
                       {"population_size", es2.population_size},
                       {"sigma", es2.sigma},
                       {"lr", es2.lr},
                       {"sigma_decay", es2.sigma_decay},
                       {"lr_decay", es2.lr_decay},
                       {"generations", es2.generations}};
  }
  doc["seed"] = seed;
  doc["episode_steps"] = episode_steps;
  doc["episodes_per_eval"] = episodes_per_eval;
  if (!output_dir.empty()) doc["output_dir"] = output_dir;
  return doc.dump(2);
}

RunConfig parse_run_config(const std::string& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  // Run manifests embed the resolved config.
  if (doc.is_object() && doc.contains("kind") && doc["kind"] == "nchl-run-manifest") {
    if (!doc.contains("config")) throw ConfigError("config", "manifest has no embedded config");
    return parse_config_object(doc["config"]);
  }
  return parse_config_object(doc);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : cfg.to_json()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

}  // namespace nchl
