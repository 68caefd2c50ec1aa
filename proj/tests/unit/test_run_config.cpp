#include <doctest.h>

#include <json.hpp>

#include "nchl/errors.hpp"
#include "nchl/run.hpp"
#include "nchl/run_config.hpp"

using namespace nchl;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "schema_version": 1,
    "scheme": "neuron_centric",
    "topology": [10, 10, 4],
    "environment": {"name": "segment_crawler"},
    "strategy": {"name": "es1", "population_size": 8, "generations": 2},
    "seed": 7
  })");
}

std::string field_of(const json& j) {
  try {
    parse_run_config(j.dump());
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const RunConfig c = parse_run_config(base().dump());
  CHECK(c.scheme == Scheme::kNeuronCentric);
  CHECK(c.eta.evolved);
  CHECK(c.topology == Topology({10, 10, 4}));
  CHECK(c.init.mode == WeightInit::Mode::kUniform);
  CHECK(c.strategy == Strategy::kEs1);
  CHECK(c.es1.population_size == 8);
  CHECK(c.es1.elites == 4);
  CHECK(c.es1.sigma == 0.35);
  CHECK(c.es1.seed == 7);
  CHECK(c.generations() == 2);
  CHECK(c.episode_steps == 1000);
  CHECK(c.episodes_per_eval == 1);
  const EvalSpec e = c.eval_spec();
  CHECK(e.seed == 7);
  CHECK(e.episode_steps == 1000);
}

TEST_CASE("es2 config") {
  json j = base();
  j["strategy"] = {{"name", "es2"}, {"population_size", 10}, {"generations", 3}};
  const RunConfig c = parse_run_config(j.dump());
  CHECK(c.strategy == Strategy::kEs2);
  CHECK(c.es2.population_size == 10);
  CHECK(c.es2.sigma == 0.1);
  CHECK(c.es2.lr == 0.2);
  j["strategy"]["population_size"] = 9;
  CHECK(field_of(j).rfind("strategy", 0) == 0);
}

TEST_CASE("validation names the offending field") {
  json j = base();
  j["colour"] = "blue";
  CHECK(field_of(j) == "colour");

  j = base();
  j["strategy"]["sigmaa"] = 1;
  CHECK(field_of(j) == "strategy.sigmaa");

  j = base();
  j.erase("seed");
  CHECK(field_of(j) == "seed");

  j = base();
  j["seed"] = -1;
  CHECK(field_of(j) == "seed");

  j = base();
  j["schema_version"] = 2;
  CHECK(field_of(j) == "schema_version");

  j = base();
  j["scheme"] = "hebbian";
  CHECK(field_of(j) == "scheme");

  j = base();
  j["environment"]["constants"] = {{"gravity", 9.8}};
  CHECK(field_of(j) == "environment.constants.gravity");

  j = base();
  j["topology"] = {10, 10, 3};
  CHECK(field_of(j) == "topology");
}

TEST_CASE("weightless scheme needs zero init and a window") {
  json j = base();
  j["scheme"] = "weightless_neuron_centric";
  CHECK(field_of(j) == "memory_window");
  j["memory_window"] = 5;
  const RunConfig c = parse_run_config(j.dump());
  CHECK(c.init.mode == WeightInit::Mode::kZeros);
  CHECK(c.memory_window == 5);

  j["init"] = {{"mode", "uniform"}, {"low", -0.1}, {"high", 0.1}};
  try {
    parse_run_config(j.dump());
    FAIL("accepted a weightless config with uniform init");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "init.mode");
    const std::string msg = e.what();
    CHECK(msg.find("scheme") != std::string::npos);
    CHECK(msg.find("init.mode") != std::string::npos);
  }

  j = base();
  j["memory_window"] = 3;
  CHECK(field_of(j) == "memory_window");
}

TEST_CASE("fixed eta") {
  json j = base();
  j["eta"] = {{"mode", "fixed"}};
  CHECK(parse_run_config(j.dump()).eta == EtaMode::fixed(0.1));
  j["eta"] = {{"mode", "fixed"}, {"value", 0.05}};
  CHECK(parse_run_config(j.dump()).eta == EtaMode::fixed(0.05));
  j["eta"] = {{"mode", "sometimes"}};
  CHECK(field_of(j) == "eta.mode");
}

TEST_CASE("resolved json round-trips and hashes stably") {
  json j = base();
  j["environment"]["constants"] = {{"segments", 5}};
  const RunConfig c = parse_run_config(j.dump());
  const std::string resolved = c.to_json();
  const RunConfig again = parse_run_config(resolved);
  CHECK(again.to_json() == resolved);
  CHECK(config_hash(again) == config_hash(c));
  CHECK(config_hash(c).rfind("fnv1a64:", 0) == 0);
  CHECK(config_hash(c).size() == 8 + 16);
  RunConfig other = c;
  other.set_seed(8);
  CHECK(config_hash(other) != config_hash(c));
  CHECK(json::parse(resolved).at("environment").at("constants").contains("stiffness"));
}

TEST_CASE("a run manifest is accepted as a config") {
  const RunConfig c = parse_run_config(base().dump());
  const std::string manifest = manifest_json(c);
  const json m = json::parse(manifest);
  CHECK(m.at("kind") == "nchl-run-manifest");
  CHECK(m.at("engine_version") == kEngineVersion);
  CHECK(m.at("config_hash") == config_hash(c));
  CHECK(m.at("seed") == 7);
  CHECK(parse_run_config(manifest).to_json() == c.to_json());
}

TEST_CASE("unreadable config") {
  CHECK_THROWS(load_run_config("/nonexistent/config.json"));
  CHECK_THROWS_AS(parse_run_config("{ not json"), ConfigError);
}
