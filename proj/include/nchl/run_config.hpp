#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "nchl/envs.hpp"
#include "nchl/evolution.hpp"
#include "nchl/network.hpp"
#include "nchl/plasticity.hpp"

namespace nchl {

inline constexpr int kConfigSchemaVersion = 1;

enum class Strategy { kEs1, kEs2 };

// Everything needed to reproduce a run. Parsed from a JSON document:
//
//   {
//     "schema_version": 1,
//     "scheme": "neuron_centric",              // synaptic | neuron_centric |
//                                              // weightless_neuron_centric
//     "eta": {"mode": "evolved"},              // or {"mode": "fixed", "value": 0.1}
//     "topology": [10, 10, 4],
//     "init": {"mode": "uniform", "low": -0.1, "high": 0.1},  // or {"mode": "zeros"}
//     "memory_window": 2,                      // weightless scheme only
//     "environment": {"name": "segment_crawler", "constants": {"segments": 5}},
//     "strategy": {"name": "es1", "population_size": 40, "elites": 20,
//                  "sigma": 0.35, "generations": 500},
//     "seed": 1,
//     "episode_steps": 1000,
//     "episodes_per_eval": 1,
//     "output_dir": "runs/crawler"
//   }
//
// Unknown keys are rejected. A run manifest is accepted as well; its
// embedded "config" is used.
struct RunConfig {
  Scheme scheme = Scheme::kNeuronCentric;
  EtaMode eta = EtaMode::evolving();
  Topology topology;
  WeightInit init;
  std::size_t memory_window = 0;
  EnvSpec env;
  Strategy strategy = Strategy::kEs1;
  Es1Config es1;
  Es2Config es2;
  std::uint64_t seed = 0;
  std::size_t episode_steps = 1000;
  std::size_t episodes_per_eval = 1;
  std::string output_dir;

  EvalSpec eval_spec() const;
  int generations() const;
  void set_seed(std::uint64_t s);
  // Fully resolved config (all defaults and environment constants filled in).
  std::string to_json() const;
};

// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// FNV-1a over the canonical resolved JSON.
std::string config_hash(const RunConfig& cfg);

}  // namespace nchl
