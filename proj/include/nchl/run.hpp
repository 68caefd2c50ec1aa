#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nchl/evolution.hpp"
#include "nchl/plasticity.hpp"
#include "nchl/run_config.hpp"
#include "nchl/trajectory.hpp"

namespace nchl {

inline constexpr const char* kEngineVersion = "0.1.0";

// Shortest round-trip decimal form, '.' separator.
std::string format_double(double v);

// Run log: "generation,best,mean,std,sigma,lr,wall_ms". wall_ms is written
// as 0 unless wall-clock recording is on, so logs are byte-identical across
// machines and thread counts.
std::string log_header();
std::string log_row(const GenerationReport& report, bool wall_clock);

// Initial genomes drawn from the run seed: ES1 population or ES2 center.
std::vector<Vector> initial_population(const RunConfig& cfg);

struct EvolveResult {
  Genome best;
  double best_fitness = 0.0;
  std::vector<GenerationReport> reports;
};

using GenomeObserver = std::function<void(const GenerationReport&, const Genome&)>;

// Runs the configured strategy. Fitness is the mean episode fitness over
// episodes_per_eval rollouts; the result depends only on the config.
EvolveResult evolve(const RunConfig& cfg, int threads = 1, const GenomeObserver& observer = {});

struct EvolveOptions {
  std::filesystem::path out_dir;  // empty: cfg.output_dir
  int threads = 1;
  std::optional<std::uint64_t> seed_override;
  bool record_wall_clock = false;
};

// Writes log.csv, checkpoints/gen_NNNNN.json, best.json and manifest.json.
EvolveResult run_evolve(RunConfig cfg, const EvolveOptions& options);

std::string manifest_json(const RunConfig& cfg);

struct Table1Row {
  std::string task;
  std::string shape;
  std::string configuration;
  Topology topology;
  EtaMode eta;
};

const std::vector<Table1Row>& table1_rows();

// "task,shape,configuration,input,hidden,output,hl,nchl,ratio"
std::string table1_report();
// "topology,synapses,neurons,eta,scheme,total,hl,nchl,ratio"
std::string count_report(const Topology& topology, Scheme scheme, const EtaMode& eta);

// Comma separated list of windows, each >= 1. Throws ConfigError("windows").
std::vector<std::size_t> parse_windows(const std::string& text);

// Every *.json genome in `dir`, in file name order. Throws ConfigError when
// none are found and SchemeError when one is not neuron-centric.
std::vector<Genome> load_checkpoints(const std::filesystem::path& dir);

std::string run_sweep(const RunConfig& cfg, const std::filesystem::path& checkpoint_dir,
                      const std::string& windows, int threads);

// Loads captured trajectories and emits the averaged projection per label.
// Throws DimensionError naming the first file whose dims disagree.
std::string run_analyze(const std::vector<std::filesystem::path>& files,
                        TrajectoryFamily family);

struct EvalOutcome {
  double fitness = 0.0;
  std::vector<double> episode_fitness;
  std::vector<std::filesystem::path> captures;
};

// Rolls out one genome under the config's environment and evaluation
// settings. With a capture path, writes one trajectory CSV per episode
// ("run.csv", or "run_e0.csv", "run_e1.csv", ... for several episodes).
EvalOutcome run_eval(const RunConfig& cfg, const Genome& genome,
                     const std::optional<std::filesystem::path>& capture,
                     const std::string& label);

}  // namespace nchl
