// nchl command-line front end. All work goes through the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nchl/nchl.h"

namespace {

// Validation problems exit with 2, everything else with 1.
int exit_code(nchl_status s) {
  switch (s) {
    case NCHL_OK: return 0;
    case NCHL_ERR_CONFIG:
    case NCHL_ERR_SCHEME:
    case NCHL_ERR_DIMENSION:
    case NCHL_ERR_INVALID_ARGUMENT: return 2;
    default: return 1;
  }
}

int report(nchl_status s, const char* command) {
  if (s != NCHL_OK) std::fprintf(stderr, "nchl %s: error: %s\n", command, nchl_last_error());
  return exit_code(s);
}

// Writes an API-owned string to `path` (stdout when empty) and frees it.
int emit(char* text, const std::string& path) {
  int rc = 0;
  if (path.empty()) {
    std::fputs(text, stdout);
  } else {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
      std::fprintf(stderr, "nchl: cannot write %s\n", path.c_str());
      rc = 1;
    }
  }
  nchl_string_free(text);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hebbian plasticity neuroevolution engine"};
  app.set_version_flag("--version", std::string(nchl_version()));
  app.require_subcommand(1);

  std::string config, out, genome, capture, label, topology, scheme = "neuron_centric",
                                                             eta = "evolved", windows, checkpoints,
                                                             family = "post";
  int threads = 1;
  std::optional<std::uint64_t> seed_override;
  bool wall_clock = false, table1 = false;
  std::vector<std::string> files;

  auto* evolve = app.add_subcommand("evolve", "Run an evolution strategy from a config file");
  evolve->add_option("--config", config, "Run config or run manifest (JSON)")->required();
  evolve->add_option("--out", out, "Output directory (overrides output_dir)");
  evolve->add_option("--threads", threads, "Evaluation threads")->check(CLI::PositiveNumber);
  evolve->add_option("--seed-override", seed_override, "Replace the config seed");
  evolve->add_flag("--wall-clock", wall_clock, "Record wall_ms in the log (not reproducible)");

  auto* count = app.add_subcommand("count", "Parameter counts for a topology");
  count->add_option("--topology", topology, "Layer sizes, e.g. 28,256,128,8");
  count->add_option("--scheme", scheme, "synaptic | neuron_centric | weightless_neuron_centric");
  count->add_option("--eta", eta, "evolved | fixed | fixed:<value>");
  count->add_flag("--table1", table1, "Emit the eight reference network rows");

  auto* sweep = app.add_subcommand("sweep", "Weightless memory-window sweep over checkpoints");
  sweep->add_option("--config", config, "Run config supplying environment and episodes")
      ->required();
  sweep->add_option("--checkpoints", checkpoints, "Directory of neuron-centric genomes")
      ->required();
  sweep->add_option("--windows", windows, "Comma separated memory windows, e.g. 2,25,50")
      ->required();
  sweep->add_option("--threads", threads, "Evaluation threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "Output CSV (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "Average PCA projections of captured trajectories");
  analyze->add_option("files", files, "Trajectory CSVs from eval --capture")->required();
  analyze->add_option("--family", family, "input | pre | post");
  analyze->add_option("--out", out, "Output CSV (default stdout)");

  auto* eval = app.add_subcommand("eval", "Roll out a single genome");
  eval->add_option("--config", config, "Run config")->required();
  eval->add_option("--genome", genome, "Genome checkpoint")->required();
  eval->add_option("--capture", capture, "Write the per-step trajectory CSV here");
  eval->add_option("--label", label, "Label stored in the capture");
  eval->add_option("--seed-override", seed_override, "Replace the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::uint64_t* seed = seed_override ? &*seed_override : nullptr;

  if (evolve->parsed()) {
    double best = 0.0;
    const nchl_status s =
        nchl_evolve(config.c_str(), out.empty() ? nullptr : out.c_str(), threads, seed,
                    wall_clock ? 1 : 0, &best);
    if (s == NCHL_OK) std::printf("best_fitness=%.17g\n", best);
    return report(s, "evolve");
  }

  if (count->parsed()) {
    char* csv = nullptr;
    nchl_status s;
    if (table1) {
      s = nchl_table1_report(&csv);
    } else if (topology.empty()) {
      std::fprintf(stderr, "nchl count: error: --topology or --table1 is required\n");
      return 2;
    } else {
      s = nchl_count_report(topology.c_str(), scheme.c_str(), eta.c_str(), &csv);
    }
    if (s != NCHL_OK) return report(s, "count");
    return emit(csv, "");
  }

  if (sweep->parsed()) {
    char* csv = nullptr;
    const nchl_status s =
        nchl_sweep(config.c_str(), checkpoints.c_str(), windows.c_str(), threads, &csv);
    if (s != NCHL_OK) return report(s, "sweep");
    return emit(csv, out);
  }

  if (analyze->parsed()) {
    nchl_family f;
    if (family == "input") {
      f = NCHL_FAMILY_INPUT;
    } else if (family == "pre") {
      f = NCHL_FAMILY_PRE;
    } else if (family == "post") {
      f = NCHL_FAMILY_POST;
    } else {
      std::fprintf(stderr, "nchl analyze: error: --family must be input, pre or post\n");
      return 2;
    }
    std::vector<const char*> paths;
    for (const auto& p : files) paths.push_back(p.c_str());
    char* csv = nullptr;
    const nchl_status s = nchl_analyze(paths.data(), paths.size(), f, &csv);
    if (s != NCHL_OK) return report(s, "analyze");
    return emit(csv, out);
  }

  if (eval->parsed()) {
    double fitness = 0.0;
    const nchl_status s =
        nchl_eval(config.c_str(), genome.c_str(), seed, capture.empty() ? nullptr : capture.c_str(),
                  label.empty() ? nullptr : label.c_str(), &fitness);
    if (s == NCHL_OK) std::printf("fitness=%.17g\n", fitness);
    return report(s, "eval");
  }
  return 2;
}
