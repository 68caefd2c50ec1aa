#include "nchl/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nchl/analysis.hpp"
#include "nchl/errors.hpp"
#include "nchl/genome_io.hpp"

namespace nchl {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

std::string log_header() { return "generation,best,mean,std,sigma,lr,wall_ms\n"; }

std::string log_row(const GenerationReport& r, bool wall_clock) {
  return std::to_string(r.generation) + ',' + format_double(r.best) + ',' +
         format_double(r.mean) + ',' + format_double(r.std) + ',' + format_double(r.sigma) +
         ',' + format_double(r.lr) + ',' + format_double(wall_clock ? r.wall_ms : 0.0) + '\n';
}

std::vector<Vector> initial_population(const RunConfig& cfg) {
  const int count = cfg.strategy == Strategy::kEs1 ? cfg.es1.population_size : 1;
  std::vector<Vector> pop;
  pop.reserve(count);
  for (int i = 0; i < count; ++i) {
    pop.push_back(random_rule_genome(cfg.scheme, cfg.topology, cfg.eta,
                                     derive_seed(cfg.seed, Stream::kInitialPopulation,
                                                 static_cast<std::uint64_t>(i)))
                      .values());
  }
  return pop;
}

EvolveResult evolve(const RunConfig& cfg, int threads, const GenomeObserver& observer) {
  const EvalSpec spec = cfg.eval_spec();
  auto make = [&](const Vector& v) { return Genome(cfg.scheme, cfg.eta, cfg.topology, v, cfg.seed); };
  const FitnessFn fitness = [&](const Vector& v) { return evaluate(make(v), spec); };
  GenerationObserver inner;
  if (observer) {
    inner = [&](const GenerationReport& r, const Vector& best) { observer(r, make(best)); };
  }
  EsResult es = cfg.strategy == Strategy::kEs1
                    ? run_es1(cfg.es1, initial_population(cfg), fitness, threads, inner)
                    : run_es2(cfg.es2, initial_population(cfg).front(), fitness, threads, inner);
  return {make(es.best), es.best_fitness, std::move(es.reports)};
}

std::string manifest_json(const RunConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["kind"] = "nchl-run-manifest";
  doc["manifest_version"] = 1;
  doc["engine_version"] = kEngineVersion;
  doc["config_hash"] = config_hash(cfg);
  doc["seed"] = cfg.seed;
  doc["config"] = nlohmann::ordered_json::parse(cfg.to_json());
  return doc.dump(2) + "\n";
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string checkpoint_name(int generation) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gen_%05d.json", generation);
  return buf;
}

std::string ratio_2dp(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

}  // namespace

EvolveResult run_evolve(RunConfig cfg, const EvolveOptions& options) {
  if (options.seed_override) cfg.set_seed(*options.seed_override);
  fs::path out = options.out_dir.empty() ? fs::path(cfg.output_dir) : options.out_dir;
  if (out.empty()) throw ConfigError("output_dir", "no output directory given (use --out)");
  fs::create_directories(out / "checkpoints");
  write_file(out / "manifest.json", manifest_json(cfg));

  std::ofstream log(out / "log.csv", std::ios::binary);
  if (!log) throw std::runtime_error("cannot write " + (out / "log.csv").string());
  log << log_header() << std::flush;

  auto observer = [&](const GenerationReport& r, const Genome& best) {
    log << log_row(r, options.record_wall_clock) << std::flush;
    save_genome(best, out / "checkpoints" / checkpoint_name(r.generation));
  };
  EvolveResult result = evolve(cfg, options.threads, observer);
  save_genome(result.best, out / "best.json");
  return result;
}

const std::vector<Table1Row>& table1_rows() {
  static const std::vector<Table1Row> rows = {
      {"VSR", "Biped", "Low", Topology({8, 8, 10}), EtaMode::fixed()},
      {"VSR", "Biped", "Medium", Topology({20, 20, 10}), EtaMode::fixed()},
      {"VSR", "Biped", "High", Topology({29, 29, 10}), EtaMode::fixed()},
      {"VSR", "Worm", "Low", Topology({3, 3, 7}), EtaMode::fixed()},
      {"VSR", "Worm", "Medium", Topology({28, 28, 7}), EtaMode::fixed()},
      {"VSR", "Worm", "High", Topology({31, 31, 7}), EtaMode::fixed()},
      {"Ant", "-", "Medium", Topology({28, 128, 64, 8}), EtaMode::evolving()},
      {"Ant", "-", "High", Topology({28, 256, 128, 8}), EtaMode::evolving()},
  };
  return rows;
}

std::string table1_report() {
  std::string out = "task,shape,configuration,input,hidden,output,hl,nchl,ratio\n";
  for (const auto& row : table1_rows()) {
    const auto& sizes = row.topology.layer_sizes();
    std::string hidden;
    for (std::size_t k = 1; k + 1 < sizes.size(); ++k) {
      if (!hidden.empty()) hidden += ';';
      hidden += std::to_string(sizes[k]);
    }
    const ParamCount c = param_count(Scheme::kSynaptic, row.topology, row.eta);
    out += row.task + ',' + row.shape + ',' + row.configuration + ',' +
           std::to_string(sizes.front()) + ',' + hidden + ',' + std::to_string(sizes.back()) +
           ',' + std::to_string(c.synaptic) + ',' + std::to_string(c.neuron_centric) + ',' +
           ratio_2dp(c.ratio) + '\n';
  }
  return out;
}

std::string count_report(const Topology& topology, Scheme scheme, const EtaMode& eta) {
  const ParamCount c = param_count(scheme, topology, eta);
  const std::string eta_text = eta.evolved ? "evolved" : "fixed:" + format_double(eta.value);
  std::string topo = topology.to_string();
  return "topology,synapses,neurons,eta,scheme,total,hl,nchl,ratio\n\"" + topo + "\"," +
         std::to_string(topology.synapse_count()) + ',' + std::to_string(topology.neuron_count()) +
         ',' + eta_text + ',' + std::string(to_string(scheme)) + ',' + std::to_string(c.total) +
         ',' + std::to_string(c.synaptic) + ',' + std::to_string(c.neuron_centric) + ',' +
         ratio_2dp(c.ratio) + '\n';
}

std::vector<std::size_t> parse_windows(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError("windows", "'" + item + "' is not an integer");
    }
    if (v < 1) throw ConfigError("windows", "memory windows must be >= 1, got " + item);
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("windows", "no memory windows given");
  return out;
}

std::vector<Genome> load_checkpoints(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("checkpoints", dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("checkpoints", "no genome checkpoints in " + dir.string());
  std::vector<Genome> genomes;
  for (const auto& f : files) {
    Genome g = load_genome(f);
    if (g.scheme() != Scheme::kNeuronCentric) {
      throw SchemeError(f.string() + ": expected a neuron_centric genome, got " +
                        std::string(to_string(g.scheme())));
    }
    if (!genomes.empty() && !(g.topology() == genomes.front().topology())) {
      throw DimensionError(f.string() + ": topology " + g.topology().to_string() + " differs from " +
                           genomes.front().topology().to_string());
    }
    genomes.push_back(std::move(g));
  }
  return genomes;
}

std::string run_sweep(const RunConfig& cfg, const fs::path& checkpoint_dir,
                      const std::string& windows, int threads) {
  const auto w = parse_windows(windows);
  const auto genomes = load_checkpoints(checkpoint_dir);
  if (!(genomes.front().topology() == cfg.topology)) {
    throw DimensionError("checkpoint topology " + genomes.front().topology().to_string() +
                         " differs from config topology " + cfg.topology.to_string());
  }
  return sweep_to_csv(window_sweep(genomes, cfg.eval_spec(), w, threads));
}

std::string run_analyze(const std::vector<fs::path>& files, TrajectoryFamily family) {
  if (files.empty()) throw std::invalid_argument("analyze: no trajectory files given");
  std::vector<TrajectoryRecord> records;
  std::size_t dim = 0, steps = 0;
  for (const auto& f : files) {
    TrajectoryRecord r;
    try {
      r = trajectory_from_csv(read_file(f));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(f.string() + ": " + e.what());
    }
    if (r.label.empty()) r.label = f.stem().string();
    const std::size_t d = family == TrajectoryFamily::kInput ? r.input_dim : r.output_dim;
    if (records.empty()) {
      dim = d;
      steps = r.steps();
    } else if (d != dim) {
      throw DimensionError(f.string() + ": dimension " + std::to_string(d) + ", expected " +
                           std::to_string(dim) + " (from " + files.front().string() + ")");
    } else if (r.steps() != steps) {
      throw DimensionError(f.string() + ": " + std::to_string(r.steps()) + " steps, expected " +
                           std::to_string(steps) + " (from " + files.front().string() + ")");
    }
    records.push_back(std::move(r));
  }
  return projected_to_csv(average_trajectories_by_label(records, family));
}

EvalOutcome run_eval(const RunConfig& cfg, const Genome& genome,
                     const std::optional<fs::path>& capture, const std::string& label) {
  if (genome.scheme() != cfg.scheme && !(is_neuron_centric(genome.scheme()) &&
                                         is_neuron_centric(cfg.scheme))) {
    throw SchemeError("genome scheme " + std::string(to_string(genome.scheme())) +
                      " does not match config scheme " + std::string(to_string(cfg.scheme)));
  }
  const Genome g = genome.scheme() == cfg.scheme ? genome : genome.with_scheme(cfg.scheme);
  const EvalSpec spec = cfg.eval_spec();
  EvalOutcome outcome;
  double sum = 0.0;
  for (std::size_t e = 0; e < spec.episodes; ++e) {
    EpisodeResult r = run_episode(g, spec, e, capture.has_value());
    outcome.episode_fitness.push_back(r.fitness);
    sum += r.fitness;
    if (capture) {
      r.trajectory->label = label;
      fs::path p = *capture;
      if (spec.episodes > 1) {
        p.replace_filename(capture->stem().string() + "_e" + std::to_string(e) +
                           capture->extension().string());
      }
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
      write_file(p, trajectory_to_csv(*r.trajectory));
      outcome.captures.push_back(p);
    }
  }
  outcome.fitness = sum / static_cast<double>(spec.episodes);
  return outcome;
}

}  // namespace nchl
