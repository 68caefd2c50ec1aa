#include "nchl/nchl.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <variant>

#include "nchl/analysis.hpp"
#include "nchl/errors.hpp"
#include "nchl/genome_io.hpp"
#include "nchl/run.hpp"

struct nchl_topology {
  nchl::Topology value;
};

struct nchl_genome {
  nchl::Genome value;
};

struct nchl_network {
  struct Plastic {
    nchl::PlasticNetwork net;
    nchl::HebbianRule rule;
  };
  std::variant<Plastic, nchl::WeightlessNetwork> impl;
};

namespace {

thread_local std::string g_last_error;

nchl_status fail(nchl_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

// Maps exceptions to status codes; ordering matters since the library's
// error types derive from std::invalid_argument.
template <class F>
nchl_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return NCHL_OK;
  } catch (const nchl::ConfigError& e) {
    return fail(NCHL_ERR_CONFIG, e.what());
  } catch (const nchl::SchemeError& e) {
    return fail(NCHL_ERR_SCHEME, e.what());
  } catch (const nchl::DimensionError& e) {
    return fail(NCHL_ERR_DIMENSION, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(NCHL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(NCHL_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NCHL_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(NCHL_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(NCHL_ERR_RUNTIME, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) throw std::invalid_argument(std::string(name) + " must not be NULL");
}

nchl::Scheme to_scheme(nchl_scheme s) {
  switch (s) {
    case NCHL_SCHEME_SYNAPTIC: return nchl::Scheme::kSynaptic;
    case NCHL_SCHEME_NEURON_CENTRIC: return nchl::Scheme::kNeuronCentric;
    case NCHL_SCHEME_WEIGHTLESS: return nchl::Scheme::kWeightlessNeuronCentric;
  }
  throw std::invalid_argument("unknown scheme value " + std::to_string(static_cast<int>(s)));
}

nchl::EtaMode to_eta(nchl_eta e) {
  return e.evolved ? nchl::EtaMode::evolving() : nchl::EtaMode::fixed(e.value);
}

// "evolved", "fixed" or "fixed:<value>"
nchl::EtaMode parse_eta(const std::string& text) {
  if (text == "evolved") return nchl::EtaMode::evolving();
  if (text == "fixed") return nchl::EtaMode::fixed();
  if (text.rfind("fixed:", 0) == 0) {
    std::size_t used = 0;
    const std::string v = text.substr(6);
    double value = 0;
    try {
      value = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == v.size() && used > 0) return nchl::EtaMode::fixed(value);
  }
  throw std::invalid_argument("eta must be 'evolved', 'fixed' or 'fixed:<value>', got '" + text +
                              "'");
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

nchl::RunConfig load_config(const char* path, const uint64_t* seed_override) {
  need(path, "config_path");
  nchl::RunConfig cfg = nchl::load_run_config(path);
  if (seed_override) cfg.set_seed(*seed_override);
  return cfg;
}

}  // namespace

extern "C" {

const char* nchl_version(void) { return nchl::kEngineVersion; }

const char* nchl_last_error(void) { return g_last_error.c_str(); }

void nchl_string_free(char* s) { std::free(s); }

nchl_status nchl_topology_create(const int* sizes, size_t count, nchl_topology** out) {
  return guard([&] {
    need(out, "out");
    need(sizes, "sizes");
    *out = new nchl_topology{nchl::Topology(std::vector<int>(sizes, sizes + count))};
  });
}

nchl_status nchl_topology_parse(const char* text, nchl_topology** out) {
  return guard([&] {
    need(out, "out");
    need(text, "text");
    *out = new nchl_topology{nchl::Topology::parse(text)};
  });
}

void nchl_topology_destroy(nchl_topology* t) { delete t; }

size_t nchl_topology_synapses(const nchl_topology* t) {
  return t ? t->value.synapse_count() : 0;
}

size_t nchl_topology_neurons(const nchl_topology* t) { return t ? t->value.neuron_count() : 0; }

nchl_status nchl_param_count(nchl_scheme scheme, const nchl_topology* t, nchl_eta eta,
                             size_t* total, size_t* synaptic, size_t* neuron_centric,
                             double* ratio) {
  return guard([&] {
    need(t, "topology");
    const nchl::ParamCount c = nchl::param_count(to_scheme(scheme), t->value, to_eta(eta));
    if (total) *total = c.total;
    if (synaptic) *synaptic = c.synaptic;
    if (neuron_centric) *neuron_centric = c.neuron_centric;
    if (ratio) *ratio = c.ratio;
  });
}

nchl_status nchl_memory_footprint(nchl_scheme scheme, const nchl_topology* t, nchl_eta eta,
                                  size_t memory_window, size_t* values, size_t* bytes) {
  return guard([&] {
    need(t, "topology");
    const auto m = nchl::memory_footprint(to_scheme(scheme), t->value, to_eta(eta), memory_window);
    if (values) *values = m.values_stored;
    if (bytes) *bytes = m.bytes_at_32bit;
  });
}

nchl_status nchl_genome_random(nchl_scheme scheme, const nchl_topology* t, nchl_eta eta,
                               uint64_t seed, nchl_genome** out) {
  return guard([&] {
    need(out, "out");
    need(t, "topology");
    *out = new nchl_genome{nchl::random_rule_genome(to_scheme(scheme), t->value, to_eta(eta), seed)};
  });
}

nchl_status nchl_genome_from_values(nchl_scheme scheme, const nchl_topology* t, nchl_eta eta,
                                    const double* values, size_t count, nchl_genome** out) {
  return guard([&] {
    need(out, "out");
    need(t, "topology");
    if (count > 0) need(values, "values");
    *out = new nchl_genome{nchl::Genome(to_scheme(scheme), to_eta(eta), t->value,
                                        std::vector<double>(values, values + count))};
  });
}

nchl_status nchl_genome_load(const char* path, nchl_genome** out) {
  return guard([&] {
    need(out, "out");
    need(path, "path");
    *out = new nchl_genome{nchl::load_genome(path)};
  });
}

nchl_status nchl_genome_save(const nchl_genome* g, const char* path) {
  return guard([&] {
    need(g, "genome");
    need(path, "path");
    nchl::save_genome(g->value, path);
  });
}

nchl_status nchl_genome_lift(const nchl_genome* g, nchl_genome** out) {
  return guard([&] {
    need(out, "out");
    need(g, "genome");
    *out = new nchl_genome{nchl::lift_nchl_to_hl(g->value)};
  });
}

size_t nchl_genome_size(const nchl_genome* g) { return g ? g->value.values().size() : 0; }

const double* nchl_genome_values(const nchl_genome* g) {
  return g ? g->value.values().data() : nullptr;
}

void nchl_genome_destroy(nchl_genome* g) { delete g; }

nchl_status nchl_network_create(const nchl_genome* g, int zero_init, double low, double high,
                                uint64_t seed, size_t memory_window, nchl_network** out) {
  return guard([&] {
    need(out, "out");
    need(g, "genome");
    const nchl::Genome& genome = g->value;
    if (genome.scheme() == nchl::Scheme::kWeightlessNeuronCentric) {
      if (!zero_init) throw nchl::SchemeError("the weightless scheme requires zero_init");
      *out = new nchl_network{nchl::WeightlessNetwork(genome, memory_window)};
      return;
    }
    nchl::PlasticNetwork net(genome.topology());
    net.init_weights(zero_init ? nchl::WeightInit::zeros() : nchl::WeightInit::uniform(low, high),
                     seed);
    *out = new nchl_network{nchl_network::Plastic{std::move(net), nchl::HebbianRule(genome)}};
  });
}

nchl_status nchl_network_step(nchl_network* n, const double* input, size_t n_in,
                              double* output, size_t n_out) {
  return guard([&] {
    need(n, "network");
    if (n_in > 0) need(input, "input");
    std::span<const double> in(input, n_in);
    std::span<const double> result;
    if (auto* p = std::get_if<nchl_network::Plastic>(&n->impl)) {
      result = p->net.forward(in);
      p->rule.apply(p->net);
    } else {
      result = std::get<nchl::WeightlessNetwork>(n->impl).step(in);
    }
    if (n_out != result.size()) {
      throw nchl::DimensionError("output buffer holds " + std::to_string(n_out) +
                                 " values, network has " + std::to_string(result.size()) +
                                 " outputs");
    }
    need(output, "output");
    std::copy(result.begin(), result.end(), output);
  });
}

nchl_status nchl_network_weights(const nchl_network* n, double* out, size_t count) {
  return guard([&] {
    need(n, "network");
    const auto* p = std::get_if<nchl_network::Plastic>(&n->impl);
    if (p == nullptr) throw nchl::SchemeError("weightless networks store no weights");
    const auto& w = p->net.weights();
    std::size_t total = 0;
    for (const auto& layer : w) total += layer.size();
    if (count != total) {
      throw nchl::DimensionError("weight buffer holds " + std::to_string(count) +
                                 " values, network has " + std::to_string(total));
    }
    need(out, "out");
    for (const auto& layer : w) out = std::copy(layer.begin(), layer.end(), out);
  });
}

void nchl_network_destroy(nchl_network* n) { delete n; }

nchl_status nchl_table1_report(char** out_csv) {
  return guard([&] {
    need(out_csv, "out_csv");
    *out_csv = dup(nchl::table1_report());
  });
}

nchl_status nchl_count_report(const char* topology, const char* scheme, const char* eta,
                              char** out_csv) {
  return guard([&] {
    need(out_csv, "out_csv");
    need(topology, "topology");
    need(scheme, "scheme");
    need(eta, "eta");
    *out_csv = dup(nchl::count_report(nchl::Topology::parse(topology), nchl::parse_scheme(scheme),
                                      parse_eta(eta)));
  });
}

nchl_status nchl_scaling_report(int max_hidden, const int* layers, size_t count, char** out_csv) {
  return guard([&] {
    need(out_csv, "out_csv");
    if (count > 0) need(layers, "layers");
    *out_csv = dup(nchl::scaling_to_csv(
        nchl::scaling_table(max_hidden, std::vector<int>(layers, layers + count))));
  });
}

nchl_status nchl_evolve(const char* config_path, const char* out_dir, int threads,
                        const uint64_t* seed_override, int record_wall_clock,
                        double* best_fitness) {
  return guard([&] {
    nchl::RunConfig cfg = load_config(config_path, nullptr);
    nchl::EvolveOptions opts;
    if (out_dir) opts.out_dir = out_dir;
    opts.threads = threads;
    if (seed_override) opts.seed_override = *seed_override;
    opts.record_wall_clock = record_wall_clock != 0;
    const auto result = nchl::run_evolve(std::move(cfg), opts);
    if (best_fitness) *best_fitness = result.best_fitness;
  });
}

nchl_status nchl_sweep(const char* config_path, const char* checkpoint_dir, const char* windows,
                       int threads, char** out_csv) {
  return guard([&] {
    need(out_csv, "out_csv");
    need(checkpoint_dir, "checkpoint_dir");
    need(windows, "windows");
    // Windows are validated before any genome is loaded or run.
    nchl::parse_windows(windows);
    const nchl::RunConfig cfg = load_config(config_path, nullptr);
    *out_csv = dup(nchl::run_sweep(cfg, checkpoint_dir, windows, threads));
  });
}

nchl_status nchl_analyze(const char* const* paths, size_t count, nchl_family family,
                         char** out_csv) {
  return guard([&] {
    need(out_csv, "out_csv");
    if (count > 0) need(paths, "paths");
    std::vector<std::filesystem::path> files;
    for (size_t i = 0; i < count; ++i) {
      need(paths[i], "paths[i]");
      files.emplace_back(paths[i]);
    }
    nchl::TrajectoryFamily f;
    switch (family) {
      case NCHL_FAMILY_INPUT: f = nchl::TrajectoryFamily::kInput; break;
      case NCHL_FAMILY_PRE: f = nchl::TrajectoryFamily::kPre; break;
      case NCHL_FAMILY_POST: f = nchl::TrajectoryFamily::kPost; break;
      default: throw std::invalid_argument("unknown trajectory family");
    }
    *out_csv = dup(nchl::run_analyze(files, f));
  });
}

nchl_status nchl_eval(const char* config_path, const char* genome_path,
                      const uint64_t* seed_override, const char* capture_path, const char* label,
                      double* fitness) {
  return guard([&] {
    need(genome_path, "genome_path");
    const nchl::RunConfig cfg = load_config(config_path, seed_override);
    const nchl::Genome genome = nchl::load_genome(genome_path);
    std::optional<std::filesystem::path> capture;
    if (capture_path) capture = capture_path;
    const auto outcome = nchl::run_eval(cfg, genome, capture, label ? label : "");
    if (fitness) *fitness = outcome.fitness;
  });
}

}  // extern "C"
