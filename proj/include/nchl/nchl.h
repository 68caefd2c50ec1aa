#ifndef NCHL_NCHL_H
#define NCHL_NCHL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NCHL_BUILDING)
#    define NCHL_API __declspec(dllexport)
#  else
#    define NCHL_API __declspec(dllimport)
#  endif
#else
#  define NCHL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nchl_status {
  NCHL_OK = 0,
  NCHL_ERR_INVALID_ARGUMENT = 1,
  NCHL_ERR_DIMENSION = 2,
  NCHL_ERR_SCHEME = 3,
  NCHL_ERR_CONFIG = 4,
  NCHL_ERR_IO = 5,
  NCHL_ERR_RUNTIME = 6
} nchl_status;

typedef enum nchl_scheme {
  NCHL_SCHEME_SYNAPTIC = 0,
  NCHL_SCHEME_NEURON_CENTRIC = 1,
  NCHL_SCHEME_WEIGHTLESS = 2
} nchl_scheme;

typedef struct nchl_eta {
  int evolved;  /* nonzero: one evolved rate per rule */
  double value; /* shared rate when not evolved */
} nchl_eta;

typedef enum nchl_family {
  NCHL_FAMILY_INPUT = 0,
  NCHL_FAMILY_PRE = 1,
  NCHL_FAMILY_POST = 2
} nchl_family;

typedef struct nchl_topology nchl_topology;
typedef struct nchl_genome nchl_genome;
typedef struct nchl_network nchl_network;

NCHL_API const char* nchl_version(void);

/* Message of the last failed call on this thread; "" if none. Valid until
 * the next call on the same thread. */
NCHL_API const char* nchl_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
NCHL_API void nchl_string_free(char* s);

/* Topology */
NCHL_API nchl_status nchl_topology_create(const int* sizes, size_t count, nchl_topology** out);
NCHL_API nchl_status nchl_topology_parse(const char* text, nchl_topology** out);
NCHL_API void nchl_topology_destroy(nchl_topology* t);
NCHL_API size_t nchl_topology_synapses(const nchl_topology* t);
NCHL_API size_t nchl_topology_neurons(const nchl_topology* t);

NCHL_API nchl_status nchl_param_count(nchl_scheme scheme, const nchl_topology* t, nchl_eta eta,
                                      size_t* total, size_t* synaptic, size_t* neuron_centric,
                                      double* ratio);
NCHL_API nchl_status nchl_memory_footprint(nchl_scheme scheme, const nchl_topology* t,
                                           nchl_eta eta, size_t memory_window,
                                           size_t* values, size_t* bytes);

/* Genome */
NCHL_API nchl_status nchl_genome_random(nchl_scheme scheme, const nchl_topology* t,
                                        nchl_eta eta, uint64_t seed, nchl_genome** out);
NCHL_API nchl_status nchl_genome_from_values(nchl_scheme scheme, const nchl_topology* t,
                                             nchl_eta eta, const double* values, size_t count,
                                             nchl_genome** out);
NCHL_API nchl_status nchl_genome_load(const char* path, nchl_genome** out);
NCHL_API nchl_status nchl_genome_save(const nchl_genome* g, const char* path);
/* Synaptic genome with identical updates; needs an evolved eta. */
NCHL_API nchl_status nchl_genome_lift(const nchl_genome* g, nchl_genome** out);
NCHL_API size_t nchl_genome_size(const nchl_genome* g);
NCHL_API const double* nchl_genome_values(const nchl_genome* g);
NCHL_API void nchl_genome_destroy(nchl_genome* g);

/* Plastic controller. Weight-storing schemes initialise weights uniformly in
 * [low, high) from `seed` (zeros when zero_init is set); the weightless
 * scheme requires zero_init and a memory window >= 1. */
NCHL_API nchl_status nchl_network_create(const nchl_genome* g, int zero_init, double low,
                                         double high, uint64_t seed, size_t memory_window,
                                         nchl_network** out);
/* Forward pass followed by the Hebbian update; writes the output layer. */
NCHL_API nchl_status nchl_network_step(nchl_network* n, const double* input, size_t n_in,
                                       double* output, size_t n_out);
/* Current weights flattened layer by layer, [pre * n_post + post]. */
NCHL_API nchl_status nchl_network_weights(const nchl_network* n, double* out, size_t count);
NCHL_API void nchl_network_destroy(nchl_network* n);

/* Commands. CSV outputs use '.' decimals and '\n' line endings. */
NCHL_API nchl_status nchl_table1_report(char** out_csv);
NCHL_API nchl_status nchl_count_report(const char* topology, const char* scheme,
                                       const char* eta, char** out_csv);
NCHL_API nchl_status nchl_scaling_report(int max_hidden, const int* layers, size_t count,
                                         char** out_csv);
/* seed_override may be NULL. out_dir may be NULL to use the config's. */
NCHL_API nchl_status nchl_evolve(const char* config_path, const char* out_dir, int threads,
                                 const uint64_t* seed_override, int record_wall_clock,
                                 double* best_fitness);
NCHL_API nchl_status nchl_sweep(const char* config_path, const char* checkpoint_dir,
                                const char* windows, int threads, char** out_csv);
NCHL_API nchl_status nchl_analyze(const char* const* paths, size_t count, nchl_family family,
                                  char** out_csv);
/* capture_path and label may be NULL. */
NCHL_API nchl_status nchl_eval(const char* config_path, const char* genome_path,
                               const uint64_t* seed_override, const char* capture_path,
                               const char* label, double* fitness);

#ifdef __cplusplus
}
#endif

#endif
