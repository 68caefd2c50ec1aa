/* Exercises the C interface from plain C. argv[1]: scratch directory. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>

#include "nchl/nchl.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void write_file(const char* path, const char* text) {
  FILE* f = fopen(path, "wb");
  if (!f) {
    fprintf(stderr, "cannot write %s\n", path);
    exit(1);
  }
  fputs(text, f);
  fclose(f);
}

static void test_counts(void) {
  nchl_topology* t = NULL;
  size_t total = 0, hl = 0, nc = 0, values = 0, bytes = 0;
  double ratio = 0;
  nchl_eta evolved = {1, 0.0};
  nchl_eta fixed = {0, 0.1};

  EXPECT(nchl_topology_parse("28,256,128,8", &t) == NCHL_OK);
  EXPECT(nchl_topology_synapses(t) == 40960);
  EXPECT(nchl_topology_neurons(t) == 420);
  EXPECT(nchl_param_count(NCHL_SCHEME_NEURON_CENTRIC, t, evolved, &total, &hl, &nc, &ratio) ==
         NCHL_OK);
  EXPECT(total == 2100 && hl == 204800 && nc == 2100);
  EXPECT(fabs(ratio - 97.52) < 1e-9);
  EXPECT(nchl_memory_footprint(NCHL_SCHEME_NEURON_CENTRIC, t, evolved, 0, &values, &bytes) ==
         NCHL_OK);
  EXPECT(values == 43452 && bytes == 173808);
  EXPECT(nchl_memory_footprint(NCHL_SCHEME_WEIGHTLESS, t, evolved, 2, &values, &bytes) ==
         NCHL_OK);
  EXPECT(values == 2940);
  nchl_topology_destroy(t);

  int sizes[] = {3, 3, 7};
  EXPECT(nchl_topology_create(sizes, 3, &t) == NCHL_OK);
  EXPECT(nchl_param_count(NCHL_SCHEME_NEURON_CENTRIC, t, fixed, &total, &hl, &nc, &ratio) ==
         NCHL_OK);
  EXPECT(hl == 120 && nc == 46);
  nchl_topology_destroy(t);

  t = NULL;
  EXPECT(nchl_topology_parse("3,,7", &t) == NCHL_ERR_INVALID_ARGUMENT);
  EXPECT(t == NULL);
  EXPECT(strlen(nchl_last_error()) > 0);
  EXPECT(nchl_topology_parse(NULL, &t) == NCHL_ERR_INVALID_ARGUMENT);
}

static void test_networks(const char* dir) {
  nchl_topology* t = NULL;
  nchl_genome *g = NULL, *lifted = NULL, *w = NULL, *loaded = NULL;
  nchl_network *a = NULL, *b = NULL, *c = NULL;
  nchl_eta evolved = {1, 0.0};
  double in[3], oa[2], ob[2], oc[2], wa[15], wb[15];
  char path[1024];
  int step, k;

  EXPECT(nchl_topology_parse("3,3,2", &t) == NCHL_OK);
  EXPECT(nchl_genome_random(NCHL_SCHEME_NEURON_CENTRIC, t, evolved, 11, &g) == NCHL_OK);
  EXPECT(nchl_genome_size(g) == 40);
  EXPECT(nchl_genome_lift(g, &lifted) == NCHL_OK);
  EXPECT(nchl_genome_size(lifted) == 75);
  EXPECT(nchl_genome_from_values(NCHL_SCHEME_WEIGHTLESS, t, evolved, nchl_genome_values(g), 40,
                                 &w) == NCHL_OK);
  EXPECT(nchl_genome_from_values(NCHL_SCHEME_WEIGHTLESS, t, evolved, nchl_genome_values(g), 39,
                                 &loaded) == NCHL_ERR_DIMENSION);

  EXPECT(nchl_network_create(g, 1, 0, 0, 0, 0, &a) == NCHL_OK);
  EXPECT(nchl_network_create(lifted, 1, 0, 0, 0, 0, &b) == NCHL_OK);
  EXPECT(nchl_network_create(w, 1, 0, 0, 0, 30, &c) == NCHL_OK);
  for (step = 0; step < 30; ++step) {
    for (k = 0; k < 3; ++k) in[k] = sin(0.3 * step + k);
    EXPECT(nchl_network_step(a, in, 3, oa, 2) == NCHL_OK);
    EXPECT(nchl_network_step(b, in, 3, ob, 2) == NCHL_OK);
    EXPECT(nchl_network_step(c, in, 3, oc, 2) == NCHL_OK);
    EXPECT(memcmp(oa, ob, sizeof oa) == 0);
    EXPECT(memcmp(oa, oc, sizeof oa) == 0);
  }
  EXPECT(nchl_network_weights(a, wa, 15) == NCHL_OK);
  EXPECT(nchl_network_weights(b, wb, 15) == NCHL_OK);
  EXPECT(memcmp(wa, wb, sizeof wa) == 0);
  EXPECT(nchl_network_weights(c, wa, 15) == NCHL_ERR_SCHEME);
  EXPECT(nchl_network_weights(a, wa, 3) == NCHL_ERR_DIMENSION);
  EXPECT(nchl_network_step(a, in, 2, oa, 2) == NCHL_ERR_DIMENSION);
  nchl_network_destroy(c);
  c = NULL;
  EXPECT(nchl_network_create(w, 0, -0.1, 0.1, 1, 5, &c) != NCHL_OK);
  EXPECT(c == NULL);

  snprintf(path, sizeof path, "%s/genome.json", dir);
  EXPECT(nchl_genome_save(g, path) == NCHL_OK);
  EXPECT(nchl_genome_load(path, &loaded) == NCHL_OK);
  EXPECT(memcmp(nchl_genome_values(loaded), nchl_genome_values(g), 40 * sizeof(double)) == 0);
  nchl_genome_destroy(loaded);
  loaded = NULL;
  snprintf(path, sizeof path, "%s/missing.json", dir);
  EXPECT(nchl_genome_load(path, &loaded) != NCHL_OK);

  nchl_network_destroy(a);
  nchl_network_destroy(b);
  nchl_network_destroy(c);
  nchl_genome_destroy(g);
  nchl_genome_destroy(lifted);
  nchl_genome_destroy(w);
  nchl_topology_destroy(t);
  nchl_network_destroy(NULL);
  nchl_genome_destroy(NULL);
  nchl_topology_destroy(NULL);
}

static void test_commands(const char* dir) {
  char* csv = NULL;
  char cfg[1024], out[1024], genome[1024];
  double best = 0, fit = 0;
  uint64_t seed = 5;
  int layers[] = {1, 2, 3};

  EXPECT(nchl_table1_report(&csv) == NCHL_OK);
  EXPECT(strstr(csv, "120,46,2.60") != NULL);
  nchl_string_free(csv);
  EXPECT(nchl_count_report("3,3,7", "neuron_centric", "fixed", &csv) == NCHL_OK);
  EXPECT(strstr(csv, "120,46,2.60") != NULL);
  nchl_string_free(csv);
  EXPECT(nchl_count_report("3,3,7", "bogus", "fixed", &csv) == NCHL_ERR_INVALID_ARGUMENT);
  EXPECT(nchl_scaling_report(10, layers, 3, &csv) == NCHL_OK);
  EXPECT(strncmp(csv, "hidden_layers,width,hl,nchl\n", 28) == 0);
  nchl_string_free(csv);

  snprintf(cfg, sizeof cfg, "%s/config.json", dir);
  write_file(cfg,
             "{\"schema_version\":1,\"scheme\":\"neuron_centric\",\"topology\":[4,4,2],"
             "\"environment\":{\"name\":\"point_navigator\"},"
             "\"strategy\":{\"name\":\"es1\",\"population_size\":4,\"generations\":2},"
             "\"seed\":1,\"episode_steps\":20}");
  snprintf(out, sizeof out, "%s/run", dir);
  EXPECT(nchl_evolve(cfg, out, 1, &seed, 0, &best) == NCHL_OK);
  snprintf(genome, sizeof genome, "%s/run/best.json", dir);
  EXPECT(nchl_eval(cfg, genome, &seed, NULL, NULL, &fit) == NCHL_OK);
  EXPECT(fit == best);

  EXPECT(nchl_sweep(cfg, out, "0", 1, &csv) == NCHL_ERR_CONFIG);

  write_file(cfg, "{\"schema_version\":1}");
  EXPECT(nchl_evolve(cfg, out, 1, NULL, 0, &best) == NCHL_ERR_CONFIG);
  EXPECT(strstr(nchl_last_error(), "scheme") != NULL ||
         strstr(nchl_last_error(), "topology") != NULL);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : "capi_scratch";
  mkdir(dir, 0755);
  EXPECT(strcmp(nchl_version(), "0.1.0") == 0);
  test_counts();
  test_networks(dir);
  test_commands(dir);
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
