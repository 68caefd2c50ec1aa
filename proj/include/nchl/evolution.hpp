#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nchl/rng.hpp"

namespace nchl {

using Vector = std::vector<double>;
using FitnessFn = std::function<double(const Vector&)>;

// Mean-of-elites strategy: children are Gaussian perturbations of the mean
// of the n best genomes; the single best genome survives unchanged.
struct Es1Config {
  int population_size = 40;
  int elites = 20;
  double sigma = 0.35;
  int generations = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

// Natural-gradient strategy with mirrored sampling and centered-rank
// fitness shaping; sigma and lr decay geometrically per generation.
struct Es2Config {
  int population_size = 500;
  double sigma = 0.1;
  double lr = 0.2;
  double sigma_decay = 0.999;
  double lr_decay = 0.995;
  int generations = 500;
  std::uint64_t seed = 0;

  void validate() const;
  double sigma_at(int generation) const;
  double lr_at(int generation) const;
};

struct GenerationReport {
  int generation = 0;  // 0-based
  double best = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double sigma = 0.0;
  double lr = 0.0;  // 0 for ES1
  double wall_ms = 0.0;
};

struct EsResult {
  Vector best;
  double best_fitness = 0.0;
  Vector center;  // ES2: final search center; ES1: final elite
  std::vector<GenerationReport> reports;
};

// Called after every generation with its report and its best genome.
using GenerationObserver = std::function<void(const GenerationReport&, const Vector&)>;

// One ES1 generation. Elites are chosen by descending fitness, ties going
// to the lower index. Returns [previous best, m-1 children]; noise is drawn
// child by child, coordinate by coordinate.
std::vector<Vector> es1_step(const std::vector<Vector>& population,
                             std::span<const double> fitnesses, const Es1Config& cfg,
                             Rng& rng);

// Ranks mapped linearly onto [-0.5, 0.5]; tied values share their mean rank.
std::vector<double> centered_ranks(std::span<const double> fitnesses);

// center + lr / (m * sigma) * sum_k perturbation_k * shaped_k
Vector es2_update(const Vector& center, const std::vector<Vector>& perturbations,
                  std::span<const double> shaped, double lr, double sigma);

// Draws m/2 perturbations from N(0, sigma) and their mirrors.
std::vector<Vector> mirrored_perturbations(std::size_t dim, int population_size,
                                           double sigma, Rng& rng);

struct Es2Generation {
  Vector center;
  std::vector<Vector> candidates;
  std::vector<double> fitnesses;
};

// Evaluates a batch of genomes, returning one fitness per genome.
using BatchEvaluator = std::function<std::vector<double>(const std::vector<Vector>&)>;

// One ES2 generation at the given (already decayed) sigma and lr. Throws
// std::runtime_error if any fitness is non-finite.
Es2Generation es2_step(const Vector& center, double sigma, double lr, int population_size,
                       Rng& rng, const BatchEvaluator& evaluate);

// Runs body(i) for every i in [0, n) on up to `threads` threads and
// rethrows the first exception raised by any call.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// Evaluates every genome, using up to `threads` worker threads. Results do
// not depend on the thread count.
std::vector<double> parallel_evaluate(const std::vector<Vector>& genomes,
                                      const FitnessFn& fitness, int threads);

EsResult run_es1(const Es1Config& cfg, std::vector<Vector> initial_population,
                 const FitnessFn& fitness, int threads,
                 const GenerationObserver& observer = {});

EsResult run_es2(const Es2Config& cfg, Vector initial_center, const FitnessFn& fitness,
                 int threads, const GenerationObserver& observer = {});

}  // namespace nchl
