#include "nchl/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace nchl {

void Es1Config::validate() const {
  if (population_size < 1) throw std::invalid_argument("es1: population_size must be >= 1");
  if (elites < 1 || elites > population_size) {
    throw std::invalid_argument("es1: elites must be in [1, population_size]");
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) throw std::invalid_argument("es1: sigma must be > 0");
  if (generations < 0) throw std::invalid_argument("es1: generations must be >= 0");
}

void Es2Config::validate() const {
  if (population_size < 2 || population_size % 2 != 0) {
    throw std::invalid_argument("es2: population_size must be even and >= 2 (mirrored sampling)");
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) throw std::invalid_argument("es2: sigma must be > 0");
  if (!(lr > 0) || !std::isfinite(lr)) throw std::invalid_argument("es2: lr must be > 0");
  if (!(sigma_decay > 0 && sigma_decay <= 1)) {
    throw std::invalid_argument("es2: sigma_decay must be in (0, 1]");
  }
  if (!(lr_decay > 0 && lr_decay <= 1)) {
    throw std::invalid_argument("es2: lr_decay must be in (0, 1]");
  }
  if (generations < 0) throw std::invalid_argument("es2: generations must be >= 0");
}

double Es2Config::sigma_at(int generation) const {
  return sigma * std::pow(sigma_decay, generation);
}

double Es2Config::lr_at(int generation) const { return lr * std::pow(lr_decay, generation); }

namespace {

std::vector<std::size_t> rank_descending(std::span<const double> fitnesses) {
  std::vector<std::size_t> order(fitnesses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });
  return order;
}

void check_finite(std::span<const double> fitnesses) {
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    if (!std::isfinite(fitnesses[i])) {
      throw std::runtime_error("non-finite fitness " + std::to_string(fitnesses[i]) +
                               " for individual " + std::to_string(i));
    }
  }
}

GenerationReport summarize(int generation, std::span<const double> f) {
  GenerationReport r;
  r.generation = generation;
  r.best = *std::max_element(f.begin(), f.end());
  double sum = 0.0;
  for (double v : f) sum += v;
  r.mean = sum / static_cast<double>(f.size());
  double sq = 0.0;
  for (double v : f) sq += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(sq / static_cast<double>(f.size()));
  return r;
}

}  // namespace

std::vector<Vector> es1_step(const std::vector<Vector>& population,
                             std::span<const double> fitnesses, const Es1Config& cfg,
                             Rng& rng) {
  cfg.validate();
  const std::size_t m = cfg.population_size;
  if (population.size() != m || fitnesses.size() != m) {
    throw std::invalid_argument("es1_step: population and fitness lists must have length " +
                                std::to_string(m));
  }
  check_finite(fitnesses);
  const std::size_t dim = population.front().size();
  const auto order = rank_descending(fitnesses);

  Vector mean(dim, 0.0);
  for (int e = 0; e < cfg.elites; ++e) {
    const Vector& g = population[order[e]];
    if (g.size() != dim) throw std::invalid_argument("es1_step: genomes differ in length");
    for (std::size_t d = 0; d < dim; ++d) mean[d] += g[d];
  }
  for (double& v : mean) v /= static_cast<double>(cfg.elites);

  std::vector<Vector> next;
  next.reserve(m);
  next.push_back(population[order.front()]);
  std::normal_distribution<double> noise(0.0, cfg.sigma);
  for (std::size_t c = 1; c < m; ++c) {
    Vector child(dim);
    for (std::size_t d = 0; d < dim; ++d) child[d] = mean[d] + noise(rng);
    next.push_back(std::move(child));
  }
  return next;
}

std::vector<double> centered_ranks(std::span<const double> fitnesses) {
  const std::size_t n = fitnesses.size();
  std::vector<double> shaped(n, 0.0);
  if (n < 2) return shaped;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitnesses[a] < fitnesses[b]; });
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && fitnesses[order[j + 1]] == fitnesses[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) {
      shaped[order[k]] = rank / static_cast<double>(n - 1) - 0.5;
    }
    i = j + 1;
  }
  return shaped;
}

Vector es2_update(const Vector& center, const std::vector<Vector>& perturbations,
                  std::span<const double> shaped, double lr, double sigma) {
  if (perturbations.size() != shaped.size() || perturbations.empty()) {
    throw std::invalid_argument("es2_update: one shaped fitness per perturbation required");
  }
  const double scale = lr / (static_cast<double>(perturbations.size()) * sigma);
  Vector next = center;
  for (std::size_t d = 0; d < center.size(); ++d) {
    double acc = 0.0;
    for (std::size_t k = 0; k < perturbations.size(); ++k) acc += perturbations[k][d] * shaped[k];
    next[d] = center[d] + scale * acc;
  }
  return next;
}

std::vector<Vector> mirrored_perturbations(std::size_t dim, int population_size, double sigma,
                                           Rng& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Vector> eps;
  eps.reserve(population_size);
  for (int k = 0; k < population_size / 2; ++k) {
    Vector e(dim);
    for (double& v : e) v = sigma * noise(rng);
    Vector mirror(dim);
    for (std::size_t d = 0; d < dim; ++d) mirror[d] = -e[d];
    eps.push_back(std::move(e));
    eps.push_back(std::move(mirror));
  }
  return eps;
}

Es2Generation es2_step(const Vector& center, double sigma, double lr, int population_size,
                       Rng& rng, const BatchEvaluator& evaluate) {
  auto eps = mirrored_perturbations(center.size(), population_size, sigma, rng);
  Es2Generation gen;
  gen.candidates.reserve(eps.size());
  for (const Vector& e : eps) {
    Vector c(center.size());
    for (std::size_t d = 0; d < c.size(); ++d) c[d] = center[d] + e[d];
    gen.candidates.push_back(std::move(c));
  }
  gen.fitnesses = evaluate(gen.candidates);
  if (gen.fitnesses.size() != gen.candidates.size()) {
    throw std::runtime_error("es2_step: evaluator returned the wrong number of fitnesses");
  }
  check_finite(gen.fitnesses);
  gen.center = es2_update(center, eps, centered_ranks(gen.fitnesses), lr, sigma);
  return gen;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

std::vector<double> parallel_evaluate(const std::vector<Vector>& genomes,
                                      const FitnessFn& fitness, int threads) {
  std::vector<double> out(genomes.size(), 0.0);
  parallel_for(genomes.size(), threads, [&](std::size_t i) { out[i] = fitness(genomes[i]); });
  return out;
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

EsResult run_es1(const Es1Config& cfg, std::vector<Vector> population, const FitnessFn& fitness,
                 int threads, const GenerationObserver& observer) {
  cfg.validate();
  if (population.size() != static_cast<std::size_t>(cfg.population_size)) {
    throw std::invalid_argument("run_es1: initial population size differs from config");
  }
  std::vector<double> fit = parallel_evaluate(population, fitness, threads);
  check_finite(fit);
  EsResult result;
  auto best_idx = rank_descending(fit).front();
  result.best = population[best_idx];
  result.best_fitness = fit[best_idx];

  for (int g = 0; g < cfg.generations; ++g) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(cfg.seed, Stream::kGeneration, static_cast<std::uint64_t>(g)));
    population = es1_step(population, fit, cfg, rng);
    fit = parallel_evaluate(population, fitness, threads);
    try {
      check_finite(fit);
    } catch (const std::exception& e) {
      throw std::runtime_error("generation " + std::to_string(g) + ": " + e.what());
    }
    best_idx = rank_descending(fit).front();
    if (fit[best_idx] > result.best_fitness) {
      result.best = population[best_idx];
      result.best_fitness = fit[best_idx];
    }
    GenerationReport report = summarize(g, fit);
    report.sigma = cfg.sigma;
    report.wall_ms = elapsed_ms(start);
    result.reports.push_back(report);
    if (observer) observer(report, population[best_idx]);
  }
  result.center = population[rank_descending(fit).front()];
  return result;
}

EsResult run_es2(const Es2Config& cfg, Vector center, const FitnessFn& fitness, int threads,
                 const GenerationObserver& observer) {
  cfg.validate();
  EsResult result;
  result.best = center;
  result.best_fitness = fitness(center);
  if (!std::isfinite(result.best_fitness)) {
    throw std::runtime_error("non-finite fitness for the initial center");
  }
  const BatchEvaluator batch = [&](const std::vector<Vector>& genomes) {
    return parallel_evaluate(genomes, fitness, threads);
  };
  for (int g = 0; g < cfg.generations; ++g) {
    const auto start = std::chrono::steady_clock::now();
    const double sigma = cfg.sigma_at(g);
    const double lr = cfg.lr_at(g);
    Rng rng(derive_seed(cfg.seed, Stream::kGeneration, static_cast<std::uint64_t>(g)));
    Es2Generation gen;
    try {
      gen = es2_step(center, sigma, lr, cfg.population_size, rng, batch);
    } catch (const std::exception& e) {
      throw std::runtime_error("generation " + std::to_string(g) + ": " + e.what());
    }
    const std::size_t best_idx = rank_descending(gen.fitnesses).front();
    if (gen.fitnesses[best_idx] > result.best_fitness) {
      result.best = gen.candidates[best_idx];
      result.best_fitness = gen.fitnesses[best_idx];
    }
    center = std::move(gen.center);
    GenerationReport report = summarize(g, gen.fitnesses);
    report.sigma = sigma;
    report.lr = lr;
    report.wall_ms = elapsed_ms(start);
    result.reports.push_back(report);
    if (observer) observer(report, gen.candidates[best_idx]);
  }
  result.center = std::move(center);
  return result;
}

}  // namespace nchl
