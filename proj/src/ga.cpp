#include "ga.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ensemble.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace uregm {

double fitness(const FeatureMask& mask, const Dataset& ds, std::size_t folds,
               std::uint64_t seed) {
  if (!mask.any()) throw std::invalid_argument("fitness: all-zero mask");
  if (folds < 2) throw std::invalid_argument("fitness: folds must be >= 2");
  if (ds.rows() < folds) throw std::invalid_argument("fitness: folds exceed rows");
  static const LearnerConfigMap kProxyCfg = default_learner_configs();
  const Eigen::MatrixXd oof =
      oof_predictions(ds, mask, {LearnerKind::LiR}, folds, seed, kProxyCfg);
  return accuracy(oof.col(0), ds.target());
}

std::vector<double> scale_to_expectation(const std::vector<double>& fitnesses) {
  if (fitnesses.empty()) {
    throw std::invalid_argument("scale_to_expectation: empty input");
  }
  const auto [lo_it, hi_it] = std::minmax_element(fitnesses.begin(), fitnesses.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> scaled(fitnesses.size());
  if (hi == lo) {
    std::fill(scaled.begin(), scaled.end(),
              0.5 * (kExpectationLow + kExpectationHigh));
    return scaled;
  }
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    scaled[i] = kExpectationLow + (fitnesses[i] - lo) / (hi - lo) *
                                      (kExpectationHigh - kExpectationLow);
  }
  return scaled;
}

namespace {

FeatureMask random_mask(std::size_t n, SplitMix64& rng) {
  FeatureMask mask = FeatureMask::none(n);
  for (std::size_t i = 0; i < n; ++i) mask.bits[i] = rng.next_bool(0.5) ? 1 : 0;
  if (!mask.any()) mask.bits[rng.next_below(n)] = 1;
  return mask;
}

struct Scored {
  FeatureMask mask;
  double fit = 0.0;
};

bool better(const Scored& a, const Scored& b) {
  if (a.fit != b.fit) return a.fit > b.fit;
  return FeatureMask::prefer(a.mask, b.mask);
}

// Memoizes fitness across generations; converged populations re-evaluate the
// same masks repeatedly.
class FitnessCache {
 public:
  FitnessCache(const Dataset& ds, std::size_t folds, std::uint64_t seed)
      : ds_(ds), folds_(folds), seed_(seed) {}

  void score_all(std::vector<Scored>& population, std::size_t jobs) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < population.size(); ++i) {
      const auto it = cache_.find(population[i].mask.bits);
      if (it != cache_.end()) {
        population[i].fit = it->second;
      } else {
        pending.push_back(i);
      }
    }
    std::vector<double> computed(pending.size());
    parallel_for(pending.size(), jobs, [&](std::size_t k) {
      computed[k] = fitness(population[pending[k]].mask, ds_, folds_, seed_);
    });
    for (std::size_t k = 0; k < pending.size(); ++k) {
      population[pending[k]].fit = computed[k];
      cache_.emplace(population[pending[k]].mask.bits, computed[k]);
    }
  }

 private:
  const Dataset& ds_;
  std::size_t folds_;
  std::uint64_t seed_;
  std::map<std::vector<std::uint8_t>, double> cache_;
};

std::size_t tournament(const std::vector<Scored>& population, SplitMix64& rng) {
  std::size_t winner = rng.next_below(population.size());
  for (int i = 1; i < 3; ++i) {
    const std::size_t challenger = rng.next_below(population.size());
    if (better(population[challenger], population[winner])) winner = challenger;
  }
  return winner;
}

}  // namespace

GaResult evolve(const Dataset& ds, const GaConfig& cfg, std::size_t jobs) {
  const std::size_t p = ds.num_features();
  if (p == 0) throw std::invalid_argument("evolve: dataset has no features");
  if (cfg.population_size < 2) {
    throw std::invalid_argument("evolve: population_size must be >= 2");
  }
  if (cfg.elitism >= cfg.population_size) {
    throw std::invalid_argument("evolve: elitism must be < population_size");
  }
  if (cfg.generations < 1) throw std::invalid_argument("evolve: generations must be >= 1");
  if (cfg.crossover_rate < 0.0 || cfg.crossover_rate > 1.0) {
    throw std::invalid_argument("evolve: crossover_rate must be in [0,1]");
  }
  const double mutation_rate =
      cfg.mutation_rate < 0.0 ? 1.0 / static_cast<double>(p) : cfg.mutation_rate;
  if (mutation_rate > 1.0) {
    throw std::invalid_argument("evolve: mutation_rate must be in [0,1]");
  }

  const std::uint64_t fitness_seed = derive_seed(cfg.seed, {stream_tag::kGaFitness});
  FitnessCache cache(ds, cfg.fitness_folds, fitness_seed);

  std::vector<Scored> population(cfg.population_size);
  for (std::size_t i = 0; i < population.size(); ++i) {
    auto rng = derive_stream(cfg.seed, {stream_tag::kGaInit, i});
    population[i].mask = random_mask(p, rng);
  }
  cache.score_all(population, jobs);

  GaResult result;
  result.history.reserve(cfg.generations);

  auto record_generation = [&](std::size_t gen) {
    GenerationStats stats;
    stats.generation = gen;
    stats.best = population[0].fit;
    double sum = 0.0;
    for (const auto& ind : population) {
      stats.best = std::max(stats.best, ind.fit);
      sum += ind.fit;
    }
    stats.mean = sum / static_cast<double>(population.size());
    result.history.push_back(stats);
  };

  auto update_best = [&] {
    for (const auto& ind : population) {
      if (result.best_mask.size() == 0 ||
          better(ind, {result.best_mask, result.best_fitness})) {
        result.best_mask = ind.mask;
        result.best_fitness = ind.fit;
      }
    }
  };

  record_generation(0);
  update_best();

  for (std::size_t gen = 1; gen < cfg.generations; ++gen) {
    std::vector<Scored> ranked = population;
    std::sort(ranked.begin(), ranked.end(), better);

    std::vector<Scored> next;
    next.reserve(cfg.population_size);
    for (std::size_t e = 0; e < cfg.elitism; ++e) next.push_back(ranked[e]);

    for (std::size_t j = next.size(); j < cfg.population_size; ++j) {
      auto rng = derive_stream(cfg.seed, {stream_tag::kGaGen, gen, j});
      const auto& parent_a = population[tournament(population, rng)];
      const auto& parent_b = population[tournament(population, rng)];

      FeatureMask child = parent_a.mask;
      if (rng.next_bool(cfg.crossover_rate)) {
        for (std::size_t g = 0; g < p; ++g) {
          if (rng.next_bool(0.5)) child.bits[g] = parent_b.mask.bits[g];
        }
      }
      for (std::size_t g = 0; g < p; ++g) {
        if (rng.next_bool(mutation_rate)) child.bits[g] ^= 1;
      }
      if (!child.any()) child.bits[rng.next_below(p)] = 1;
      next.push_back({std::move(child), 0.0});
    }

    population = std::move(next);
    cache.score_all(population, jobs);
    record_generation(gen);
    update_best();
  }

  std::vector<double> final_fitnesses(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    final_fitnesses[i] = population[i].fit;
  }
  result.expectation_scores = scale_to_expectation(final_fitnesses);
  return result;
}

}  // namespace uregm
