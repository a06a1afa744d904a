#pragma once

#include "cagst/circuit.hpp"
#include "cagst/sensitivity.hpp"
#include "cagst/superop.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cagst {

struct GaConfig {
  int population = 40;
  int stall_generations = 10;
  int max_generations = 200;
  int elite = 2;
  int tournament = 3;
  double crossover_rate = 0.7;
  double mutation_rate = 0.5;
  std::uint64_t seed = 1;
};

struct DesignConfig {
  int max_fiducial_len = 3;
  int fiducials_per_side = 6;
  int germ_count = 11;
  int max_initial_germ_len = 4;
  int max_l = 7;
  RepetitionRule repetition = RepetitionRule::double_per_index;
  // Restricts the gates germs may draw from (label strings; empty = the
  // whole context alphabet). Memory-mode germs are built from base gates.
  std::vector<std::string> germ_alphabet;
  GaConfig ga;
};

struct FiducialSelection {
  std::vector<std::vector<GateLabel>> preps;
  std::vector<std::vector<GateLabel>> meass;
  FiducialSensitivity sensitivity;
  double fitness = 0.0;
};

// Exhaustive/greedy fiducial search over all sequences of length <=
// max_fiducial_len, grown one fiducial per side by marginal fitness and
// polished by single-swap hill climbing. Throws std::runtime_error when no
// informationally complete set exists in the space.
FiducialSelection select_fiducials(const GateSet& gs_perfect, const DesignConfig& cfg);

struct GermSet {
  std::vector<std::vector<GateLabel>> germs;
  double fitness = 0.0;
  bool feasible = false;
  int generations = 0;
};

// Genetic search for a germ set maximizing min(B^L) under the strict
// amplification constraints. Returns the best set found; `feasible` is
// false when every candidate in the budget violated a constraint.
GermSet select_germs(const GateSet& gs_perfect,
                     const std::vector<std::vector<GateLabel>>& preps,
                     const std::vector<std::vector<GateLabel>>& meass,
                     const DesignConfig& cfg, const ContextSpec& ctx);

// Rebuilds a memory-mode germ so the leading context floats and every later
// context follows the successor rule; identity for other modes.
std::vector<GateLabel> normalize_germ(const std::vector<GateLabel>& germ,
                                      const ContextSpec& ctx);

template <class Candidate>
struct GaResult {
  Candidate best;
  double fitness = 0.0;
  int generations = 0;
  std::vector<double> best_history;  // best-so-far after each generation
};

// Elitist generational GA: tournament selection, crossover, mutation;
// stops after cfg.stall_generations without improvement. Space needs
// random(rng), mutate(c, rng), crossover(a, b, rng).
template <class Fitness, class Space>
auto ga_run(Fitness&& fitness, Space&& space, const GaConfig& cfg)
    -> GaResult<decltype(space.random(std::declval<std::mt19937_64&>()))> {
  using Candidate = decltype(space.random(std::declval<std::mt19937_64&>()));
  std::mt19937_64 rng(cfg.seed);

  std::vector<Candidate> pop;
  std::vector<double> fit;
  pop.reserve(cfg.population);
  for (int i = 0; i < cfg.population; ++i) pop.push_back(space.random(rng));
  fit.resize(pop.size());
  for (size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);

  auto argbest = [&]() {
    size_t b = 0;
    for (size_t i = 1; i < pop.size(); ++i)
      if (fit[i] > fit[b]) b = i;
    return b;
  };

  GaResult<Candidate> result;
  size_t b = argbest();
  result.best = pop[b];
  result.fitness = fit[b];

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, cfg.population - 1);
  auto tournament = [&]() {
    int best = pick(rng);
    for (int t = 1; t < cfg.tournament; ++t) {
      int c = pick(rng);
      if (fit[c] > fit[best]) best = c;
    }
    return best;
  };

  int stall = 0;
  while (stall < cfg.stall_generations && result.generations < cfg.max_generations) {
    std::vector<Candidate> next;
    next.reserve(pop.size());
    // elites: top cfg.elite by fitness, index order breaking ties
    std::vector<size_t> order(pop.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t c) { return fit[a] > fit[c]; });
    for (int e = 0; e < cfg.elite && e < static_cast<int>(order.size()); ++e)
      next.push_back(pop[order[e]]);
    while (next.size() < pop.size()) {
      int a = tournament();
      Candidate child = pop[a];
      if (unit(rng) < cfg.crossover_rate) child = space.crossover(pop[a], pop[tournament()], rng);
      if (unit(rng) < cfg.mutation_rate) child = space.mutate(child, rng);
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    for (size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);
    ++result.generations;

    size_t g = argbest();
    if (fit[g] > result.fitness + 1e-15) {
      result.fitness = fit[g];
      result.best = pop[g];
      stall = 0;
    } else {
      ++stall;
    }
    result.best_history.push_back(result.fitness);
  }
  return result;
}

}  // namespace cagst
