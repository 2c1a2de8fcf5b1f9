#pragma once

#include "fopi/metrics.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fopi {

using ObjectivePair = std::array<double, 2>;

struct GeneBounds {
    double lo = 0.0;
    double hi = 1.0;
};

struct GAConfig {
    int pop_size = 30;
    int generations = 20;
    double crossover_prob = 0.8;
    double mutation_prob = 0.05;
    double pareto_fraction = 0.35;
    /// k_p, k_i, lambda
    std::vector<GeneBounds> bounds{{0.01, 50.0}, {1e-4, 5.0}, {0.05, 1.95}};
    std::uint64_t rng_seed = 1;
    double eta_crossover = 15.0;
    double eta_mutation = 20.0;
};

void validate(const GAConfig& cfg);

struct Individual {
    std::vector<double> genes;
    std::optional<Objectives> objectives;
    int rank = 0;
    double crowding = 0.0;
};

struct FrontRecord {
    std::vector<double> genes;
    double j1 = 0.0;
    double j2 = 0.0;
};

/// Mutually non-dominated records, sorted by j1.
struct ParetoFront {
    std::vector<FrontRecord> records;

    bool empty() const noexcept { return records.empty(); }
    std::size_t size() const noexcept { return records.size(); }
    std::vector<ObjectivePair> points() const;
};

/// a dominates b: no worse in both objectives, strictly better in one.
bool dominates(const ObjectivePair& a, const ObjectivePair& b);

/// Fronts F1, F2, ... as index lists into points; F1 is the non-dominated set.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const ObjectivePair> points);

/// NSGA-II crowding distance of each point within one front.
std::vector<double> crowding_distance(std::span<const ObjectivePair> front);

/// Keeps the non-dominated subset of records (first occurrence of duplicates).
ParetoFront non_dominated_subset(std::span<const FrontRecord> records);

using Evaluator = std::function<Objectives(std::span<const double> genes)>;

struct GenerationReport {
    int generation = 0;
    std::size_t front_size = 0;
    double min_j1 = 0.0;
    double min_j2 = 0.0;
    std::span<const Individual> population;
    std::span<const FrontRecord> archive;  ///< all non-dominated points evaluated so far
};

struct EvolveOptions {
    unsigned workers = 1;
    std::ostream* progress = nullptr;  ///< one line per generation
    std::function<void(const GenerationReport&)> observer;
};

/// Elitist NSGA-II: binary tournament on (rank, crowding), simulated binary
/// crossover, polynomial mutation, and survivor truncation over parents +
/// offspring with at most ceil(pareto_fraction * pop_size) slots for the
/// first front. Returns the first front of the final population, excluding
/// penalized candidates. Deterministic for a given rng_seed regardless of the
/// worker count.
ParetoFront evolve(const Evaluator& eval, const GAConfig& cfg, const EvolveOptions& opts = {});

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace fopi
