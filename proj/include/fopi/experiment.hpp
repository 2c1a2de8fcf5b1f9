#pragma once

#include "fopi/moga.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fopi {

/// Axis-aligned box in (J1, J2) space, bounds inclusive.
struct Region {
    double j1_lo = 0.0;
    double j1_hi = 0.0;
    double j2_lo = 0.0;
    double j2_hi = 0.0;

    bool contains(double j1, double j2) const noexcept {
        return j1 >= j1_lo && j1 <= j1_hi && j2 >= j2_lo && j2 <= j2_hi;
    }
};

struct SweepSpec {
    std::vector<double> chi_values{0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8};
    HighOrderPlant plant;
    GAConfig ga;
    SimConfig sim;
    ApproxConfig approx;
    std::optional<Region> region;
    double split_at = 1.0;
};

void validate(const SweepSpec& spec);

struct ChiFront {
    double chi = 0.0;
    ParetoFront front;
    ParetoFront region_front;  ///< subset of front inside the region
    bool all_diverged = false;
};

struct RegionComparison {
    double split_at = 1.0;
    bool sufficient = false;           ///< both pools non-empty
    ObjectivePair reference{0.0, 0.0};
    ParetoFront low_front;             ///< pooled non-dominated front, chi <= split_at
    ParetoFront high_front;            ///< pooled non-dominated front, chi > split_at
    double hv_low = 0.0;
    double hv_high = 0.0;
    std::size_t low_dominates = 0;     ///< pairs (a in low, b in high) with a dominating b
    std::size_t high_dominates = 0;
};

struct SweepResult {
    std::vector<ChiFront> fronts;
    Region region;
    bool region_auto = false;
    RegionComparison comparison;
};

/// genes (k_p, k_i, lambda) -> objectives of the simulated predictor loop.
/// Approximation or simulation failures map to the penalty pair.
Evaluator make_loop_evaluator(const HighOrderPlant& plant, double chi, const ApproxConfig& approx,
                              const SimConfig& sim);

/// One GA per chi, each with the same GA settings and seed. chi values run
/// on up to `workers` threads.
SweepResult run_sweep(const SweepSpec& spec, unsigned workers = 1);

/// Box below the cross-chi medians of J1 and J2 over all front points.
Region auto_region(std::span<const ChiFront> fronts);

ParetoFront filter_region(const ParetoFront& front, const Region& region);

/// Area dominated by the points relative to the reference; every point must be
/// strictly below the reference in both objectives.
double hypervolume(std::span<const ObjectivePair> points, const ObjectivePair& reference);

/// Compares two point pools: pooled fronts, hypervolumes against a shared
/// reference (componentwise max over both pools times 1.1) and dominance counts.
RegionComparison compare_pools(std::span<const ObjectivePair> low, std::span<const ObjectivePair> high);

/// Pools the region-filtered fronts by chi <= split_at versus chi > split_at.
RegionComparison compare_regions(std::span<const ChiFront> fronts, double split_at = 1.0);

/// Applies the region (explicit or automatic) and the comparison to raw fronts.
SweepResult summarize(std::vector<ChiFront> fronts, const std::optional<Region>& region, double split_at);

}  // namespace fopi
