#include "fopi/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace fopi {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::size_t dominating_pairs(std::span<const ObjectivePair> a, std::span<const ObjectivePair> b) {
    std::size_t count = 0;
    for (const auto& p : a) {
        for (const auto& q : b) {
            count += dominates(p, q) ? 1 : 0;
        }
    }
    return count;
}

ParetoFront front_of(std::span<const ObjectivePair> pts) {
    std::vector<FrontRecord> recs;
    recs.reserve(pts.size());
    for (const auto& p : pts) {
        recs.push_back({{}, p[0], p[1]});
    }
    return non_dominated_subset(recs);
}

}  // namespace

void validate(const SweepSpec& spec) {
    if (spec.chi_values.empty()) {
        throw std::invalid_argument("sweep needs at least one chi value");
    }
    validate(spec.plant);
    for (double chi : spec.chi_values) {
        validate(PredictorSplit{chi}, spec.plant);
    }
    validate(spec.ga);
    if (spec.ga.bounds.size() != 3) {
        throw std::invalid_argument("controller tuning needs bounds for k_p, k_i and lambda");
    }
    validate(spec.sim);
    validate(spec.approx);
}

Evaluator make_loop_evaluator(const HighOrderPlant& plant, double chi, const ApproxConfig& approx,
                              const SimConfig& sim) {
    return [plant, chi, approx, sim](std::span<const double> genes) -> Objectives {
        try {
            const FracPI ctrl{genes[0], genes[1], genes[2]};
            LoopModel loop = build_loop(plant, ctrl, PredictorSplit{chi}, approx, sim.topology);
            return evaluate_objectives(simulate(loop, sim));
        } catch (const FitError&) {
            return penalty_objectives();
        } catch (const std::invalid_argument&) {
            return penalty_objectives();
        }
    };
}

SweepResult run_sweep(const SweepSpec& spec, unsigned workers) {
    validate(spec);
    std::vector<ChiFront> fronts(spec.chi_values.size());
    parallel_for(spec.chi_values.size(), workers, [&](std::size_t i) {
        const double chi = spec.chi_values[i];
        const auto eval = make_loop_evaluator(spec.plant, chi, spec.approx, spec.sim);
        fronts[i].chi = chi;
        fronts[i].front = evolve(eval, spec.ga);
        fronts[i].all_diverged = fronts[i].front.empty();
    });
    return summarize(std::move(fronts), spec.region, spec.split_at);
}

Region auto_region(std::span<const ChiFront> fronts) {
    std::vector<double> j1;
    std::vector<double> j2;
    for (const auto& f : fronts) {
        for (const auto& r : f.front.records) {
            j1.push_back(r.j1);
            j2.push_back(r.j2);
        }
    }
    if (j1.empty()) {
        return {0.0, 0.0, 0.0, 0.0};
    }
    return {0.0, median(j1), 0.0, median(j2)};
}

ParetoFront filter_region(const ParetoFront& front, const Region& region) {
    ParetoFront out;
    for (const auto& r : front.records) {
        if (region.contains(r.j1, r.j2)) {
            out.records.push_back(r);
        }
    }
    return out;
}

double hypervolume(std::span<const ObjectivePair> points, const ObjectivePair& reference) {
    std::vector<ObjectivePair> pts(points.begin(), points.end());
    for (const auto& p : pts) {
        if (!(p[0] < reference[0] && p[1] < reference[1])) {
            throw std::invalid_argument(fmt::format(
                "hypervolume: point ({}, {}) does not dominate reference ({}, {})", p[0], p[1],
                reference[0], reference[1]));
        }
    }
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double ceiling = reference[1];
    for (const auto& p : pts) {
        if (p[1] < ceiling) {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    return area;
}

RegionComparison compare_pools(std::span<const ObjectivePair> low, std::span<const ObjectivePair> high) {
    RegionComparison cmp;
    cmp.sufficient = !low.empty() && !high.empty();
    if (!cmp.sufficient) {
        return cmp;
    }
    ObjectivePair mx{0.0, 0.0};
    for (auto pool : {low, high}) {
        for (const auto& p : pool) {
            mx[0] = std::max(mx[0], p[0]);
            mx[1] = std::max(mx[1], p[1]);
        }
    }
    cmp.reference = {mx[0] * 1.1, mx[1] * 1.1};
    cmp.low_front = front_of(low);
    cmp.high_front = front_of(high);
    const auto lp = cmp.low_front.points();
    const auto hp = cmp.high_front.points();
    cmp.hv_low = hypervolume(lp, cmp.reference);
    cmp.hv_high = hypervolume(hp, cmp.reference);
    cmp.low_dominates = dominating_pairs(lp, hp);
    cmp.high_dominates = dominating_pairs(hp, lp);
    return cmp;
}

RegionComparison compare_regions(std::span<const ChiFront> fronts, double split_at) {
    std::vector<ObjectivePair> low;
    std::vector<ObjectivePair> high;
    for (const auto& f : fronts) {
        auto& pool = f.chi <= split_at ? low : high;
        for (const auto& r : f.region_front.records) {
            pool.push_back({r.j1, r.j2});
        }
    }
    RegionComparison cmp = compare_pools(low, high);
    cmp.split_at = split_at;
    return cmp;
}

SweepResult summarize(std::vector<ChiFront> fronts, const std::optional<Region>& region, double split_at) {
    SweepResult result;
    result.region_auto = !region.has_value();
    result.region = region ? *region : auto_region(fronts);
    for (auto& f : fronts) {
        f.all_diverged = f.front.empty();
        f.region_front = filter_region(f.front, result.region);
    }
    result.fronts = std::move(fronts);
    result.comparison = compare_regions(result.fronts, split_at);
    return result;
}

}  // namespace fopi
