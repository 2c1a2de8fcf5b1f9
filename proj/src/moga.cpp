#include "fopi/moga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace fopi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // 53-bit uniform in [0, 1); independent of the standard library's
    // distribution implementations.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 engine_;
};

ObjectivePair pair_of(const Individual& ind) {
    return {ind.objectives->j1_itae, ind.objectives->j2_energy};
}

void sbx_crossover(std::vector<double>& a, std::vector<double>& b, const GAConfig& cfg, Rng& rng) {
    const double eta = cfg.eta_crossover;
    for (std::size_t g = 0; g < a.size(); ++g) {
        if (rng.uniform() > 0.5) {
            continue;
        }
        if (std::abs(a[g] - b[g]) <= 1e-14) {
            continue;
        }
        const double lb = cfg.bounds[g].lo;
        const double ub = cfg.bounds[g].hi;
        const double y1 = std::min(a[g], b[g]);
        const double y2 = std::max(a[g], b[g]);
        const double u = rng.uniform();
        const auto spread = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                    : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
        };
        const double bq1 = spread(1.0 + 2.0 * (y1 - lb) / (y2 - y1));
        const double bq2 = spread(1.0 + 2.0 * (ub - y2) / (y2 - y1));
        double c1 = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), lb, ub);
        double c2 = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), lb, ub);
        if (rng.uniform() <= 0.5) {
            std::swap(c1, c2);
        }
        a[g] = c1;
        b[g] = c2;
    }
}

void polynomial_mutation(std::vector<double>& x, const GAConfig& cfg, Rng& rng) {
    const double eta = cfg.eta_mutation;
    const double mut_pow = 1.0 / (eta + 1.0);
    for (std::size_t g = 0; g < x.size(); ++g) {
        if (rng.uniform() > cfg.mutation_prob) {
            continue;
        }
        const double lb = cfg.bounds[g].lo;
        const double ub = cfg.bounds[g].hi;
        const double width = ub - lb;
        const double d1 = (x[g] - lb) / width;
        const double d2 = (ub - x[g]) / width;
        const double u = rng.uniform();
        double dq;
        if (u < 0.5) {
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
            dq = std::pow(val, mut_pow) - 1.0;
        } else {
            const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            dq = 1.0 - std::pow(val, mut_pow);
        }
        x[g] = std::clamp(x[g] + dq * width, lb, ub);
    }
}

const Individual& tournament(const std::vector<Individual>& pop, Rng& rng) {
    const Individual& a = pop[rng.index(pop.size())];
    const Individual& b = pop[rng.index(pop.size())];
    if (a.rank != b.rank) {
        return a.rank < b.rank ? a : b;
    }
    return b.crowding > a.crowding ? b : a;
}

void evaluate_all(std::vector<Individual>& pop, const Evaluator& eval, unsigned workers) {
    parallel_for(pop.size(), workers, [&](std::size_t i) {
        if (pop[i].objectives) {
            return;
        }
        Objectives obj;
        try {
            obj = eval(pop[i].genes);
        } catch (const std::exception&) {
            obj = penalty_objectives();
        }
        if (!std::isfinite(obj.j1_itae) || !std::isfinite(obj.j2_energy)) {
            obj = penalty_objectives();
        }
        pop[i].objectives = obj;
    });
}

// Assigns rank and crowding in place and returns the fronts.
std::vector<std::vector<std::size_t>> rank_population(std::vector<Individual>& pop) {
    std::vector<ObjectivePair> pts;
    pts.reserve(pop.size());
    for (const auto& ind : pop) {
        pts.push_back(pair_of(ind));
    }
    auto fronts = non_dominated_sort(pts);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<ObjectivePair> fp;
        for (auto i : fronts[f]) {
            fp.push_back(pts[i]);
        }
        const auto cd = crowding_distance(fp);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            pop[fronts[f][k]].rank = static_cast<int>(f);
            pop[fronts[f][k]].crowding = cd[k];
        }
    }
    return fronts;
}

std::vector<std::size_t> by_crowding(const std::vector<std::size_t>& front,
                                     const std::vector<Individual>& pop) {
    std::vector<std::size_t> order = front;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pop[a].crowding > pop[b].crowding;
    });
    return order;
}

std::vector<Individual> truncate(std::vector<Individual> merged, const GAConfig& cfg) {
    const auto fronts = rank_population(merged);
    const auto target = static_cast<std::size_t>(cfg.pop_size);
    const auto elite_cap = static_cast<std::size_t>(
        std::ceil(cfg.pareto_fraction * static_cast<double>(cfg.pop_size) - 1e-12));

    std::vector<std::size_t> chosen;
    const auto first = by_crowding(fronts[0], merged);
    const std::size_t n_elite = std::min(first.size(), elite_cap);
    chosen.insert(chosen.end(), first.begin(), first.begin() + static_cast<std::ptrdiff_t>(n_elite));
    for (std::size_t f = 1; f < fronts.size() && chosen.size() < target; ++f) {
        const auto order = by_crowding(fronts[f], merged);
        for (auto i : order) {
            if (chosen.size() == target) {
                break;
            }
            chosen.push_back(i);
        }
    }
    for (std::size_t k = n_elite; k < first.size() && chosen.size() < target; ++k) {
        chosen.push_back(first[k]);
    }

    std::vector<Individual> next;
    next.reserve(target);
    for (auto i : chosen) {
        next.push_back(std::move(merged[i]));
    }
    rank_population(next);
    return next;
}

void update_archive(std::vector<FrontRecord>& archive, const std::vector<Individual>& pop) {
    std::vector<FrontRecord> all = archive;
    for (const auto& ind : pop) {
        if (!ind.objectives->penalized) {
            all.push_back({ind.genes, ind.objectives->j1_itae, ind.objectives->j2_energy});
        }
    }
    archive = non_dominated_subset(all).records;
}

ParetoFront population_front(const std::vector<Individual>& pop) {
    std::vector<FrontRecord> recs;
    for (const auto& ind : pop) {
        if (ind.rank == 0 && !ind.objectives->penalized) {
            recs.push_back({ind.genes, ind.objectives->j1_itae, ind.objectives->j2_energy});
        }
    }
    return non_dominated_subset(recs);
}

}  // namespace

void validate(const GAConfig& cfg) {
    if (cfg.pop_size < 4 || cfg.pop_size % 2 != 0) {
        throw std::invalid_argument(fmt::format("pop_size must be even and >= 4 (got {})", cfg.pop_size));
    }
    if (cfg.generations < 0) {
        throw std::invalid_argument("generations must be nonnegative");
    }
    const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(cfg.crossover_prob) || !prob(cfg.mutation_prob)) {
        throw std::invalid_argument("crossover and mutation probabilities must lie in [0, 1]");
    }
    if (!(cfg.pareto_fraction > 0.0 && cfg.pareto_fraction <= 1.0)) {
        throw std::invalid_argument("pareto_fraction must lie in (0, 1]");
    }
    if (cfg.bounds.empty()) {
        throw std::invalid_argument("at least one gene bound is required");
    }
    for (const auto& b : cfg.bounds) {
        if (!(b.lo < b.hi)) {
            throw std::invalid_argument(fmt::format("invalid gene bounds [{}, {}]", b.lo, b.hi));
        }
    }
}

std::vector<ObjectivePair> ParetoFront::points() const {
    std::vector<ObjectivePair> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.j1, r.j2});
    }
    return out;
}

bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
    return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const ObjectivePair> points) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> counter(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(points[p], points[q])) {
                dominated[p].push_back(q);
            } else if (dominates(points[q], points[p])) {
                ++counter[p];
            }
        }
        if (counter[p] == 0) {
            current.push_back(p);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            for (auto q : dominated[p]) {
                if (--counter[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectivePair> front) {
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), kInf);
        return dist;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < 2; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
        const double lo = front[order.front()][m];
        const double hi = front[order.back()][m];
        dist[order.front()] = kInf;
        dist[order.back()] = kInf;
        const double range = hi - lo;
        if (!(range > 0.0)) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            dist[order[k]] += (front[order[k + 1]][m] - front[order[k - 1]][m]) / range;
        }
    }
    return dist;
}

ParetoFront non_dominated_subset(std::span<const FrontRecord> records) {
    ParetoFront out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ObjectivePair pi{records[i].j1, records[i].j2};
        bool keep = true;
        for (std::size_t j = 0; j < records.size() && keep; ++j) {
            const ObjectivePair pj{records[j].j1, records[j].j2};
            if (dominates(pj, pi)) {
                keep = false;
            } else if (j < i && pj == pi) {
                keep = false;
            }
        }
        if (keep) {
            out.records.push_back(records[i]);
        }
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const FrontRecord& a, const FrontRecord& b) { return a.j1 < b.j1; });
    return out;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t nthreads = std::min<std::size_t>(std::max(1U, workers), n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        if (!failed.exchange(true)) {
                            error = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

ParetoFront evolve(const Evaluator& eval, const GAConfig& cfg, const EvolveOptions& opts) {
    validate(cfg);
    Rng rng(cfg.rng_seed);
    const std::size_t n = static_cast<std::size_t>(cfg.pop_size);

    std::vector<Individual> pop(n);
    for (auto& ind : pop) {
        ind.genes.resize(cfg.bounds.size());
        for (std::size_t g = 0; g < cfg.bounds.size(); ++g) {
            ind.genes[g] = rng.uniform(cfg.bounds[g].lo, cfg.bounds[g].hi);
        }
    }
    evaluate_all(pop, eval, opts.workers);
    rank_population(pop);
    std::vector<FrontRecord> archive;
    update_archive(archive, pop);

    const auto report = [&](int gen) {
        const auto front = population_front(pop);
        GenerationReport rep;
        rep.generation = gen;
        rep.front_size = front.size();
        rep.min_j1 = kInf;
        rep.min_j2 = kInf;
        for (const auto& r : front.records) {
            rep.min_j1 = std::min(rep.min_j1, r.j1);
            rep.min_j2 = std::min(rep.min_j2, r.j2);
        }
        rep.population = pop;
        rep.archive = archive;
        if (opts.progress) {
            *opts.progress << fmt::format("gen {} front1 {} min_J1 {:.6g} min_J2 {:.6g}\n", gen,
                                          rep.front_size, rep.min_j1, rep.min_j2);
        }
        if (opts.observer) {
            opts.observer(rep);
        }
    };
    report(0);

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<Individual> offspring;
        offspring.reserve(n);
        while (offspring.size() < n) {
            auto a = tournament(pop, rng).genes;
            auto b = tournament(pop, rng).genes;
            if (rng.uniform() <= cfg.crossover_prob) {
                sbx_crossover(a, b, cfg, rng);
            }
            polynomial_mutation(a, cfg, rng);
            polynomial_mutation(b, cfg, rng);
            offspring.push_back({std::move(a), std::nullopt, 0, 0.0});
            offspring.push_back({std::move(b), std::nullopt, 0, 0.0});
        }
        evaluate_all(offspring, eval, opts.workers);
        update_archive(archive, offspring);

        std::vector<Individual> merged = std::move(pop);
        merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
        pop = truncate(std::move(merged), cfg);
        report(gen);
    }
    return population_front(pop);
}

}  // namespace fopi
