#include "fopi/experiment.hpp"
#include "fopi/moga.hpp"

#include <doctest.h>
#include <fmt/format.h>
#include <random>
#include <set>
#include <sstream>

using namespace fopi;

namespace {

// Peel off fronts by repeated pairwise dominance checks.
std::vector<std::set<std::size_t>> brute_force_fronts(const std::vector<ObjectivePair>& pts) {
    std::vector<std::set<std::size_t>> fronts;
    std::set<std::size_t> remaining;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        remaining.insert(i);
    }
    while (!remaining.empty()) {
        std::set<std::size_t> front;
        for (std::size_t i : remaining) {
            bool dominated = false;
            for (std::size_t j : remaining) {
                const bool le = pts[j][0] <= pts[i][0] && pts[j][1] <= pts[i][1];
                const bool lt = pts[j][0] < pts[i][0] || pts[j][1] < pts[i][1];
                dominated = dominated || (le && lt);
            }
            if (!dominated) {
                front.insert(i);
            }
        }
        for (std::size_t i : front) {
            remaining.erase(i);
        }
        fronts.push_back(front);
    }
    return fronts;
}

GAConfig schaffer_config(std::uint64_t seed) {
    GAConfig cfg;
    cfg.bounds = {{-5.0, 5.0}};
    cfg.rng_seed = seed;
    return cfg;
}

Objectives schaffer(std::span<const double> x) { return {x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0), false}; }

}  // namespace

TEST_CASE("dominance") {
    CHECK(dominates({1, 1}, {2, 2}));
    CHECK(dominates({1, 2}, {1, 3}));
    CHECK_FALSE(dominates({1, 2}, {1, 2}));
    CHECK_FALSE(dominates({1, 3}, {3, 1}));
}

TEST_CASE("non-dominated sort examples") {
    const std::vector<ObjectivePair> pts{{1, 2}, {2, 1}, {3, 3}};
    const auto fronts = non_dominated_sort(pts);
    REQUIRE(fronts.size() == 2);
    CHECK(std::set<std::size_t>(fronts[0].begin(), fronts[0].end()) == std::set<std::size_t>{0, 1});
    CHECK(fronts[1] == std::vector<std::size_t>{2});

    const std::vector<ObjectivePair> single{{4, 4}};
    CHECK(non_dominated_sort(single).size() == 1);

    const std::vector<ObjectivePair> dup{{1, 1}, {1, 1}};
    const auto df = non_dominated_sort(dup);
    REQUIRE(df.size() == 1);
    CHECK(df[0].size() == 2);
}

TEST_CASE("non-dominated sort matches the brute-force oracle") {
    std::mt19937_64 rng(2024);
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 1 + rng() % 200;
        // Coarse integer grid so that ties and duplicates occur.
        std::uniform_int_distribution<int> coord(0, inst % 2 == 0 ? 15 : 1000);
        std::vector<ObjectivePair> pts(n);
        for (auto& p : pts) {
            p = {static_cast<double>(coord(rng)), static_cast<double>(coord(rng))};
        }
        const auto fast = non_dominated_sort(pts);
        const auto slow = brute_force_fronts(pts);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t f = 0; f < fast.size(); ++f) {
            CHECK(std::set<std::size_t>(fast[f].begin(), fast[f].end()) == slow[f]);
        }
    }
}

TEST_CASE("crowding distance examples") {
    const auto inf = std::numeric_limits<double>::infinity();
    const std::vector<ObjectivePair> one{{1, 1}};
    CHECK(crowding_distance(one)[0] == inf);
    const std::vector<ObjectivePair> two{{1, 2}, {2, 1}};
    CHECK(crowding_distance(two) == std::vector<double>{inf, inf});
    const std::vector<ObjectivePair> three{{0, 2}, {1, 1}, {2, 0}};
    const auto cd = crowding_distance(three);
    CHECK(cd[0] == inf);
    CHECK(cd[1] == doctest::Approx(2.0));
    CHECK(cd[2] == inf);
}

TEST_CASE("non-dominated subset drops duplicates and dominated records") {
    const std::vector<FrontRecord> recs{{{0.0}, 1, 3}, {{1.0}, 2, 2}, {{2.0}, 1, 3}, {{3.0}, 3, 3}, {{4.0}, 3, 1}};
    const ParetoFront f = non_dominated_subset(recs);
    REQUIRE(f.size() == 3);
    CHECK(f.records[0].genes[0] == 0.0);
    CHECK(f.records[1].j1 == 2);
    CHECK(f.records[2].j1 == 3);
}

TEST_CASE("Schaffer problem converges onto its Pareto set") {
    const ParetoFront front = evolve(schaffer, schaffer_config(1));
    REQUIRE_FALSE(front.empty());
    for (const auto& r : front.records) {
        CHECK(r.genes[0] >= -0.05);
        CHECK(r.genes[0] <= 2.05);
    }
    const auto pts = front.points();
    for (const auto& a : pts) {
        for (const auto& b : pts) {
            CHECK_FALSE(dominates(a, b));
        }
    }
}

TEST_CASE("evolve is deterministic and independent of the worker count") {
    const auto run = [](unsigned workers) {
        EvolveOptions opts;
        opts.workers = workers;
        std::ostringstream log;
        opts.progress = &log;
        const ParetoFront f = evolve(schaffer, schaffer_config(77), opts);
        std::ostringstream out;
        for (const auto& r : f.records) {
            out << fmt::format("{:a} {:a} {:a}\n", r.genes[0], r.j1, r.j2);
        }
        return out.str() + log.str();
    };
    const std::string a = run(1);
    CHECK(a == run(1));
    CHECK(a == run(4));
    const ParetoFront other = evolve(schaffer, schaffer_config(78));
    CHECK(fmt::format("{:a}", other.records.front().genes[0]) != a.substr(0, a.find(' ')));
}

TEST_CASE("genes stay in bounds; archive hypervolume never decreases; extremes are kept") {
    GAConfig cfg;
    cfg.bounds = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    cfg.generations = 25;
    cfg.mutation_prob = 0.3;
    cfg.rng_seed = 9;
    // ZDT1-like two-objective problem on three genes.
    const Evaluator zdt = [](std::span<const double> x) {
        const double g = 1.0 + 9.0 * (x[1] + x[2]) / 2.0;
        return Objectives{x[0], g * (1.0 - std::sqrt(x[0] / g)), false};
    };
    const ObjectivePair ref{1.1, 11.0};
    double last_hv = -1.0;
    double last_min_j1 = std::numeric_limits<double>::infinity();
    double last_min_j2 = std::numeric_limits<double>::infinity();
    int reports = 0;
    EvolveOptions opts;
    opts.observer = [&](const GenerationReport& rep) {
        ++reports;
        for (const auto& ind : rep.population) {
            for (std::size_t g = 0; g < ind.genes.size(); ++g) {
                REQUIRE(ind.genes[g] >= cfg.bounds[g].lo);
                REQUIRE(ind.genes[g] <= cfg.bounds[g].hi);
            }
        }
        std::vector<ObjectivePair> pts;
        for (const auto& r : rep.archive) {
            pts.push_back({r.j1, r.j2});
        }
        const double hv = hypervolume(pts, ref);
        CHECK(hv >= last_hv);
        last_hv = hv;
        CHECK(rep.min_j1 <= last_min_j1);
        CHECK(rep.min_j2 <= last_min_j2);
        last_min_j1 = rep.min_j1;
        last_min_j2 = rep.min_j2;
    };
    const ParetoFront front = evolve(zdt, cfg, opts);
    CHECK(reports == cfg.generations + 1);
    CHECK_FALSE(front.empty());
}

TEST_CASE("evaluation failures become penalties, never abort") {
    GAConfig cfg = schaffer_config(3);
    cfg.generations = 5;
    const Evaluator flaky = [](std::span<const double> x) -> Objectives {
        if (x[0] > 2.5) {
            throw std::runtime_error("boom");
        }
        return schaffer(x);
    };
    const ParetoFront front = evolve(flaky, cfg);
    CHECK_FALSE(front.empty());
    for (const auto& r : front.records) {
        CHECK(r.j1 < kPenaltyObjective);
    }
}

TEST_CASE("GA config validation") {
    GAConfig cfg;
    cfg.pop_size = 31;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = GAConfig{};
    cfg.pareto_fraction = 0.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = GAConfig{};
    cfg.crossover_prob = 1.5;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    CHECK_NOTHROW(validate(GAConfig{}));
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}
