// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.
#include "fopi/config.hpp"
#include "fopi/experiment.hpp"
#include "fopi/io.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <numeric>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace fopi;

namespace {

namespace tol {
constexpr double kOracleY80 = 0.566530;
constexpr double kOracleDigits = 1e-6;
constexpr double kIntegratorCoarse = 1e-3;   // dt = 0.01
constexpr double kIntegratorFine = 1e-6;     // dt = 0.0005
constexpr double kC1Seconds = 5.0;
constexpr double kOustaloupMag = 0.01;
constexpr double kOustaloupPhaseDeg = 1.0;
constexpr double kFitRel = 0.01;
constexpr double kC2Seconds = 1.0;
constexpr int kEquivalenceSets = 5;
constexpr double kEquivalence = 1e-6;  // times the setpoint amplitude
constexpr double kC3Seconds = 30.0;
constexpr double kTailMean = 0.01;
constexpr int kSortInstances = 100;
constexpr std::size_t kSortMaxPoints = 200;
constexpr double kSchafferLo = -0.05;
constexpr double kSchafferHi = 2.05;
constexpr double kC5Seconds = 10.0;
constexpr double kMonteCarloRel = 0.005;
constexpr std::size_t kMonteCarloSamples = 1'000'000;
constexpr double kC7Seconds = 30.0 * 60.0;
}  // namespace tol

struct Args {
    fs::path fopi;
    fs::path configs;
    fs::path work{"acceptance_work"};
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    failures += pass ? 0 : 1;
    std::cout << fmt::format("criterion {} {:<34} {}  {}\n", id, name, pass ? "PASS" : "FAIL", detail) << std::flush;
}

int run(const std::string& cmd) {
    std::cout << "  $ " << cmd << '\n' << std::flush;
    return std::system((cmd + " > /dev/null").c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1: open-loop step of 1/(20s+1)^4 against the closed-form response.
void integrator_fidelity() {
    const auto t0 = Clock::now();
    const FactoredTF plant = approx_lag(1.0, 20.0, 4.0, ApproxConfig{});
    const auto worst = [&](double dt, double& y80) {
        LoopModel open = build_open_loop(plant);
        SimConfig sim;
        sim.dt = dt;
        sim.horizon = 200.0;
        sim.setpoint_time = 0.0;
        sim.disturbance_time = sim.horizon;
        sim.disturbance_amp = 0.0;
        const Trajectory tr = simulate(open, sim);
        double err = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            err = std::max(err, std::abs(tr.y[k] - analytic_step_oracle(1.0, 20.0, 4.0, tr.t[k])));
            if (std::abs(tr.t[k] - 80.0) < 0.5 * dt) {
                y80 = tr.y[k];
            }
        }
        return err;
    };
    double y80_coarse = 0.0, y80_fine = 0.0;
    const double coarse = worst(0.01, y80_coarse);
    const double fine = worst(0.0005, y80_fine);
    const double oracle = analytic_step_oracle(1.0, 20.0, 4.0, 80.0);
    const double secs = seconds_since(t0);
    const bool pass = std::abs(oracle - tol::kOracleY80) <= tol::kOracleDigits && coarse <= tol::kIntegratorCoarse &&
                      fine <= tol::kIntegratorFine && secs < tol::kC1Seconds;
    report(1, "integrator fidelity", pass,
           fmt::format("oracle y(80)={:.6f} sim y(80)={:.6f}; max err {:.2e} @dt=0.01 (<= {:g}), {:.2e} @dt=0.0005 "
                       "(<= {:g}); {:.2f} s",
                       oracle, y80_fine, coarse, tol::kIntegratorCoarse, fine, tol::kIntegratorFine, secs));
}

// 2: Oustaloup s^0.5 at the band centre and the fitted half-order lag.
void fractional_approximation() {
    const auto t0 = Clock::now();
    ApproxConfig band;
    band.omega_low = 1e-3;
    band.omega_high = 1e3;
    band.n_sections = 5;
    const Complex h = oustaloup_approx(0.5, band).freq_response(1.0);
    const double mag_err = std::abs(std::abs(h) - 1.0);
    const double phase_err = std::abs(std::arg(h) * 180.0 / std::numbers::pi - 45.0);

    const ApproxConfig cfg;
    const FitResult fit =
        fit_frac_response([](double w) { return exact_lag_response(1.0, 20.0, 0.5, w); }, cfg);
    const double la = std::log10(cfg.omega_low), lb = std::log10(cfg.omega_high);
    double fit_err = 0.0;
    for (double w : log_grid(std::pow(10.0, la + 0.1 * (lb - la)), std::pow(10.0, lb - 0.1 * (lb - la)), 1000)) {
        const Complex e = exact_lag_response(1.0, 20.0, 0.5, w);
        fit_err = std::max(fit_err, std::abs(fit.tf.freq_response(w) - e) / std::abs(e));
    }
    const double secs = seconds_since(t0);
    const bool pass = mag_err <= tol::kOustaloupMag && phase_err <= tol::kOustaloupPhaseDeg && fit_err <= tol::kFitRel &&
                      secs < tol::kC2Seconds;
    report(2, "fractional approximation", pass,
           fmt::format("s^0.5 at w=1: |H|-1={:.2e}, phase err {:.3f} deg; (20s+1)^-0.5 fit max complex rel err "
                       "{:.2e} over central 80%; {:.2f} s",
                       mag_err, phase_err, fit_err, secs));
}

bool closed_loop_stable(const LoopModel& loop) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(loop.system.A, false);
    return (es.eigenvalues().real().array() < 0.0).all();
}

// 3: predictor versus equivalent-controller topology on identical blocks.
void topology_equivalence() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2468);
    std::uniform_real_distribution<double> kp(0.3, 5.0), ki(0.005, 0.2), lam(0.3, 1.7), chi(0.2, 1.8);
    const SimConfig sim;
    int accepted = 0, tried = 0;
    double worst = 0.0;
    bool ok = true;
    while (accepted < tol::kEquivalenceSets && tried < 200) {
        ++tried;
        const FracPI c{kp(rng), ki(rng), lam(rng)};
        const PredictorSplit split{chi(rng)};
        LoopBlocks blocks;
        try {
            blocks = approximate_blocks(HighOrderPlant{}, c, split, ApproxConfig{});
        } catch (const FitError&) {
            continue;
        }
        LoopModel a = build_loop(blocks, Topology::predictor);
        if (!closed_loop_stable(a)) {
            continue;
        }
        LoopModel b = build_loop(blocks, Topology::equivalent);
        const Trajectory ta = simulate(a, sim);
        const Trajectory tb = simulate(b, sim);
        if (ta.diverged || tb.diverged || ta.size() != tb.size()) {
            ok = false;
            break;
        }
        for (std::size_t k = 0; k < ta.size(); ++k) {
            worst = std::max({worst, std::abs(ta.y[k] - tb.y[k]), std::abs(ta.u[k] - tb.u[k])});
        }
        std::cout << fmt::format("  set {}: k_p={:.4g} k_i={:.4g} lambda={:.4g} chi={:.3g}\n", accepted + 1, c.k_p,
                                 c.k_i, c.lambda, split.chi);
        ++accepted;
    }
    const double secs = seconds_since(t0);
    const bool pass = ok && accepted >= tol::kEquivalenceSets && worst <= tol::kEquivalence * sim.setpoint_amp &&
                      secs < tol::kC3Seconds;
    report(3, "topology equivalence", pass,
           fmt::format("{} stabilizing sets, max |y|,|u| difference {:.2e} (<= {:g}); {:.2f} s", accepted, worst,
                       tol::kEquivalence, secs));
}

// 5: sort against brute force, Schaffer front location.
void moga_correctness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(13579);
    bool sort_ok = true;
    for (int inst = 0; inst < tol::kSortInstances && sort_ok; ++inst) {
        const std::size_t n = 1 + rng() % tol::kSortMaxPoints;
        std::uniform_int_distribution<int> coord(0, inst % 2 == 0 ? 20 : 100000);
        std::vector<ObjectivePair> pts(n);
        for (auto& p : pts) {
            p = {static_cast<double>(coord(rng)), static_cast<double>(coord(rng))};
        }
        const auto fronts = non_dominated_sort(pts);
        std::vector<int> rank(n, -1);
        for (std::size_t f = 0; f < fronts.size(); ++f) {
            for (std::size_t i : fronts[f]) {
                rank[i] = static_cast<int>(f);
            }
        }
        // Oracle: rank is the length of the longest dominance chain ending at the point.
        std::vector<int> depth(n, 0);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
        for (std::size_t a : order) {
            for (std::size_t b = 0; b < n; ++b) {
                const bool le = pts[b][0] <= pts[a][0] && pts[b][1] <= pts[a][1];
                const bool lt = pts[b][0] < pts[a][0] || pts[b][1] < pts[a][1];
                if (le && lt) {
                    depth[a] = std::max(depth[a], depth[b] + 1);
                }
            }
        }
        sort_ok = rank == depth;
    }

    GAConfig cfg;
    cfg.bounds = {{-5.0, 5.0}};
    cfg.rng_seed = 1;
    const ParetoFront front = evolve(
        [](std::span<const double> x) { return Objectives{x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0), false}; }, cfg);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : front.records) {
        lo = std::min(lo, r.genes[0]);
        hi = std::max(hi, r.genes[0]);
    }
    const double secs = seconds_since(t0);
    const bool pass = sort_ok && !front.empty() && lo >= tol::kSchafferLo && hi <= tol::kSchafferHi &&
                      secs < tol::kC5Seconds;
    report(5, "MO-GA correctness", pass,
           fmt::format("sort vs brute force on {} instances: {}; Schaffer (pop {}, gens {}, seed {}) front of {} "
                       "points, genes in [{:.4f}, {:.4f}]; {:.2f} s",
                       tol::kSortInstances, sort_ok ? "match" : "MISMATCH", cfg.pop_size, cfg.generations,
                       cfg.rng_seed, front.size(), lo, hi, secs));
}

// 6: hypervolume against Monte Carlo and the hand case.
void hypervolume_check() {
    const std::vector<ObjectivePair> hand{{1, 3}, {3, 1}};
    const double hand_hv = hypervolume(hand, {4, 4});
    std::mt19937_64 rng(8642);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
        const std::size_t n = 1 + rng() % 20;
        std::vector<ObjectivePair> pts(n);
        for (auto& p : pts) {
            p = {u(rng) * 100.0, u(rng) * 3.0};
        }
        const ObjectivePair ref{110.0, 3.3};
        const double exact = hypervolume(pts, ref);
        std::size_t hit = 0;
        for (std::size_t s = 0; s < tol::kMonteCarloSamples; ++s) {
            const double x = u(rng) * ref[0], y = u(rng) * ref[1];
            hit += std::any_of(pts.begin(), pts.end(),
                               [&](const ObjectivePair& p) { return p[0] <= x && p[1] <= y; });
        }
        const double mc = static_cast<double>(hit) / tol::kMonteCarloSamples * ref[0] * ref[1];
        worst = std::max(worst, std::abs(mc - exact) / exact);
    }
    report(6, "hypervolume", hand_hv == 5.0 && worst <= tol::kMonteCarloRel,
           fmt::format("hand case {{(1,3),(3,1)}} ref (4,4) = {}; worst Monte Carlo rel diff {:.2e} (<= {:g})",
                       hand_hv, worst, tol::kMonteCarloRel));
}

double tail_mean(const Trajectory& tr, double from, double to) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.t[k] >= from && tr.t[k] < to) {
            sum += tr.y[k];
            ++n;
        }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

// 7: directional comparison from the desk-scale sweep; 4 reuses its fronts.
void sweep_criteria(const Args& args) {
    const fs::path out = args.work / "desk";
    fs::remove_all(out);
    const auto t0 = Clock::now();
    const int rc = run(fmt::format("\"{}\" sweep --config \"{}\" --out \"{}\"", args.fopi.string(),
                                   (args.configs / "desk.conf").string(), out.string()));
    const double secs = seconds_since(t0);
    if (rc != 0 || !fs::exists(out / "manifest.json")) {
        report(4, "final-value properties", false, "sweep failed");
        report(7, "chi <= 1 beats chi > 1 (hypervolume)", false, fmt::format("sweep exited with status {}", rc));
        return;
    }
    const RunConfig cfg = load_config(out / "manifest.json");
    const SweepResult res = write_report(out);

    // 4
    const auto& s = cfg.sweep;
    const double amp = s.sim.setpoint_amp;
    const double pre_from = s.sim.disturbance_time - 0.05 * (s.sim.disturbance_time - s.sim.setpoint_time);
    const double post_from = s.sim.horizon - 0.05 * (s.sim.horizon - s.sim.disturbance_time);
    std::size_t total = 0, diverged = 0, track_ok = 0, recover_ok = 0, region_total = 0, region_ok = 0;
    double worst_track = 0.0, worst_recover = 0.0;
    for (const auto& f : res.fronts) {
        for (const auto& r : f.front.records) {
            LoopModel loop = build_loop(s.plant, FracPI{r.genes[0], r.genes[1], r.genes[2]}, PredictorSplit{f.chi},
                                        s.approx, s.sim.topology);
            const Trajectory tr = simulate(loop, s.sim);
            if (tr.diverged) {
                ++diverged;
                continue;
            }
            ++total;
            const double track = std::abs(tail_mean(tr, pre_from, s.sim.disturbance_time) - amp) / amp;
            const double recover = std::abs(tail_mean(tr, post_from, s.sim.horizon + s.sim.dt) - amp) / amp;
            worst_track = std::max(worst_track, track);
            worst_recover = std::max(worst_recover, recover);
            track_ok += track <= tol::kTailMean;
            recover_ok += recover <= tol::kTailMean;
            if (res.region.contains(r.j1, r.j2)) {
                ++region_total;
                region_ok += track <= tol::kTailMean && recover <= tol::kTailMean;
            }
        }
    }
    report(4, "final-value properties", total > 0 && track_ok == total && recover_ok == total,
           fmt::format("{} non-diverged tuned candidates ({} diverged): tracking within 1% for {}, recovery within "
                       "1% for {}; worst {:.2e} / {:.2e}; trade-off region points passing both: {}/{}",
                       total, diverged, track_ok, recover_ok, worst_track, worst_recover, region_ok, region_total));

    // 7
    const auto& cmp = res.comparison;
    const bool pass = cmp.sufficient && cmp.hv_low >= cmp.hv_high && secs < tol::kC7Seconds;
    std::size_t low_pts = 0, high_pts = 0;
    for (const auto& f : res.fronts) {
        (f.chi <= cmp.split_at ? low_pts : high_pts) += f.region_front.size();
    }
    std::string detail = fmt::format("region J1<={:.6g}, J2<={:.6g}; region points chi<=1: {}, chi>1: {}; ",
                                     res.region.j1_hi, res.region.j2_hi, low_pts, high_pts);
    detail += cmp.sufficient ? fmt::format("hv(chi<=1)={:.6g} hv(chi>1)={:.6g}; ", cmp.hv_low, cmp.hv_high)
                             : std::string("insufficient data (one side empty); ");
    detail += fmt::format("{:.0f} s", secs);
    report(7, "chi <= 1 beats chi > 1 (hypervolume)", pass, detail);
}

bool csv_identical(const fs::path& a, const fs::path& b, std::size_t& compared, std::string& first_diff) {
    bool same = true;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (entry.path().extension() != ".csv") {
            continue;
        }
        const fs::path rel = fs::relative(entry.path(), a);
        ++compared;
        if (!fs::exists(b / rel) || slurp(entry.path()) != slurp(b / rel)) {
            same = false;
            if (first_diff.empty()) {
                first_diff = rel.string();
            }
        }
    }
    return same;
}

// 8: rerun each command from its manifest and compare CSV bytes.
void determinism(const Args& args) {
    const std::string fopi = fmt::format("\"{}\"", args.fopi.string());
    const std::string smoke = (args.configs / "smoke.conf").string();
    const fs::path w = args.work / "rerun";
    fs::remove_all(w);
    struct Job {
        std::string name;
        std::string first;
    };
    const std::vector<Job> jobs{
        {"simulate", fmt::format("{} simulate --kp 1.3 --ki 0.03 --lambda 0.9 --chi 0.7", fopi)},
        {"tune", fmt::format("{} tune --config \"{}\" --chi 1.2 --quiet", fopi, smoke)},
        {"sweep", fmt::format("{} sweep --config \"{}\"", fopi, smoke)},
    };
    bool ok = true;
    std::size_t compared = 0;
    std::string first_diff;
    for (const auto& job : jobs) {
        const fs::path a = w / (job.name + "_a");
        const fs::path b = w / (job.name + "_b");
        const std::string verb = job.name;
        ok = ok && run(fmt::format("{} --out \"{}\"", job.first, a.string())) == 0;
        ok = ok && run(fmt::format("{} {} --config \"{}\" --out \"{}\"", fopi, verb, (a / "manifest.json").string(),
                                   b.string())) == 0;
        ok = ok && csv_identical(a, b, compared, first_diff);
    }
    // The desk sweep from criterion 7, rerun from its manifest.
    const fs::path desk = args.work / "desk";
    if (fs::exists(desk / "manifest.json")) {
        const fs::path b = w / "desk_b";
        ok = ok && run(fmt::format("{} sweep --config \"{}\" --out \"{}\"", fopi, (desk / "manifest.json").string(),
                                   b.string())) == 0;
        ok = ok && csv_identical(desk, b, compared, first_diff);
    } else {
        ok = false;
    }
    report(8, "determinism from manifests", ok && compared > 0,
           fmt::format("{} CSV files compared byte for byte{}", compared,
                       first_diff.empty() ? "" : fmt::format("; first difference in {}", first_diff)));
}

}  // namespace

int main(int argc, char** argv) {
    Args args;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--fopi") {
            args.fopi = argv[i + 1];
        } else if (key == "--configs") {
            args.configs = argv[i + 1];
        } else if (key == "--work-dir") {
            args.work = argv[i + 1];
        } else {
            std::cerr << "unknown option " << key << '\n';
            return 64;
        }
    }
    if (args.fopi.empty() || args.configs.empty()) {
        std::cerr << "usage: acceptance --fopi PATH --configs DIR [--work-dir DIR]\n";
        return 64;
    }
    fs::create_directories(args.work);

    integrator_fidelity();
    fractional_approximation();
    topology_equivalence();
    moga_correctness();
    hypervolume_check();
    sweep_criteria(args);
    determinism(args);
    std::cout << fmt::format("{} of 8 criteria failed\n", failures);
    return failures;
}
