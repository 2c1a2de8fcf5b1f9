// fopi: fractional-order [PI] controller with a fractional Smith-like
// predictor; approximation, simulation, tuning and chi sweeps.

#include "fopi/config.hpp"
#include "fopi/experiment.hpp"
#include "fopi/io.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace {

using namespace fopi;

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

unsigned worker_count() {
    if (const char* env = std::getenv("FOPI_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) {
                return static_cast<unsigned>(n);
            }
        } catch (const std::exception&) {
        }
        throw ConfigError(fmt::format("FOPI_WORKERS must be a positive integer (got '{}')", env));
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

RunConfig base_config(const std::string& path) {
    return path.empty() ? RunConfig{} : load_config(path);
}

void require_out_dir(const std::string& out) {
    if (out.empty()) {
        throw ConfigError("--out DIR is required");
    }
    fs::create_directories(out);
}

int cmd_approx(double order, double wb, double wh, int sections, int grid) {
    ApproxConfig cfg;
    cfg.omega_low = wb;
    cfg.omega_high = wh;
    cfg.n_sections = sections;
    cfg.fit_grid_points = grid;
    const RationalTF tf = oustaloup_approx(order, cfg);
    std::cout << fmt::format("num = [{:.17g}]\n", fmt::join(tf.num(), ", "));
    std::cout << fmt::format("den = [{:.17g}]\n", fmt::join(tf.den(), ", "));

    const double la = std::log10(wb);
    const double lb = std::log10(wh);
    const double c_lo = std::pow(10.0, la + 0.1 * (lb - la));
    const double c_hi = std::pow(10.0, lb - 0.1 * (lb - la));
    double mag_err = 0.0;
    double phase_err = 0.0;
    for (double w : log_grid(c_lo, c_hi, grid)) {
        const Complex h = tf.freq_response(w);
        const Complex exact = std::pow(Complex{0.0, w}, order);
        mag_err = std::max(mag_err, std::abs(std::abs(h) - std::abs(exact)) / std::abs(exact));
        phase_err = std::max(phase_err, std::abs(std::arg(h / exact)) * 180.0 / M_PI);
    }
    std::cout << fmt::format("order = {}\nsections = {}\nband = [{:g}, {:g}] rad/s\n", order, sections, wb, wh);
    std::cout << fmt::format("central band [{:.4g}, {:.4g}]: max magnitude error {:.4g} %, max phase error {:.4g} deg\n",
                             c_lo, c_hi, 100.0 * mag_err, phase_err);
    return 0;
}

int cmd_simulate(RunConfig cfg, const std::string& out) {
    require_out_dir(out);
    const auto& s = cfg.sweep;
    LoopModel loop = build_loop(s.plant, cfg.controller, cfg.split, s.approx, s.sim.topology);
    const Trajectory traj = simulate(loop, s.sim);
    const Objectives obj = evaluate_objectives(traj);
    {
        std::ofstream f(fs::path(out) / "trajectory.csv", std::ios::binary);
        write_trajectory_csv(traj, f);
    }
    nlohmann::ordered_json metrics;
    metrics["J1"] = obj.j1_itae;
    metrics["J2"] = obj.j2_energy;
    metrics["J1_display"] = display_j1(obj.j1_itae);
    metrics["diverged"] = traj.diverged;
    metrics["samples"] = traj.size();
    metrics["states"] = loop.states();
    write_json(fs::path(out) / "metrics.json", metrics);
    write_json(fs::path(out) / "manifest.json", make_manifest("simulate", cfg));
    std::cout << fmt::format("J1 = {:.10g} (display {:.10g}), J2 = {:.10g}{}\n", obj.j1_itae,
                             display_j1(obj.j1_itae), obj.j2_energy, traj.diverged ? " [diverged]" : "");
    return 0;
}

int cmd_tune(RunConfig cfg, const std::string& out, bool quiet) {
    require_out_dir(out);
    auto& s = cfg.sweep;
    s.chi_values = {cfg.split.chi};
    validate(s);
    EvolveOptions opts;
    opts.workers = worker_count();
    std::ofstream log(fs::path(out) / "progress.log", std::ios::binary);
    opts.progress = &log;
    const ParetoFront front =
        evolve(make_loop_evaluator(s.plant, cfg.split.chi, s.approx, s.sim), s.ga, opts);
    {
        std::ofstream f(front_path(out, cfg.split.chi), std::ios::binary);
        write_front_csv(cfg.split.chi, front, f);
    }
    write_json(fs::path(out) / "manifest.json", make_manifest("tune", cfg));
    if (!quiet) {
        std::cout << fmt::format("chi = {}: {} front points\n", cfg.split.chi, front.size());
    }
    if (front.empty()) {
        throw RuntimeFailure(fmt::format("chi = {}: every candidate diverged, front is empty", cfg.split.chi));
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out) {
    require_out_dir(out);
    const SweepResult result = run_sweep(cfg.sweep, worker_count());
    write_sweep_outputs(out, cfg, result);
    std::ifstream summary(fs::path(out) / "summary.txt");
    std::cout << summary.rdbuf();
    bool any = false;
    for (const auto& f : result.fronts) {
        any = any || !f.front.empty();
    }
    if (!any) {
        throw RuntimeFailure("every chi produced an empty front");
    }
    return 0;
}

int cmd_report(const std::string& in) {
    if (in.empty() || !fs::exists(fs::path(in) / "manifest.json")) {
        throw ConfigError("--in DIR must contain a sweep manifest.json");
    }
    write_report(in);
    std::ifstream summary(fs::path(in) / "summary.txt");
    std::cout << summary.rdbuf();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional-order [PI] control with a fractional Smith-like predictor"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FOPI_VERSION);

    auto* approx = app.add_subcommand("approx", "Oustaloup approximation of s^order");
    double order = 0.5;
    double wb = 1e-4;
    double wh = 1e2;
    int sections = 5;
    int grid = 200;
    approx->add_option("--order", order, "Fractional order in (-2, 2)")->required();
    approx->add_option("--wb", wb, "Lower band edge [rad/s]");
    approx->add_option("--wh", wh, "Upper band edge [rad/s]");
    approx->add_option("--sections", sections, "Sections N (2N+1 zero/pole pairs)");
    approx->add_option("--grid", grid, "Error-summary grid points");

    std::string config_path;
    std::string out_dir;
    std::optional<double> kp, ki, lambda, chi, dt;
    std::optional<std::string> topology;
    std::vector<std::string> overrides;
    const auto add_set = [&overrides](CLI::App* cmd) {
        cmd->add_option("--set", overrides, "Override any config key, e.g. --set ga.generations=5");
    };

    auto* sim = app.add_subcommand("simulate", "Simulate one closed loop");
    sim->add_option("--config", config_path, "Config file or run manifest");
    sim->add_option("--kp", kp, "Proportional gain");
    sim->add_option("--ki", ki, "Integral gain");
    sim->add_option("--lambda", lambda, "Controller order");
    sim->add_option("--chi", chi, "Predictor split order");
    sim->add_option("--dt", dt, "Step size [s]");
    sim->add_option("--topology", topology, "predictor | equivalent");
    sim->add_option("--out", out_dir, "Output directory")->required();
    add_set(sim);

    auto* tune = app.add_subcommand("tune", "Run the MO-GA for one chi");
    bool quiet = false;
    tune->add_option("--config", config_path, "Config file or run manifest");
    tune->add_option("--chi", chi, "Predictor split order");
    tune->add_option("--dt", dt, "Step size [s]");
    tune->add_option("--out", out_dir, "Output directory")->required();
    add_set(tune);
    tune->add_flag("--quiet", quiet);

    auto* sweep = app.add_subcommand("sweep", "Run the chi sweep");
    sweep->add_option("--config", config_path, "Config file or run manifest");
    sweep->add_option("--dt", dt, "Step size [s]");
    sweep->add_option("--out", out_dir, "Output directory")->required();
    add_set(sweep);

    auto* report = app.add_subcommand("report", "Regenerate summary and plot files of a sweep");
    std::string in_dir;
    report->add_option("--in", in_dir, "Sweep output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (approx->parsed()) {
            return cmd_approx(order, wb, wh, sections, grid);
        }
        if (report->parsed()) {
            return cmd_report(in_dir);
        }
        RunConfig cfg = base_config(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(fmt::format("--set expects KEY=VALUE (got '{}')", kv));
            }
            set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (kp) cfg.controller.k_p = *kp;
        if (ki) cfg.controller.k_i = *ki;
        if (lambda) cfg.controller.lambda = *lambda;
        if (chi) cfg.split.chi = *chi;
        if (dt) cfg.sweep.sim.dt = *dt;
        if (topology) cfg.sweep.sim.topology = topology_from_string(*topology);
        if (sim->parsed()) {
            return cmd_simulate(cfg, out_dir);
        }
        if (tune->parsed()) {
            return cmd_tune(cfg, out_dir, quiet);
        }
        return cmd_sweep(cfg, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const FitError& e) {
        std::cerr << "runtime failure: approximation: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return kRuntimeError;
    }
}
