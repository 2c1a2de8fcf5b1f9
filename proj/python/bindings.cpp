#include "fopi/config.hpp"
#include "fopi/experiment.hpp"
#include "fopi/io.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace fopi;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict trajectory_dict(const Trajectory& tr) {
    py::dict d;
    d["t"] = as_array(tr.t);
    d["r"] = as_array(tr.r);
    d["d"] = as_array(tr.d);
    d["u"] = as_array(tr.u);
    d["y"] = as_array(tr.y);
    d["e"] = as_array(tr.e);
    d["diverged"] = tr.diverged;
    return d;
}

ApproxConfig approx_config(double omega_low, double omega_high, int sections, int grid_points, double ceiling) {
    ApproxConfig cfg;
    cfg.omega_low = omega_low;
    cfg.omega_high = omega_high;
    cfg.n_sections = sections;
    cfg.fit_grid_points = grid_points;
    cfg.fit_error_ceiling = ceiling;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fractional-order PI control with a fractional Smith-like predictor";
    m.attr("__version__") = FOPI_VERSION;

    py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<FracPI>(m, "FracPI")
        .def(py::init([](double k_p, double k_i, double lambda_) { return FracPI{k_p, k_i, lambda_}; }),
             py::arg("k_p") = 1.0, py::arg("k_i") = 0.1, py::arg("lambda_") = 1.0)
        .def_readwrite("k_p", &FracPI::k_p)
        .def_readwrite("k_i", &FracPI::k_i)
        .def_readwrite("lambda_", &FracPI::lambda);

    py::class_<HighOrderPlant>(m, "HighOrderPlant")
        .def(py::init([](double K, double T, double n) { return HighOrderPlant{K, T, n}; }), py::arg("K") = 1.0,
             py::arg("T") = 20.0, py::arg("n") = 4.0)
        .def_readwrite("K", &HighOrderPlant::K)
        .def_readwrite("T", &HighOrderPlant::T)
        .def_readwrite("n", &HighOrderPlant::n);

    py::class_<ApproxConfig>(m, "ApproxConfig")
        .def(py::init(&approx_config), py::arg("omega_low") = 1e-4, py::arg("omega_high") = 1e2,
             py::arg("sections") = 5, py::arg("grid_points") = 200, py::arg("fit_error_ceiling") = 0.05)
        .def_readwrite("omega_low", &ApproxConfig::omega_low)
        .def_readwrite("omega_high", &ApproxConfig::omega_high)
        .def_readwrite("sections", &ApproxConfig::n_sections)
        .def_readwrite("grid_points", &ApproxConfig::fit_grid_points)
        .def_readwrite("fit_error_ceiling", &ApproxConfig::fit_error_ceiling);

    py::class_<RationalTF>(m, "RationalTF")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("num"), py::arg("den"))
        .def_property_readonly("num", &RationalTF::num)
        .def_property_readonly("den", &RationalTF::den)
        .def("order", &RationalTF::order)
        .def("freq_response", &RationalTF::freq_response, py::arg("omega"))
        .def("dc_gain", &RationalTF::dc_gain)
        .def("is_stable", &RationalTF::is_stable);

    py::class_<FactoredTF>(m, "FactoredTF")
        .def_property_readonly("factors", &FactoredTF::factors)
        .def("collapse", &FactoredTF::collapse)
        .def("order", &FactoredTF::order)
        .def("is_stable", &FactoredTF::is_stable)
        .def("freq_response", [](const FactoredTF& f, double w) { return f.eval(Complex{0.0, w}); },
             py::arg("omega"));

    m.def("oustaloup", &oustaloup_approx, py::arg("order"), py::arg("config") = ApproxConfig{},
          "Band-limited rational approximation of s^order.");
    m.def("approx_lag", &approx_lag, py::arg("K"), py::arg("T"), py::arg("order"),
          py::arg("config") = ApproxConfig{});
    m.def("approx_frac_pi", &approx_frac_pi, py::arg("controller"), py::arg("config") = ApproxConfig{});
    m.def("exact_lag_response", &exact_lag_response, py::arg("K"), py::arg("T"), py::arg("order"),
          py::arg("omega"));
    m.def("exact_frac_pi_response", &exact_frac_pi_response, py::arg("controller"), py::arg("omega"));

    m.def(
        "simulate",
        [](const HighOrderPlant& plant, const FracPI& ctrl, double chi, double dt, double horizon,
           const std::string& topology, const ApproxConfig& approx) {
            SimConfig sim;
            sim.dt = dt;
            sim.horizon = horizon;
            sim.topology = topology_from_string(topology);
            Trajectory tr;
            {
                py::gil_scoped_release release;
                LoopModel loop = build_loop(plant, ctrl, PredictorSplit{chi}, approx, sim.topology);
                tr = simulate(loop, sim);
            }
            py::dict out = trajectory_dict(tr);
            const Objectives obj = evaluate_objectives(tr);
            out["J1"] = obj.j1_itae;
            out["J2"] = obj.j2_energy;
            return out;
        },
        py::arg("plant") = HighOrderPlant{}, py::arg("controller") = FracPI{2.0, 0.08, 1.0}, py::arg("chi") = 1.0,
        py::arg("dt") = 0.01, py::arg("horizon") = 1000.0, py::arg("topology") = "predictor",
        py::arg("approx") = ApproxConfig{},
        "Simulates the predictor loop; returns the trajectory arrays and the objective pair.");

    m.def("analytic_step", &analytic_step_oracle, py::arg("K"), py::arg("T"), py::arg("n"), py::arg("t"));

    m.def(
        "non_dominated_sort",
        [](const std::vector<ObjectivePair>& pts) { return non_dominated_sort(pts); }, py::arg("points"));
    m.def(
        "hypervolume",
        [](const std::vector<ObjectivePair>& pts, const ObjectivePair& ref) { return hypervolume(pts, ref); },
        py::arg("points"), py::arg("reference"));

    m.def(
        "tune",
        [](double chi, int pop_size, int generations, std::uint64_t seed, double dt, double horizon,
           const ApproxConfig& approx, unsigned workers) {
            GAConfig ga;
            ga.pop_size = pop_size;
            ga.generations = generations;
            ga.rng_seed = seed;
            SimConfig sim;
            sim.dt = dt;
            sim.horizon = horizon;
            EvolveOptions opts;
            opts.workers = workers;
            ParetoFront front;
            {
                py::gil_scoped_release release;
                front = evolve(make_loop_evaluator(HighOrderPlant{}, chi, approx, sim), ga, opts);
            }
            py::list rows;
            for (const auto& r : front.records) {
                rows.append(py::dict(py::arg("k_p") = r.genes[0], py::arg("k_i") = r.genes[1],
                                     py::arg("lambda_") = r.genes[2], py::arg("J1") = r.j1, py::arg("J2") = r.j2));
            }
            return rows;
        },
        py::arg("chi") = 1.0, py::arg("pop_size") = 30, py::arg("generations") = 20, py::arg("seed") = 1,
        py::arg("dt") = 0.01, py::arg("horizon") = 1000.0, py::arg("approx") = ApproxConfig{},
        py::arg("workers") = 1, "Runs the MO-GA for one chi; returns the Pareto front rows sorted by J1.");

    m.def(
        "sweep",
        [](const std::string& config_path, const std::filesystem::path& out, unsigned workers) -> py::tuple {
            const RunConfig cfg = load_config(config_path);
            SweepResult result;
            {
                py::gil_scoped_release release;
                result = run_sweep(cfg.sweep, workers);
                write_sweep_outputs(out, cfg, result);
            }
            if (!result.comparison.sufficient) {
                return py::make_tuple(py::none(), py::none());
            }
            return py::make_tuple(py::float_(result.comparison.hv_low), py::float_(result.comparison.hv_high));
        },
        py::arg("config"), py::arg("out"), py::arg("workers") = 1,
        "Runs a chi sweep from a config file and writes the outputs; returns (hv_low, hv_high).");

    m.def(
        "report", [](const std::filesystem::path& dir) { write_report(dir); }, py::arg("directory"),
        "Regenerates summary and plot files from a sweep directory.");
}
