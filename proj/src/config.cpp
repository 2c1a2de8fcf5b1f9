#include "fopi/config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>
#include <functional>
#include <sstream>

namespace fopi {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(strip(item));
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) {
        throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
    }
    return x;
}

long long to_integer(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) {
        throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, v));
    }
    return static_cast<long long>(x);
}

std::vector<double> to_doubles(const std::string& key, const std::string& v, std::size_t expect = 0) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) {
        out.push_back(to_double(key, item));
    }
    if (expect != 0 && out.size() != expect) {
        throw ConfigError(fmt::format("{}: expected {} comma-separated numbers", key, expect));
    }
    if (out.empty()) {
        throw ConfigError(fmt::format("{}: empty list", key));
    }
    return out;
}

struct Binding {
    std::string key;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

Binding number(const std::string& key, double& ref) {
    return {key, [&ref, key](const std::string& v) { ref = to_double(key, v); },
            [&ref] { return fmt::format("{}", ref); }};
}

template <typename Int>
Binding integer(const std::string& key, Int& ref) {
    return {key, [&ref, key](const std::string& v) { ref = static_cast<Int>(to_integer(key, v)); },
            [&ref] { return fmt::format("{}", ref); }};
}

Binding bounds(const std::string& key, GeneBounds& ref) {
    return {key,
            [&ref, key](const std::string& v) {
                const auto b = to_doubles(key, v, 2);
                ref = {b[0], b[1]};
            },
            [&ref] { return fmt::format("{}, {}", ref.lo, ref.hi); }};
}

std::vector<Binding> bindings(RunConfig& c) {
    auto& s = c.sweep;
    if (s.ga.bounds.size() != 3) {
        s.ga.bounds.resize(3);
    }
    return {
        number("plant.K", s.plant.K),
        number("plant.T", s.plant.T),
        number("plant.n", s.plant.n),
        number("controller.k_p", c.controller.k_p),
        number("controller.k_i", c.controller.k_i),
        number("controller.lambda", c.controller.lambda),
        number("predictor.chi", c.split.chi),
        {"sweep.chi", [&s](const std::string& v) { s.chi_values = to_doubles("sweep.chi", v); },
         [&s] { return fmt::format("{}", fmt::join(s.chi_values, ", ")); }},
        {"sweep.region",
         [&s](const std::string& v) {
             if (v == "auto") {
                 s.region.reset();
             } else {
                 const auto b = to_doubles("sweep.region", v, 4);
                 s.region = Region{b[0], b[1], b[2], b[3]};
             }
         },
         [&s] {
             return s.region ? fmt::format("{}, {}, {}, {}", s.region->j1_lo, s.region->j1_hi,
                                           s.region->j2_lo, s.region->j2_hi)
                             : std::string("auto");
         }},
        number("sweep.split_at", s.split_at),
        integer("ga.pop_size", s.ga.pop_size),
        integer("ga.generations", s.ga.generations),
        number("ga.crossover_prob", s.ga.crossover_prob),
        number("ga.mutation_prob", s.ga.mutation_prob),
        number("ga.pareto_fraction", s.ga.pareto_fraction),
        integer("ga.seed", s.ga.rng_seed),
        number("ga.eta_crossover", s.ga.eta_crossover),
        number("ga.eta_mutation", s.ga.eta_mutation),
        bounds("ga.bounds.k_p", s.ga.bounds[0]),
        bounds("ga.bounds.k_i", s.ga.bounds[1]),
        bounds("ga.bounds.lambda", s.ga.bounds[2]),
        number("sim.dt", s.sim.dt),
        number("sim.horizon", s.sim.horizon),
        number("sim.setpoint_time", s.sim.setpoint_time),
        number("sim.setpoint_amp", s.sim.setpoint_amp),
        number("sim.disturbance_time", s.sim.disturbance_time),
        number("sim.disturbance_amp", s.sim.disturbance_amp),
        {"sim.topology", [&s](const std::string& v) {
             try {
                 s.sim.topology = topology_from_string(v);
             } catch (const std::invalid_argument& e) {
                 throw ConfigError(e.what());
             }
         },
         [&s] { return std::string(to_string(s.sim.topology)); }},
        number("approx.omega_low", s.approx.omega_low),
        number("approx.omega_high", s.approx.omega_high),
        integer("approx.sections", s.approx.n_sections),
        integer("approx.grid_points", s.approx.fit_grid_points),
        number("approx.fit_error_ceiling", s.approx.fit_error_ceiling),
    };
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (auto& b : bindings(cfg)) {
        if (b.key == key) {
            b.set(value);
            return;
        }
    }
    throw ConfigError(fmt::format("unknown config key '{}'", key));
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    assign(cfg, strip(key), strip(value));
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
        }
        assign(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
        }
        return config_from_json(j.contains("config") ? j.at("config") : j);
    }
    return parse_config_text(text);
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    RunConfig copy = cfg;
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (auto& b : bindings(copy)) {
        j[b.key] = b.get();
    }
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
            assign(cfg, key, value.get<std::string>());
        } else {
            assign(cfg, key, value.dump());
        }
    }
    return cfg;
}

std::string config_to_text(const RunConfig& cfg) {
    RunConfig copy = cfg;
    std::string out;
    for (auto& b : bindings(copy)) {
        out += fmt::format("{} = {}\n", b.key, b.get());
    }
    return out;
}

}  // namespace fopi
