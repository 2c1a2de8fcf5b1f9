#include "fopi/io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <sstream>

namespace fopi {

namespace {

constexpr const char* kFrontHeader = "chi,k_p,k_i,lambda,J1,J2,J1_display";

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    return out;
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Scatter of the Pareto fronts per chi (J1 shown divided by 100) and the
responses of the representative points. Run from this directory."""
import csv
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def main():
    region = {}
    with open(os.path.join(HERE, "region.txt")) as fh:
        for line in fh:
            key, value = line.split("=")
            region[key.strip()] = float(value)

    fig, (ax_all, ax_zoom) = plt.subplots(1, 2, figsize=(12, 5))
    for path in sorted(glob.glob(os.path.join(HERE, "front_chi_*.dat"))):
        chi = os.path.basename(path)[len("front_chi_"):-len(".dat")]
        rows = [line.split() for line in open(path) if not line.startswith("#")]
        if not rows:
            continue
        j1 = [float(r[0]) for r in rows]
        j2 = [float(r[1]) for r in rows]
        inside = [r[2] == "1" for r in rows]
        ax_all.scatter(j1, j2, s=12, label=f"chi={chi}")
        ax_zoom.scatter([a for a, k in zip(j1, inside) if k], [b for b, k in zip(j2, inside) if k],
                        s=16, label=f"chi={chi}")
    x0, x1 = region["j1_lo"] / 100.0, region["j1_hi"] / 100.0
    y0, y1 = region["j2_lo"], region["j2_hi"]
    ax_all.plot([x0, x1, x1, x0, x0], [y0, y0, y1, y1, y0], "k:")
    for ax, title in ((ax_all, "Pareto fronts"), (ax_zoom, "Trade-off region")):
        ax.set_xlabel("J1 / 100")
        ax.set_ylabel("J2")
        ax.set_title(title)
        ax.legend(fontsize=7)
    ax_all.set_xscale("log")
    ax_all.set_yscale("log")
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "fronts.png"), dpi=150)

    trajs = sorted(glob.glob(os.path.join(ROOT, "traj_chi_*.csv")))
    if trajs:
        fig, (ax_y, ax_u) = plt.subplots(2, 1, figsize=(10, 7), sharex=True)
        for path in trajs:
            chi = os.path.basename(path)[len("traj_chi_"):-len(".csv")]
            rows = read_rows(path)
            t = [float(r["t"]) for r in rows]
            ax_y.plot(t, [float(r["y"]) for r in rows], label=f"chi={chi}")
            ax_u.plot(t, [float(r["u"]) for r in rows], label=f"chi={chi}")
        ax_y.set_ylabel("y")
        ax_u.set_ylabel("u")
        ax_u.set_xlabel("t [s]")
        ax_y.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(os.path.join(HERE, "responses.png"), dpi=150)


if __name__ == "__main__":
    main()
)PY";

}  // namespace

std::string chi_label(double chi) { return fmt::format("{:g}", chi); }

fs::path front_path(const fs::path& dir, double chi) {
    return dir / fmt::format("front_chi_{}.csv", chi_label(chi));
}

fs::path trajectory_path(const fs::path& dir, double chi) {
    return dir / fmt::format("traj_chi_{}.csv", chi_label(chi));
}

void write_front_csv(double chi, const ParetoFront& front, std::ostream& out) {
    out << kFrontHeader << '\n';
    for (const auto& r : front.records) {
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", chi, r.genes.at(0),
                           r.genes.at(1), r.genes.at(2), r.j1, r.j2, display_j1(r.j1));
    }
}

ChiFront read_front_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
    }
    std::string line;
    std::getline(in, line);
    if (line != kFrontHeader) {
        throw std::runtime_error(fmt::format("'{}': unexpected header", path.string()));
    }
    ChiFront f;
    f.chi = std::numeric_limits<double>::quiet_NaN();
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            v.push_back(std::stod(cell));
        }
        if (v.size() != 7) {
            throw std::runtime_error(fmt::format("'{}': malformed row '{}'", path.string(), line));
        }
        f.chi = v[0];
        f.front.records.push_back({{v[1], v[2], v[3]}, v[4], v[5]});
    }
    return f;
}

nlohmann::ordered_json make_manifest(const std::string& command, const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["tool"] = "fopi";
    j["version"] = FOPI_VERSION;
    j["command"] = command;
    j["seeds"] = {{"ga.seed", cfg.sweep.ga.rng_seed}};
    j["config"] = config_to_json(cfg);
    return j;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

std::optional<FrontRecord> representative_point(const ChiFront& f) {
    const auto& recs = f.region_front.records;
    if (recs.empty()) {
        return std::nullopt;
    }
    double lo1 = recs.front().j1, hi1 = lo1, lo2 = recs.front().j2, hi2 = lo2;
    for (const auto& r : recs) {
        lo1 = std::min(lo1, r.j1);
        hi1 = std::max(hi1, r.j1);
        lo2 = std::min(lo2, r.j2);
        hi2 = std::max(hi2, r.j2);
    }
    const auto norm = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
    const FrontRecord* best = nullptr;
    double best_score = 0.0;
    for (const auto& r : recs) {
        const double a = norm(r.j1, lo1, hi1);
        const double b = norm(r.j2, lo2, hi2);
        const double score = a * a + b * b;
        if (!best || score < best_score) {
            best = &r;
            best_score = score;
        }
    }
    return *best;
}

void write_sweep_outputs(const fs::path& dir, const RunConfig& cfg, const SweepResult& result) {
    fs::create_directories(dir);
    write_json(dir / "manifest.json", make_manifest("sweep", cfg));
    for (const auto& f : result.fronts) {
        auto out = open_out(front_path(dir, f.chi));
        write_front_csv(f.chi, f.front, out);
    }
    const auto& s = cfg.sweep;
    for (const auto& f : result.fronts) {
        const auto pick = representative_point(f);
        if (!pick) {
            continue;
        }
        LoopModel loop = build_loop(s.plant, FracPI{pick->genes[0], pick->genes[1], pick->genes[2]},
                                    PredictorSplit{f.chi}, s.approx, s.sim.topology);
        auto out = open_out(trajectory_path(dir, f.chi));
        write_trajectory_csv(simulate(loop, s.sim), out);
    }
    write_report(dir);
}

SweepResult write_report(const fs::path& dir) {
    const RunConfig cfg = load_config(dir / "manifest.json");
    const auto& s = cfg.sweep;
    std::vector<ChiFront> fronts;
    for (double chi : s.chi_values) {
        ChiFront f = read_front_csv(front_path(dir, chi));
        f.chi = chi;
        fronts.push_back(std::move(f));
    }
    const SweepResult result = summarize(std::move(fronts), s.region, s.split_at);
    const auto& cmp = result.comparison;

    std::string csv = "scope,chi,front_points,region_points,hypervolume,dominating_pairs\n";
    for (const auto& f : result.fronts) {
        std::string hv;
        if (cmp.sufficient && !f.region_front.empty()) {
            hv = fmt::format("{:.17g}", hypervolume(f.region_front.points(), cmp.reference));
        }
        csv += fmt::format("chi,{},{},{},{},\n", chi_label(f.chi), f.front.size(), f.region_front.size(), hv);
    }
    if (cmp.sufficient) {
        csv += fmt::format("pool_le,{},,{},{:.17g},{}\n", chi_label(cmp.split_at), cmp.low_front.size(),
                           cmp.hv_low, cmp.low_dominates);
        csv += fmt::format("pool_gt,{},,{},{:.17g},{}\n", chi_label(cmp.split_at), cmp.high_front.size(),
                           cmp.hv_high, cmp.high_dominates);
    }
    write_text(dir / "summary.csv", csv);

    std::string txt;
    txt += fmt::format("region ({}): J1 in [{:.6g}, {:.6g}] (display [{:.6g}, {:.6g}]), J2 in [{:.6g}, {:.6g}]\n",
                       result.region_auto ? "auto, below cross-chi medians" : "configured",
                       result.region.j1_lo, result.region.j1_hi, display_j1(result.region.j1_lo),
                       display_j1(result.region.j1_hi), result.region.j2_lo, result.region.j2_hi);
    for (const auto& f : result.fronts) {
        txt += fmt::format("chi = {:<4} front {:3}  region {:3}{}\n", chi_label(f.chi), f.front.size(),
                           f.region_front.size(), f.all_diverged ? "  (every candidate diverged)" : "");
    }
    if (cmp.sufficient) {
        txt += fmt::format("reference point: ({:.6g}, {:.6g})\n", cmp.reference[0], cmp.reference[1]);
        txt += fmt::format("chi <= {}: {} pooled front points, hypervolume {:.6g}, dominates {} pairs\n",
                           chi_label(cmp.split_at), cmp.low_front.size(), cmp.hv_low, cmp.low_dominates);
        txt += fmt::format("chi >  {}: {} pooled front points, hypervolume {:.6g}, dominates {} pairs\n",
                           chi_label(cmp.split_at), cmp.high_front.size(), cmp.hv_high, cmp.high_dominates);
        txt += fmt::format("larger hypervolume: {}\n",
                           cmp.hv_low >= cmp.hv_high ? fmt::format("chi <= {}", chi_label(cmp.split_at))
                                                     : fmt::format("chi > {}", chi_label(cmp.split_at)));
    } else {
        txt += "insufficient data: one side of the chi split has no points in the region\n";
    }
    write_text(dir / "summary.txt", txt);

    const fs::path plot = dir / "plot";
    for (const auto& f : result.fronts) {
        std::string dat = "# J1_display J2 in_region\n";
        for (const auto& r : f.front.records) {
            dat += fmt::format("{:.17g} {:.17g} {}\n", display_j1(r.j1), r.j2,
                               result.region.contains(r.j1, r.j2) ? 1 : 0);
        }
        write_text(plot / fmt::format("front_chi_{}.dat", chi_label(f.chi)), dat);
    }
    write_text(plot / "region.txt",
               fmt::format("j1_lo = {:.17g}\nj1_hi = {:.17g}\nj2_lo = {:.17g}\nj2_hi = {:.17g}\n",
                           result.region.j1_lo, result.region.j1_hi, result.region.j2_lo, result.region.j2_hi));
    write_text(plot / "plot_results.py", kPlotScript);
    return result;
}

}  // namespace fopi
