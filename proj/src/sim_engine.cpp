#include "fopi/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>
#include <stdexcept>

namespace fopi {

namespace {

// Linear interconnection of SISO blocks. Block inputs are S*o + E*ext and the
// loop outputs are P*o + Q*ext, where o stacks the block outputs and
// ext = [r, d]. Direct feedthrough is resolved by solving the algebraic loop.
StateSpaceModel interconnect(const std::vector<StateSpaceModel>& blocks, const Eigen::MatrixXd& S,
                             const Eigen::MatrixXd& E, const Eigen::MatrixXd& P,
                             const Eigen::MatrixXd& Q) {
    const auto nblk = static_cast<Eigen::Index>(blocks.size());
    Eigen::Index nx = 0;
    for (const auto& b : blocks) {
        nx += b.states();
    }
    Eigen::MatrixXd Ablk = Eigen::MatrixXd::Zero(nx, nx);
    Eigen::MatrixXd Bblk = Eigen::MatrixXd::Zero(nx, nblk);
    Eigen::MatrixXd Cblk = Eigen::MatrixXd::Zero(nblk, nx);
    Eigen::MatrixXd Dblk = Eigen::MatrixXd::Zero(nblk, nblk);
    Eigen::Index off = 0;
    for (Eigen::Index i = 0; i < nblk; ++i) {
        const auto& b = blocks[static_cast<std::size_t>(i)];
        const Eigen::Index n = b.states();
        Ablk.block(off, off, n, n) = b.A;
        Bblk.block(off, i, n, 1) = b.B;
        Cblk.block(i, off, 1, n) = b.C;
        Dblk(i, i) = b.D(0, 0);
        off += n;
    }
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(nblk, nblk) - Dblk * S;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) {
        throw std::invalid_argument("interconnection has a singular algebraic loop");
    }
    const Eigen::MatrixXd Ox = lu.solve(Cblk);
    const Eigen::MatrixXd Oe = lu.solve(Dblk * E);
    return {Ablk + Bblk * S * Ox, Bblk * (S * Oe + E), P * Ox, P * Oe + Q};
}

LoopModel make_loop(std::vector<StateSpaceModel> blocks, const Eigen::MatrixXd& S,
                    const Eigen::MatrixXd& E, const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                    Topology topology) {
    LoopModel loop;
    loop.topology = topology;
    for (const auto& b : blocks) {
        loop.block_orders.push_back(b.states());
    }
    loop.system = interconnect(blocks, S, E, P, Q);
    return loop;
}

}  // namespace

const char* to_string(Topology t) {
    return t == Topology::predictor ? "predictor" : "equivalent";
}

Topology topology_from_string(const std::string& s) {
    if (s == "predictor" || s == "fig1") {
        return Topology::predictor;
    }
    if (s == "equivalent" || s == "fig3") {
        return Topology::equivalent;
    }
    throw std::invalid_argument(fmt::format("unknown topology '{}'", s));
}

void validate(const SimConfig& sim) {
    if (!(sim.dt > 0.0) || !(sim.horizon >= sim.disturbance_time) ||
        !(sim.disturbance_time > sim.setpoint_time) || !(sim.setpoint_time >= 0.0)) {
        throw std::invalid_argument(fmt::format(
            "invalid simulation config: need dt > 0 and horizon >= disturbance_time > "
            "setpoint_time >= 0 (dt={}, horizon={}, setpoint at {}, disturbance at {})",
            sim.dt, sim.horizon, sim.setpoint_time, sim.disturbance_time));
    }
}

LoopBlocks approximate_blocks(const HighOrderPlant& plant, const FracPI& ctrl,
                              const PredictorSplit& split, const ApproxConfig& cfg) {
    validate(plant);
    validate(ctrl);
    validate(split, plant);
    validate(cfg);
    return {approx_frac_pi(ctrl, cfg), approx_lag(plant.K, plant.T, plant.n, cfg),
            approx_lag(plant.K, plant.T, split.chi, cfg),
            approx_lag(1.0, plant.T, plant.n - split.chi, cfg)};
}

LoopModel build_loop(const HighOrderPlant& plant, const FracPI& ctrl, const PredictorSplit& split,
                     const ApproxConfig& cfg, Topology topology) {
    return build_loop(approximate_blocks(plant, ctrl, split, cfg), topology);
}

LoopModel build_loop(const LoopBlocks& blocks, Topology topology) {
    const Eigen::MatrixXd P2 = (Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished();
    if (topology == Topology::predictor) {
        // o = [u, y, w1 = G_p1 u, w2 = G_p2 w1]
        Eigen::MatrixXd S(4, 4);
        S << 0, -1, -1, 1,
             1, 0, 0, 0,
             1, 0, 0, 0,
             0, 0, 1, 0;
        Eigen::MatrixXd E(4, 2);
        E << 1, 0,
             0, 1,
             0, 0,
             0, 0;
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2, 4);
        P(0, 0) = 1.0;
        P(1, 1) = 1.0;
        return make_loop({realize(blocks.controller), realize(blocks.plant), realize(blocks.pred_easy),
                          realize(blocks.pred_hard)},
                         S, E, P, Eigen::MatrixXd::Zero(2, 2), topology);
    }

    // G_ec = G_c / (1 + G_c G_p1 (1 - G_p2))
    const StateSpaceModel inner =
        ss_series(realize(blocks.pred_easy),
                  ss_parallel(StateSpaceModel::gain(1.0), realize(blocks.pred_hard), -1.0));
    const StateSpaceModel equivalent = ss_feedback(realize(blocks.controller), inner);
    Eigen::MatrixXd S(2, 2);
    S << 0, -1,
         1, 0;
    Eigen::MatrixXd E(2, 2);
    E << 1, 0,
         0, 1;
    return make_loop({equivalent, realize(blocks.plant)}, S, E, P2, Eigen::MatrixXd::Zero(2, 2),
                     topology);
}

LoopModel build_unity_feedback(const FactoredTF& controller, const FactoredTF& plant) {
    Eigen::MatrixXd S(2, 2);
    S << 0, -1,
         1, 0;
    Eigen::MatrixXd E(2, 2);
    E << 1, 0,
         0, 1;
    return make_loop({realize(controller), realize(plant)}, S, E, Eigen::MatrixXd::Identity(2, 2),
                     Eigen::MatrixXd::Zero(2, 2), Topology::equivalent);
}

LoopModel build_open_loop(const FactoredTF& plant) {
    const Eigen::MatrixXd S = Eigen::MatrixXd::Zero(1, 1);
    const Eigen::MatrixXd E = (Eigen::MatrixXd(1, 2) << 1, 1).finished();
    const Eigen::MatrixXd P = (Eigen::MatrixXd(2, 1) << 0, 1).finished();
    const Eigen::MatrixXd Q = (Eigen::MatrixXd(2, 2) << 1, 0, 0, 0).finished();
    return make_loop({realize(plant)}, S, E, P, Q, Topology::equivalent);
}

Trajectory simulate(LoopModel& loop, const SimConfig& sim) {
    validate(sim);
    auto& sys = loop.system;
    const Eigen::Index n = sys.states();
    const double h = sim.dt;

    // Classical RK4 applied to x' = A x + B v with v held over the step reduces
    // to x+ = Phi x + Gamma v.
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd hA = h * sys.A;
    const Eigen::MatrixXd hA2 = hA * hA;
    const Eigen::MatrixXd hA3 = hA2 * hA;
    const Eigen::MatrixXd Phi = I + hA + hA2 / 2.0 + hA3 / 6.0 + hA3 * hA / 24.0;
    const Eigen::MatrixXd Gamma = h * (I + hA / 2.0 + hA2 / 6.0 + hA3 / 24.0) * sys.B;

    const auto steps = static_cast<std::size_t>(std::floor(sim.horizon / h + 1e-9));
    const auto first_index = [h](double t0) {
        return static_cast<std::size_t>(std::max(0.0, std::ceil(t0 / h - 1e-9)));
    };
    const std::size_t k_set = first_index(sim.setpoint_time);
    const std::size_t k_dist = first_index(sim.disturbance_time);
    const double bound = 1e6 * std::max(1.0, std::abs(sim.setpoint_amp));

    Trajectory traj;
    for (auto* v : {&traj.t, &traj.r, &traj.d, &traj.u, &traj.y, &traj.e}) {
        v->reserve(steps + 1);
    }
    sys.state = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd next(n);
    Eigen::Vector2d ext;
    for (std::size_t k = 0; k <= steps; ++k) {
        ext(0) = k >= k_set ? sim.setpoint_amp : 0.0;
        ext(1) = k >= k_dist ? sim.disturbance_amp : 0.0;
        const Eigen::Vector2d out = sys.C * sys.state + sys.D * ext;
        const double u = out(0);
        const double y = out(1);
        traj.t.push_back(static_cast<double>(k) * h);
        traj.r.push_back(ext(0));
        traj.d.push_back(ext(1));
        traj.u.push_back(u);
        traj.y.push_back(y);
        traj.e.push_back(ext(0) - y);
        if (!(std::abs(u) <= bound) || !(std::abs(y) <= bound)) {
            traj.diverged = true;
            break;
        }
        next.noalias() = Phi * sys.state;
        next.noalias() += Gamma * ext;
        sys.state.swap(next);
    }
    return traj;
}

double analytic_step_oracle(double K, double T, double n, double t) {
    if (!(n >= 1.0) || n != std::floor(n)) {
        throw std::invalid_argument(fmt::format("analytic_step_oracle: order must be a positive integer (got {})", n));
    }
    if (!(T > 0.0) || !(t >= 0.0)) {
        throw std::invalid_argument("analytic_step_oracle: need T > 0 and t >= 0");
    }
    if (std::isinf(t)) {
        return K;
    }
    const double x = t / T;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < static_cast<int>(n); ++k) {
        term *= x / k;
        sum += term;
    }
    return K * (1.0 - std::exp(-x) * sum);
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,r,d,u,y,e\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", traj.t[k], traj.r[k],
                           traj.d[k], traj.u[k], traj.y[k], traj.e[k]);
    }
}

}  // namespace fopi
