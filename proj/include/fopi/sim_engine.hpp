#pragma once

#include "fopi/frac_tf.hpp"
#include "fopi/state_space.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fopi {

enum class Topology {
    predictor,   ///< controller, plant and the two predictor blocks wired separately
    equivalent,  ///< single equivalent controller G_ec in a unity feedback loop
};

const char* to_string(Topology t);
Topology topology_from_string(const std::string& s);

struct SimConfig {
    double dt = 0.01;
    double horizon = 1000.0;
    double setpoint_time = 5.0;
    double setpoint_amp = 1.0;
    double disturbance_time = 500.0;
    double disturbance_amp = 5.0;
    Topology topology = Topology::predictor;
};

void validate(const SimConfig& sim);

struct Trajectory {
    std::vector<double> t;
    std::vector<double> r;
    std::vector<double> d;
    std::vector<double> u;
    std::vector<double> y;
    std::vector<double> e;
    bool diverged = false;

    std::size_t size() const noexcept { return t.size(); }
};

/// Rational stand-ins for the four blocks of the predictor structure.
struct LoopBlocks {
    FactoredTF controller;  ///< (k_p + k_i/s)^lambda
    FactoredTF plant;       ///< K/(Ts+1)^n
    FactoredTF pred_easy;   ///< K/(Ts+1)^chi
    FactoredTF pred_hard;   ///< 1/(Ts+1)^(n-chi)
};

/// Closed loop with inputs [r, d] and outputs [u, y].
struct LoopModel {
    StateSpaceModel system;
    Topology topology = Topology::predictor;
    std::vector<Eigen::Index> block_orders;

    Eigen::Index states() const noexcept { return system.states(); }
};

LoopBlocks approximate_blocks(const HighOrderPlant& plant, const FracPI& ctrl,
                              const PredictorSplit& split, const ApproxConfig& cfg);

LoopModel build_loop(const HighOrderPlant& plant, const FracPI& ctrl, const PredictorSplit& split,
                     const ApproxConfig& cfg, Topology topology);

/// Controller input is r - y - G_p1 (1 - G_p2) u; the disturbance enters at
/// the plant input only.
LoopModel build_loop(const LoopBlocks& blocks, Topology topology);

/// u = C (r - y), y = G (u + d).
LoopModel build_unity_feedback(const FactoredTF& controller, const FactoredTF& plant);

/// u = r, y = G (u + d).
LoopModel build_open_loop(const FactoredTF& plant);

/// Fixed-step classical RK4 from a zero initial state with step inputs held
/// constant over each step. Stops early and flags divergence once |y| or |u|
/// exceeds 1e6 * max(1, |setpoint_amp|).
Trajectory simulate(LoopModel& loop, const SimConfig& sim);

/// K (1 - e^(-t/T) sum_{k<n} (t/T)^k / k!) for integer n >= 1.
double analytic_step_oracle(double K, double T, double n, double t);

/// Header t,r,d,u,y,e; 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace fopi
