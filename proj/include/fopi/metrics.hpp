#pragma once

#include "fopi/sim_engine.hpp"

namespace fopi {

/// Objective pair for a simulated loop. Diverged runs carry the penalty pair.
struct Objectives {
    double j1_itae = 0.0;
    double j2_energy = 0.0;
    bool penalized = false;
};

inline constexpr double kPenaltyObjective = 1e12;

Objectives penalty_objectives();

/// Trapezoidal integral of t*|r - y| over the whole run; t is absolute
/// simulation time. A diverged trajectory yields the penalty value.
double itae(const Trajectory& traj);

/// Trapezoidal integral of u^2 over the whole run. A diverged trajectory
/// yields the penalty value.
double control_energy(const Trajectory& traj);

Objectives evaluate_objectives(const Trajectory& traj);

/// Reports show J1 divided by one hundred; optimization uses raw values.
inline double display_j1(double j1) { return j1 / 100.0; }

}  // namespace fopi
