#include "fopi/metrics.hpp"

#include <cmath>

namespace fopi {

namespace {

template <typename F>
double trapezoid(const Trajectory& traj, F&& integrand) {
    double acc = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double h = traj.t[k] - traj.t[k - 1];
        acc += 0.5 * h * (integrand(k - 1) + integrand(k));
    }
    return acc;
}

}  // namespace

Objectives penalty_objectives() { return {kPenaltyObjective, kPenaltyObjective, true}; }

double itae(const Trajectory& traj) {
    if (traj.diverged) {
        return kPenaltyObjective;
    }
    return trapezoid(traj, [&](std::size_t k) { return traj.t[k] * std::abs(traj.r[k] - traj.y[k]); });
}

double control_energy(const Trajectory& traj) {
    if (traj.diverged) {
        return kPenaltyObjective;
    }
    return trapezoid(traj, [&](std::size_t k) { return traj.u[k] * traj.u[k]; });
}

Objectives evaluate_objectives(const Trajectory& traj) {
    if (traj.diverged) {
        return penalty_objectives();
    }
    const Objectives obj{itae(traj), control_energy(traj), false};
    if (!std::isfinite(obj.j1_itae) || !std::isfinite(obj.j2_energy)) {
        return penalty_objectives();
    }
    return obj;
}

}  // namespace fopi
