#pragma once

#include "fopi/rational_tf.hpp"

#include <Eigen/Dense>

namespace fopi {

/// Continuous-time LTI model x' = A x + B u, y = C x + D u.
struct StateSpaceModel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;
    Eigen::VectorXd state;

    StateSpaceModel() = default;
    StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d);

    static StateSpaceModel gain(double k);

    Eigen::Index states() const noexcept { return A.rows(); }
    Eigen::Index inputs() const noexcept { return D.cols(); }
    Eigen::Index outputs() const noexcept { return D.rows(); }

    /// C (sI - A)^-1 B + D for a SISO model.
    Complex eval(Complex s) const;
    Complex freq_response(double omega) const { return eval(Complex{0.0, omega}); }
    /// -C A^-1 B + D for a SISO model.
    double dc_gain() const;
};

/// Controllable canonical realization of a proper transfer function.
StateSpaceModel to_statespace(const RationalTF& tf);

/// Realization used for simulation: real modal form when the partial-fraction
/// expansion is known, controllable canonical form otherwise.
StateSpaceModel realize(const RationalTF& tf);

/// Series chain of the factors' realizations.
StateSpaceModel realize(const FactoredTF& tf);

/// SISO interconnections; b follows a in series.
StateSpaceModel ss_series(const StateSpaceModel& a, const StateSpaceModel& b);
/// a + sign*b
StateSpaceModel ss_parallel(const StateSpaceModel& a, const StateSpaceModel& b, double sign = 1.0);
/// a / (1 + a b), negative feedback through b. Throws if the algebraic loop is singular.
StateSpaceModel ss_feedback(const StateSpaceModel& a, const StateSpaceModel& b);

}  // namespace fopi
