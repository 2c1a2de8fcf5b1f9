#include "fopi/state_space.hpp"

#include <cmath>
#include <stdexcept>

namespace fopi {

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
                                 Eigen::MatrixXd d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    if (A.rows() != A.cols() || B.rows() != A.rows() || C.cols() != A.rows() ||
        D.rows() != C.rows() || D.cols() != B.cols()) {
        throw std::invalid_argument("StateSpaceModel: inconsistent dimensions");
    }
    state = Eigen::VectorXd::Zero(A.rows());
}

StateSpaceModel StateSpaceModel::gain(double k) {
    return {Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 1), Eigen::MatrixXd(1, 0),
            Eigen::MatrixXd::Constant(1, 1, k)};
}

Complex StateSpaceModel::eval(Complex s) const {
    const Eigen::Index n = states();
    Complex d = D(0, 0);
    if (n == 0) {
        return d;
    }
    Eigen::MatrixXcd M = -A.cast<Complex>();
    M.diagonal().array() += s;
    const Eigen::VectorXcd x = M.partialPivLu().solve(B.col(0).cast<Complex>());
    return (C.row(0).cast<Complex>() * x)(0) + d;
}

double StateSpaceModel::dc_gain() const {
    if (states() == 0) {
        return D(0, 0);
    }
    const Eigen::VectorXd x = A.fullPivLu().solve(B.col(0));
    return -(C.row(0) * x)(0) + D(0, 0);
}

StateSpaceModel to_statespace(const RationalTF& tf) {
    const auto& den = tf.den();
    const std::size_t n = den.size() - 1;
    std::vector<double> num(den.size(), 0.0);
    std::copy(tf.num().begin(), tf.num().end(), num.end() - static_cast<std::ptrdiff_t>(tf.num().size()));

    const double a0 = den[0];
    const double d = num[0] / a0;
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, 1);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, N);
    for (std::size_t i = 1; i <= n; ++i) {
        const auto j = static_cast<Eigen::Index>(i - 1);
        A(0, j) = -den[i] / a0;
        C(0, j) = num[i] / a0 - d * den[i] / a0;
        if (j > 0) {
            A(j, j - 1) = 1.0;
        }
    }
    if (N > 0) {
        B(0, 0) = 1.0;
    }
    return {std::move(A), std::move(B), std::move(C), Eigen::MatrixXd::Constant(1, 1, d)};
}

StateSpaceModel realize(const RationalTF& tf) {
    const auto& pf = tf.partial_fractions();
    if (!pf) {
        return to_statespace(tf);
    }
    const auto N = static_cast<Eigen::Index>(pf->poles.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, 1);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, N);
    Eigen::Index i = 0;
    while (i < N) {
        const Complex p = pf->poles[static_cast<std::size_t>(i)];
        const Complex r = pf->residues[static_cast<std::size_t>(i)];
        if (p.imag() == 0.0) {
            A(i, i) = p.real();
            B(i, 0) = 1.0;
            C(0, i) = r.real();
            ++i;
        } else {
            A(i, i) = p.real();
            A(i, i + 1) = p.imag();
            A(i + 1, i) = -p.imag();
            A(i + 1, i + 1) = p.real();
            B(i, 0) = 1.0;
            C(0, i) = 2.0 * r.real();
            C(0, i + 1) = 2.0 * r.imag();
            i += 2;
        }
    }
    return {std::move(A), std::move(B), std::move(C), Eigen::MatrixXd::Constant(1, 1, pf->direct)};
}

StateSpaceModel realize(const FactoredTF& tf) {
    StateSpaceModel acc = StateSpaceModel::gain(1.0);
    bool first = true;
    for (const auto& f : tf.factors()) {
        if (first) {
            acc = realize(f);
            first = false;
        } else {
            acc = ss_series(acc, realize(f));
        }
    }
    return acc;
}

StateSpaceModel ss_series(const StateSpaceModel& a, const StateSpaceModel& b) {
    const Eigen::Index na = a.states();
    const Eigen::Index nb = b.states();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(na + nb, na + nb);
    A.topLeftCorner(na, na) = a.A;
    A.bottomLeftCorner(nb, na) = b.B * a.C;
    A.bottomRightCorner(nb, nb) = b.A;
    Eigen::MatrixXd B(na + nb, a.inputs());
    B.topRows(na) = a.B;
    B.bottomRows(nb) = b.B * a.D;
    Eigen::MatrixXd C(b.outputs(), na + nb);
    C.leftCols(na) = b.D * a.C;
    C.rightCols(nb) = b.C;
    return {std::move(A), std::move(B), std::move(C), b.D * a.D};
}

StateSpaceModel ss_parallel(const StateSpaceModel& a, const StateSpaceModel& b, double sign) {
    const Eigen::Index na = a.states();
    const Eigen::Index nb = b.states();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(na + nb, na + nb);
    A.topLeftCorner(na, na) = a.A;
    A.bottomRightCorner(nb, nb) = b.A;
    Eigen::MatrixXd B(na + nb, a.inputs());
    B.topRows(na) = a.B;
    B.bottomRows(nb) = b.B;
    Eigen::MatrixXd C(a.outputs(), na + nb);
    C.leftCols(na) = a.C;
    C.rightCols(nb) = sign * b.C;
    return {std::move(A), std::move(B), std::move(C), a.D + sign * b.D};
}

StateSpaceModel ss_feedback(const StateSpaceModel& a, const StateSpaceModel& b) {
    const Eigen::Index na = a.states();
    const Eigen::Index nb = b.states();
    const double da = a.D(0, 0);
    const double db = b.D(0, 0);
    const double ret = 1.0 + da * db;
    if (std::abs(ret) < 1e-12) {
        throw std::invalid_argument("ss_feedback: singular algebraic loop");
    }
    const double g = 1.0 / ret;

    // y = Ya x + Yu u
    Eigen::RowVectorXd Ya(na + nb);
    Ya.head(na) = g * a.C.row(0);
    Ya.tail(nb) = -g * da * b.C.row(0);
    const double Yu = g * da;
    // input of a: u - Cb xb - Db y
    Eigen::RowVectorXd Ua = -db * Ya;
    Ua.tail(nb) -= b.C.row(0);
    const double Uu = 1.0 - db * Yu;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(na + nb, na + nb);
    A.topLeftCorner(na, na) = a.A;
    A.bottomRightCorner(nb, nb) = b.A;
    A.topRows(na) += a.B.col(0) * Ua;
    A.bottomRows(nb) += b.B.col(0) * Ya;
    Eigen::MatrixXd B(na + nb, 1);
    B.topRows(na) = a.B * Uu;
    B.bottomRows(nb) = b.B * Yu;
    return {std::move(A), std::move(B), Eigen::MatrixXd(Ya), Eigen::MatrixXd::Constant(1, 1, Yu)};
}

}  // namespace fopi
