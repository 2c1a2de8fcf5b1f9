#include "fopi/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace fopi::poly {

std::size_t degree(std::span<const double> p) {
    std::size_t lead = 0;
    while (lead + 1 < p.size() && p[lead] == 0.0) {
        ++lead;
    }
    return p.empty() ? 0 : p.size() - 1 - lead;
}

Complex eval(std::span<const double> p, Complex s) {
    Complex acc{0.0, 0.0};
    for (double c : p) {
        acc = acc * s + c;
    }
    return acc;
}

double eval(std::span<const double> p, double s) {
    double acc = 0.0;
    for (double c : p) {
        acc = acc * s + c;
    }
    return acc;
}

std::vector<double> mul(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        return {};
    }
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

std::vector<double> add(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(std::max(a.size(), b.size()), 0.0);
    const std::size_t oa = out.size() - a.size();
    const std::size_t ob = out.size() - b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[oa + i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        out[ob + i] += b[i];
    }
    return out;
}

std::vector<double> scale(std::span<const double> p, double k) {
    std::vector<double> out(p.begin(), p.end());
    for (double& c : out) {
        c *= k;
    }
    return out;
}

std::vector<double> trim(std::span<const double> p) {
    std::size_t lead = 0;
    while (lead + 1 < p.size() && p[lead] == 0.0) {
        ++lead;
    }
    return {p.begin() + static_cast<std::ptrdiff_t>(lead), p.end()};
}

std::vector<double> from_roots(std::span<const Complex> roots) {
    std::vector<Complex> acc{Complex{1.0, 0.0}};
    for (const Complex& r : roots) {
        std::vector<Complex> next(acc.size() + 1, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < acc.size(); ++i) {
            next[i] += acc[i];
            next[i + 1] -= acc[i] * r;
        }
        acc = std::move(next);
    }
    std::vector<double> out(acc.size());
    std::transform(acc.begin(), acc.end(), out.begin(), [](Complex c) { return c.real(); });
    return out;
}

std::vector<Complex> roots(std::span<const double> p) {
    const auto q = trim(p);
    const std::size_t n = q.size() - 1;
    if (n == 0) {
        return {};
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        companion(0, static_cast<Eigen::Index>(j)) = -q[j + 1] / q[0];
    }
    for (std::size_t i = 1; i < n; ++i) {
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> binomial_power(double a, double b, unsigned n) {
    std::vector<double> out{1.0};
    const std::vector<double> factor{a, b};
    for (unsigned i = 0; i < n; ++i) {
        out = mul(out, factor);
    }
    return out;
}

}  // namespace fopi::poly
