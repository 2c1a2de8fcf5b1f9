#include "fopi/frac_tf.hpp"

#include "fopi/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <optional>

namespace fopi {

namespace {

constexpr double kOrderEps = 1e-12;

RationalTF scaled(const RationalTF& tf, double k) {
    if (tf.partial_fractions()) {
        PartialFractions pf = *tf.partial_fractions();
        for (auto& r : pf.residues) {
            r *= k;
        }
        pf.direct *= k;
        return RationalTF::from_partial_fractions(std::move(pf));
    }
    return RationalTF(poly::scale(tf.num(), k), tf.den());
}

RationalTF first_order_lag(double T) {
    PartialFractions pf;
    pf.poles = {Complex{-1.0 / T, 0.0}};
    pf.residues = {Complex{1.0 / T, 0.0}};
    return RationalTF::from_partial_fractions(std::move(pf));
}

// One pole (real) or one conjugate pair (stored by its upper member).
struct PoleEntry {
    Complex p;
    bool pair;
};

std::size_t basis_count(const std::vector<PoleEntry>& poles) {
    std::size_t n = 0;
    for (const auto& e : poles) {
        n += e.pair ? 2 : 1;
    }
    return n;
}

// Real-coefficient basis: 1/(s-p) for real p; for a pair
// 1/(s-p) + 1/(s-p*) and j/(s-p) - j/(s-p*).
void eval_basis(const std::vector<PoleEntry>& poles, Complex s, std::vector<Complex>& out) {
    out.clear();
    for (const auto& e : poles) {
        if (!e.pair) {
            out.push_back(1.0 / (s - e.p));
        } else {
            const Complex a = 1.0 / (s - e.p);
            const Complex b = 1.0 / (s - std::conj(e.p));
            out.push_back(a + b);
            out.push_back(Complex{0.0, 1.0} * (a - b));
        }
    }
}

Eigen::VectorXd solve_least_squares(Eigen::MatrixXd A, const Eigen::VectorXd& rhs) {
    Eigen::VectorXd colscale(A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const double nrm = A.col(j).norm();
        colscale(j) = nrm > 0.0 ? 1.0 / nrm : 1.0;
        A.col(j) *= colscale(j);
    }
    Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);
    return x.cwiseProduct(colscale);
}

std::vector<PoleEntry> entries_from_eigenvalues(const Eigen::VectorXcd& ev) {
    std::vector<PoleEntry> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        Complex p = ev(i);
        const double mag = std::abs(p);
        if (std::abs(p.imag()) <= 1e-10 * std::max(mag, 1e-300)) {
            out.push_back({Complex{p.real(), 0.0}, false});
        } else if (p.imag() > 0.0) {
            out.push_back({p, true});
        }
    }
    return out;
}

// Stability projection: mirror poles with nonnegative real part.
void project_poles(std::vector<PoleEntry>& poles) {
    for (auto& e : poles) {
        double re = e.p.real();
        if (re > 0.0) {
            re = -re;
        } else if (re == 0.0) {
            re = -1e-9 * std::max(std::abs(e.p), 1e-12);
        }
        e.p = Complex{re, e.p.imag()};
    }
}

// Distinct poles inside the band; faster ones are left to the direct term.
std::vector<PoleEntry> in_band(const std::vector<PoleEntry>& poles, double max_mag) {
    std::vector<PoleEntry> out;
    for (const auto& e : poles) {
        const bool duplicate = std::any_of(out.begin(), out.end(), [&e](const PoleEntry& o) {
            return o.pair == e.pair && std::abs(o.p - e.p) <= 1e-6 * std::abs(e.p);
        });
        if (std::abs(e.p) <= max_mag && !duplicate) {
            out.push_back(e);
        }
    }
    return out;
}

struct Samples {
    std::vector<Complex> s;
    std::vector<Complex> f;
    std::vector<double> w;
};

std::vector<PoleEntry> relocate_poles(const std::vector<PoleEntry>& poles, const Samples& data) {
    const std::size_t nb = basis_count(poles);
    const std::size_t rows = 2 * data.s.size();
    const std::size_t cols = 2 * nb + 1;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows));
    std::vector<Complex> phi;
    for (std::size_t k = 0; k < data.s.size(); ++k) {
        eval_basis(poles, data.s[k], phi);
        const Complex f = data.f[k];
        const double w = data.w[k];
        const auto re = static_cast<Eigen::Index>(2 * k);
        const auto im = re + 1;
        for (std::size_t i = 0; i < nb; ++i) {
            const auto col = static_cast<Eigen::Index>(i);
            A(re, col) = w * phi[i].real();
            A(im, col) = w * phi[i].imag();
            const Complex t = -f * phi[i];
            A(re, col + static_cast<Eigen::Index>(nb) + 1) = w * t.real();
            A(im, col + static_cast<Eigen::Index>(nb) + 1) = w * t.imag();
        }
        A(re, static_cast<Eigen::Index>(nb)) = w;
        A(im, static_cast<Eigen::Index>(nb)) = 0.0;
        rhs(re) = w * f.real();
        rhs(im) = w * f.imag();
    }
    const Eigen::VectorXd x = solve_least_squares(std::move(A), rhs);

    // Zeros of sigma(s) = 1 + ct^T (sI - Ap)^-1 b are eig(Ap - b ct^T).
    const auto n = static_cast<Eigen::Index>(nb);
    Eigen::MatrixXd Ap = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ct = x.tail(n);
    Eigen::Index i = 0;
    for (const auto& e : poles) {
        if (!e.pair) {
            Ap(i, i) = e.p.real();
            b(i) = 1.0;
            ++i;
        } else {
            Ap(i, i) = e.p.real();
            Ap(i, i + 1) = e.p.imag();
            Ap(i + 1, i) = -e.p.imag();
            Ap(i + 1, i + 1) = e.p.real();
            b(i) = 2.0;
            i += 2;
        }
    }
    const Eigen::MatrixXd H = Ap - b * ct.transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(H, false);
    auto next = entries_from_eigenvalues(solver.eigenvalues());
    project_poles(next);
    return next;
}

PartialFractions identify_residues(const std::vector<PoleEntry>& poles, const Samples& data) {
    const std::size_t nb = basis_count(poles);
    const std::size_t rows = 2 * data.s.size();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(nb + 1));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows));
    std::vector<Complex> phi;
    for (std::size_t k = 0; k < data.s.size(); ++k) {
        eval_basis(poles, data.s[k], phi);
        const double w = data.w[k];
        const auto re = static_cast<Eigen::Index>(2 * k);
        const auto im = re + 1;
        for (std::size_t i = 0; i < nb; ++i) {
            A(re, static_cast<Eigen::Index>(i)) = w * phi[i].real();
            A(im, static_cast<Eigen::Index>(i)) = w * phi[i].imag();
        }
        A(re, static_cast<Eigen::Index>(nb)) = w;
        A(im, static_cast<Eigen::Index>(nb)) = 0.0;
        rhs(re) = w * data.f[k].real();
        rhs(im) = w * data.f[k].imag();
    }
    const Eigen::VectorXd x = solve_least_squares(std::move(A), rhs);

    PartialFractions pf;
    pf.direct = x(static_cast<Eigen::Index>(nb));
    Eigen::Index i = 0;
    for (const auto& e : poles) {
        if (!e.pair) {
            pf.poles.emplace_back(e.p.real(), 0.0);
            pf.residues.emplace_back(x(i), 0.0);
            ++i;
        } else {
            const Complex r{x(i), x(i + 1)};
            pf.poles.push_back(e.p);
            pf.residues.push_back(r);
            pf.poles.push_back(std::conj(e.p));
            pf.residues.push_back(std::conj(r));
            i += 2;
        }
    }
    return pf;
}

}  // namespace

void validate(const FracPI& c) {
    if (!(c.k_p > 0.0) || !(c.k_i > 0.0) || !(c.lambda > 0.0 && c.lambda < 2.0)) {
        throw std::invalid_argument(fmt::format(
            "FracPI requires k_p > 0, k_i > 0, 0 < lambda < 2 (got {}, {}, {})", c.k_p, c.k_i,
            c.lambda));
    }
}

void validate(const HighOrderPlant& p) {
    if (!(p.T > 0.0) || !(p.n >= 3.0) || !std::isfinite(p.K)) {
        throw std::invalid_argument(
            fmt::format("plant requires T > 0 and n >= 3 (got T={}, n={})", p.T, p.n));
    }
}

void validate(const PredictorSplit& s, const HighOrderPlant& p) {
    if (!(s.chi > 0.0 && s.chi < 2.0) || !(s.chi < p.n)) {
        throw std::invalid_argument(
            fmt::format("predictor order chi must lie in (0, min(2, n)) (got {})", s.chi));
    }
}

void validate(const ApproxConfig& cfg) {
    if (!(cfg.omega_low > 0.0) || !(cfg.omega_low < cfg.omega_high) || cfg.n_sections < 1 ||
        cfg.fit_grid_points < 2 * (2 * cfg.n_sections + 1) || !(cfg.fit_error_ceiling > 0.0)) {
        throw std::invalid_argument(fmt::format(
            "invalid approximation config: band [{}, {}], sections {}, grid {}", cfg.omega_low,
            cfg.omega_high, cfg.n_sections, cfg.fit_grid_points));
    }
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] =
            std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return g;
}

RationalTF oustaloup_approx(double order, const ApproxConfig& cfg) {
    if (!(std::abs(order) < 2.0)) {
        throw std::invalid_argument(fmt::format("oustaloup_approx: order {} outside (-2, 2)", order));
    }
    validate(cfg);
    if (std::abs(order) < kOrderEps) {
        return RationalTF::constant(1.0);
    }
    if (std::abs(order) > 1.0) {
        const RationalTF half = oustaloup_approx(order / 2.0, cfg);
        return compose(ComposeOp::series, half, half);
    }

    const int N = cfg.n_sections;
    const double wb = cfg.omega_low;
    const double ratio = cfg.omega_high / cfg.omega_low;
    const double span = 2.0 * N + 1.0;
    std::vector<double> wz;
    std::vector<double> wp;
    for (int k = -N; k <= N; ++k) {
        wz.push_back(wb * std::pow(ratio, (k + N + 0.5 * (1.0 - order)) / span));
        wp.push_back(wb * std::pow(ratio, (k + N + 0.5 * (1.0 + order)) / span));
    }

    const double wc = std::sqrt(cfg.omega_low * cfg.omega_high);
    const Complex sc{0.0, wc};
    Complex shape{1.0, 0.0};
    for (std::size_t k = 0; k < wz.size(); ++k) {
        shape *= (sc + wz[k]) / (sc + wp[k]);
    }
    const double gain = std::pow(wc, order) / std::abs(shape);

    PartialFractions pf;
    pf.direct = gain;
    for (std::size_t k = 0; k < wp.size(); ++k) {
        const double p = -wp[k];
        double r = gain;
        for (std::size_t j = 0; j < wz.size(); ++j) {
            r *= (p + wz[j]);
            if (j != k) {
                r /= (p + wp[j]);
            }
        }
        pf.poles.emplace_back(p, 0.0);
        pf.residues.emplace_back(r, 0.0);
    }
    return RationalTF::from_partial_fractions(std::move(pf));
}

Complex exact_lag_response(double K, double T, double order, double omega) {
    return K * std::pow(Complex{1.0, T * omega}, -order);
}

Complex exact_frac_pi_response(const FracPI& c, double omega) {
    const Complex base = c.k_p + c.k_i / Complex{0.0, omega};
    return std::pow(base, c.lambda);
}

FitResult fit_frac_response(const FrequencyResponse& target, const ApproxConfig& cfg) {
    validate(cfg);
    const auto grid = log_grid(cfg.omega_low, cfg.omega_high, cfg.fit_grid_points);
    Samples data;
    for (double w : grid) {
        const Complex f = target(w);
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()) || std::abs(f) == 0.0) {
            throw FitError(fmt::format("fit target is zero or non-finite at omega = {}", w));
        }
        data.s.emplace_back(0.0, w);
        data.f.push_back(f);
        data.w.push_back(1.0 / std::abs(f));
    }

    const Complex f0 = data.f.front();
    const bool constant_target = std::all_of(data.f.begin(), data.f.end(), [&](Complex f) {
        return std::abs(f - f0) <= 1e-14 * std::abs(f0);
    });

    const double la = std::log10(cfg.omega_low);
    const double lb = std::log10(cfg.omega_high);
    const double c_lo = la + 0.1 * (lb - la);
    const double c_hi = lb - 0.1 * (lb - la);
    const auto score = [&](const RationalTF& tf) {
        FitResult r{tf, grid, {}, 0.0, 0.0};
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Complex h = tf.freq_response(grid[k]);
            r.response.push_back(h);
            const double target_mag = std::abs(data.f[k]);
            const double err = std::abs(std::abs(h) - target_mag) / target_mag;
            r.max_rel_error = std::max(r.max_rel_error, err);
            const double lw = std::log10(grid[k]);
            if (lw >= c_lo - 1e-12 && lw <= c_hi + 1e-12) {
                r.central_max_rel_error = std::max(r.central_max_rel_error, err);
            }
        }
        if (!std::isfinite(r.max_rel_error)) {
            r.max_rel_error = r.central_max_rel_error = std::numeric_limits<double>::infinity();
        }
        return r;
    };

    std::optional<FitResult> best;
    if (constant_target && std::abs(f0.imag()) <= 1e-14 * std::abs(f0)) {
        best = score(RationalTF::constant(f0.real()));
    } else {
        const int n_poles = 2 * cfg.n_sections + 1;
        std::vector<PoleEntry> poles;
        for (double w : log_grid(cfg.omega_low, cfg.omega_high, n_poles)) {
            poles.push_back({Complex{-w, 0.0}, false});
        }
        // Relocation is not monotone; keep the iterate with the smallest central error.
        constexpr int kIterations = 30;
        for (int it = 0; it < kIterations; ++it) {
            poles = relocate_poles(poles, data);
            FitResult r =
                score(RationalTF::from_partial_fractions(identify_residues(in_band(poles, cfg.omega_high), data)));
            if (r.tf.is_stable() && (!best || r.central_max_rel_error < best->central_max_rel_error)) {
                best = std::move(r);
            }
        }
        if (!best) {
            throw FitError("fitted approximation has a pole with nonnegative real part");
        }
    }
    FitResult result = std::move(*best);
    if (!(result.central_max_rel_error <= cfg.fit_error_ceiling)) {
        throw FitError(fmt::format("fit error {:.3g} exceeds ceiling {:.3g}",
                                   result.central_max_rel_error, cfg.fit_error_ceiling));
    }
    return result;
}

FactoredTF approx_lag(double K, double T, double order, const ApproxConfig& cfg) {
    if (!(T > 0.0) || !(order >= 0.0)) {
        throw std::invalid_argument(fmt::format("approx_lag: need T > 0, order >= 0 (got {}, {})", T, order));
    }
    auto whole = static_cast<unsigned>(std::floor(order + kOrderEps));
    double frac = order - whole;
    if (frac < kOrderEps) {
        frac = 0.0;
    }

    std::vector<RationalTF> factors;
    for (unsigned i = 0; i < whole; ++i) {
        factors.push_back(first_order_lag(T));
    }
    if (frac > 0.0) {
        auto fit = fit_frac_response([T, frac](double w) { return exact_lag_response(1.0, T, frac, w); },
                                     cfg);
        factors.push_back(std::move(fit.tf));
    }
    if (factors.empty()) {
        factors.push_back(RationalTF::constant(K));
    } else {
        factors.front() = scaled(factors.front(), K);
    }
    return FactoredTF(std::move(factors));
}

FactoredTF approx_frac_pi(const FracPI& c, const ApproxConfig& cfg) {
    validate(c);
    validate(cfg);
    const double tau = c.k_p / c.k_i;
    const double gain = std::pow(c.k_i, c.lambda);
    // Integer part m = ceil(lambda) leaves a fitted factor of order lambda - m
    // in (-1, 0], which decays and keeps its poles inside the band.
    const unsigned m = c.lambda <= 1.0 + kOrderEps ? 1U : 2U;
    const double rest = c.lambda - m;

    std::vector<RationalTF> factors;
    std::vector<double> den(m + 1, 0.0);
    den.front() = 1.0;
    factors.emplace_back(poly::scale(poly::binomial_power(tau, 1.0, m), gain), std::move(den));

    if (std::abs(rest) > kOrderEps) {
        auto fit = fit_frac_response(
            [tau, rest](double w) { return std::pow(Complex{1.0, tau * w}, rest); }, cfg);
        factors.push_back(std::move(fit.tf));
        factors.push_back(oustaloup_approx(-rest, cfg));
    }
    return FactoredTF(std::move(factors));
}

}  // namespace fopi
