#include "fopi/rational_tf.hpp"

#include "fopi/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fopi {

Complex PartialFractions::eval(Complex s) const {
    Complex acc{direct, 0.0};
    for (std::size_t k = 0; k < poles.size(); ++k) {
        acc += residues[k] / (s - poles[k]);
    }
    return acc;
}

RationalTF::RationalTF(std::vector<double> num, std::vector<double> den) {
    if (den.empty()) {
        throw std::invalid_argument("RationalTF: empty denominator");
    }
    den_ = poly::trim(den);
    if (den_.front() == 0.0) {
        throw std::invalid_argument("RationalTF: denominator is identically zero");
    }
    num_ = num.empty() ? std::vector<double>{0.0} : poly::trim(num);
    if (poly::degree(num_) > poly::degree(den_)) {
        throw std::invalid_argument("RationalTF: improper transfer function");
    }
    for (double c : num_) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("RationalTF: non-finite numerator coefficient");
        }
    }
    for (double c : den_) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("RationalTF: non-finite denominator coefficient");
        }
    }
}

RationalTF RationalTF::constant(double k) { return RationalTF({k}, {1.0}); }

RationalTF RationalTF::from_partial_fractions(PartialFractions pf) {
    if (pf.poles.size() != pf.residues.size()) {
        throw std::invalid_argument("partial fractions: pole/residue count mismatch");
    }
    const std::size_t n = pf.poles.size();
    std::vector<double> den = poly::from_roots(pf.poles);
    // num = direct*den + sum_k r_k * prod_{j != k} (s - p_j), accumulated in complex.
    std::vector<Complex> num(n + 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i <= n; ++i) {
        num[i] = pf.direct * den[i];
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<Complex> term{Complex{1.0, 0.0}};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) {
                continue;
            }
            std::vector<Complex> next(term.size() + 1, Complex{0.0, 0.0});
            for (std::size_t i = 0; i < term.size(); ++i) {
                next[i] += term[i];
                next[i + 1] -= term[i] * pf.poles[j];
            }
            term = std::move(next);
        }
        for (std::size_t i = 0; i < term.size(); ++i) {
            num[i + 1] += pf.residues[k] * term[i];
        }
    }
    std::vector<double> num_real(num.size());
    std::transform(num.begin(), num.end(), num_real.begin(), [](Complex c) { return c.real(); });
    RationalTF tf(std::move(num_real), std::move(den));
    tf.known_poles_ = pf.poles;
    tf.pf_ = std::move(pf);
    return tf;
}

bool RationalTF::strictly_proper() const noexcept {
    return num_.size() == 1 && num_[0] == 0.0 ? true : poly::degree(num_) < poly::degree(den_);
}

Complex RationalTF::eval(Complex s) const { return poly::eval(num_, s) / poly::eval(den_, s); }

double RationalTF::dc_gain() const {
    const double d = den_.back();
    const double n = num_.back();
    if (d == 0.0) {
        return n == 0.0 ? std::nan("") : std::copysign(INFINITY, n);
    }
    return n / d;
}

std::vector<Complex> RationalTF::poles() const {
    if (known_poles_) {
        return *known_poles_;
    }
    return poly::roots(den_);
}

bool RationalTF::is_stable() const {
    const auto p = poles();
    return std::all_of(p.begin(), p.end(), [](Complex z) { return z.real() < 0.0; });
}

Complex FactoredTF::eval(Complex s) const {
    Complex acc{1.0, 0.0};
    for (const auto& f : factors_) {
        acc *= f.eval(s);
    }
    return acc;
}

std::size_t FactoredTF::order() const noexcept {
    std::size_t n = 0;
    for (const auto& f : factors_) {
        n += f.order();
    }
    return n;
}

bool FactoredTF::is_stable() const {
    return std::all_of(factors_.begin(), factors_.end(),
                       [](const RationalTF& f) { return f.is_stable(); });
}

RationalTF FactoredTF::collapse() const {
    RationalTF acc = RationalTF::constant(1.0);
    for (const auto& f : factors_) {
        acc = compose(ComposeOp::series, acc, f);
    }
    return acc;
}

RationalTF RationalTF::with_poles(RationalTF tf, const RationalTF& a, const RationalTF& b) {
    if (a.known_poles_ || b.known_poles_ || (a.order() == 0 && b.order() == 0)) {
        auto p = a.poles();
        const auto q = b.poles();
        p.insert(p.end(), q.begin(), q.end());
        tf.known_poles_ = std::move(p);
    }
    return tf;
}

RationalTF compose(ComposeOp op, const RationalTF& a, const RationalTF& b) {
    switch (op) {
    case ComposeOp::series:
        return RationalTF::with_poles(RationalTF(poly::mul(a.num(), b.num()), poly::mul(a.den(), b.den())), a, b);
    case ComposeOp::parallel:
        return RationalTF::with_poles(RationalTF(poly::add(poly::mul(a.num(), b.den()), poly::mul(b.num(), a.den())),
                                     poly::mul(a.den(), b.den())),
                          a, b);
    case ComposeOp::feedback: {
        auto den = poly::add(poly::mul(a.den(), b.den()), poly::mul(a.num(), b.num()));
        const bool singular = std::all_of(den.begin(), den.end(), [](double c) { return c == 0.0; });
        if (singular) {
            throw std::invalid_argument("compose: return difference 1 + a*b is identically zero");
        }
        return RationalTF(poly::mul(a.num(), b.den()), std::move(den));
    }
    }
    throw std::invalid_argument("compose: unknown operation");
}

}  // namespace fopi
