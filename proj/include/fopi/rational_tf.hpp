#pragma once

#include <complex>
#include <optional>
#include <vector>

namespace fopi {

using Complex = std::complex<double>;

/// Pole/residue expansion H(s) = direct + sum_k residues[k] / (s - poles[k]).
/// Complex poles appear in adjacent conjugate pairs (positive imaginary part
/// first). All poles are distinct.
struct PartialFractions {
    std::vector<Complex> poles;
    std::vector<Complex> residues;
    double direct = 0.0;

    Complex eval(Complex s) const;
};

/// Proper rational transfer function num(s)/den(s), coefficients in descending
/// powers of s.
///
/// Approximations built from known poles carry their partial-fraction form as
/// well, which realizes into a far better conditioned state space than the
/// companion form of a high-degree denominator.
enum class ComposeOp { series, parallel, feedback };

class RationalTF {
public:
    RationalTF(std::vector<double> num, std::vector<double> den);

    static RationalTF constant(double k);
    static RationalTF from_partial_fractions(PartialFractions pf);

    const std::vector<double>& num() const noexcept { return num_; }
    const std::vector<double>& den() const noexcept { return den_; }
    const std::optional<PartialFractions>& partial_fractions() const noexcept { return pf_; }

    std::size_t order() const noexcept { return den_.size() - 1; }
    bool strictly_proper() const noexcept;

    /// num(s)/den(s) by Horner evaluation of the stored coefficients.
    Complex eval(Complex s) const;
    Complex freq_response(double omega) const { return eval(Complex{0.0, omega}); }
    double dc_gain() const;

    std::vector<Complex> poles() const;
    bool is_stable() const;

private:
    friend RationalTF compose(ComposeOp op, const RationalTF& a, const RationalTF& b);
    // Denominator of a series/parallel composition keeps the factors' poles.
    static RationalTF with_poles(RationalTF tf, const RationalTF& a, const RationalTF& b);

    std::vector<double> num_;
    std::vector<double> den_;
    std::optional<PartialFractions> pf_;
    std::optional<std::vector<Complex>> known_poles_;  ///< exact poles when built from them
};

/// Series product of rational factors. Keeps each factor separate so that
/// exact integer-order parts and fitted fractional parts realize independently.
class FactoredTF {
public:
    FactoredTF() = default;
    explicit FactoredTF(std::vector<RationalTF> factors) : factors_(std::move(factors)) {}

    const std::vector<RationalTF>& factors() const noexcept { return factors_; }
    void append(RationalTF f) { factors_.push_back(std::move(f)); }

    Complex eval(Complex s) const;
    Complex freq_response(double omega) const { return eval(Complex{0.0, omega}); }
    std::size_t order() const noexcept;
    bool is_stable() const;

    /// Multiplies all factors into one coefficient pair.
    RationalTF collapse() const;

private:
    std::vector<RationalTF> factors_;
};

/// series: a*b; parallel: a+b; feedback: a/(1+a*b). No pole/zero cancellation.
RationalTF compose(ComposeOp op, const RationalTF& a, const RationalTF& b);

}  // namespace fopi
