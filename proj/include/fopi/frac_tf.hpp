#pragma once

#include "fopi/rational_tf.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fopi {

/// (k_p + k_i/s)^lambda
struct FracPI {
    double k_p = 1.0;
    double k_i = 0.1;
    double lambda = 1.0;
};

/// K / (T s + 1)^n, n may be non-integer.
struct HighOrderPlant {
    double K = 1.0;
    double T = 20.0;
    double n = 4.0;
};

/// Splits the plant order into a predictable part of order chi (gain K) and a
/// remainder of order n - chi (unit gain).
struct PredictorSplit {
    double chi = 1.0;
};

struct ApproxConfig {
    double omega_low = 1e-4;
    double omega_high = 1e2;
    int n_sections = 5;
    int fit_grid_points = 200;
    /// Max relative magnitude error tolerated over the central 80% of the band.
    double fit_error_ceiling = 0.05;
};

void validate(const FracPI& c);
void validate(const HighOrderPlant& p);
void validate(const PredictorSplit& s, const HighOrderPlant& p);
void validate(const ApproxConfig& cfg);

/// Raised when a fitted approximation misses its error ceiling or cannot be
/// made stable.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Band-limited Oustaloup approximation of s^order over
/// [omega_low, omega_high] with 2*n_sections+1 zero/pole pairs; gain set so the
/// magnitude is exact at the geometric band centre. Orders with |order| > 1 are
/// realized as the product of two half-order approximations.
RationalTF oustaloup_approx(double order, const ApproxConfig& cfg);

/// K (T j w + 1)^(-order), principal branch.
Complex exact_lag_response(double K, double T, double order, double omega);

/// (k_p + k_i/(j w))^lambda, principal branch.
Complex exact_frac_pi_response(const FracPI& c, double omega);

using FrequencyResponse = std::function<Complex(double omega)>;

struct FitResult {
    RationalTF tf;
    std::vector<double> grid;                   ///< rad/s, log spaced
    std::vector<Complex> response;              ///< tf evaluated on grid
    double max_rel_error = 0.0;                 ///< over the whole grid
    double central_max_rel_error = 0.0;         ///< over the central 80% (log scale)
};

/// Weighted least-squares rational fit (vector fitting with relative
/// weighting) of a frequency response sampled on a log grid over the band.
/// Uses 2*n_sections+1 poles. Throws FitError when the central-band error
/// exceeds cfg.fit_error_ceiling or a pole cannot be stabilized.
FitResult fit_frac_response(const FrequencyResponse& target, const ApproxConfig& cfg);

/// Rational approximation of K/(T s + 1)^order: the integer part of the order
/// is kept as exact first-order lags, the fractional remainder is fitted.
FactoredTF approx_lag(double K, double T, double order, const ApproxConfig& cfg);

/// Rational approximation of (k_p + k_i/s)^lambda written as
/// k_i^lambda ((tau s + 1)/s)^m * (tau s + 1)^(lambda-m) * s^(m-lambda), with
/// tau = k_p/k_i and m = 1 for lambda <= 1, else 2. The integrators are exact,
/// (tau s + 1)^(lambda-m) is fitted and s^(m-lambda) uses the Oustaloup filter.
FactoredTF approx_frac_pi(const FracPI& c, const ApproxConfig& cfg);

std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace fopi
