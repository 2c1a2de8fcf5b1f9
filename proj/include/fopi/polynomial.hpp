#pragma once

#include <complex>
#include <span>
#include <vector>

// Real polynomials stored as coefficient lists in descending powers of s.
namespace fopi::poly {

using Complex = std::complex<double>;

std::size_t degree(std::span<const double> p);

Complex eval(std::span<const double> p, Complex s);
double eval(std::span<const double> p, double s);

std::vector<double> mul(std::span<const double> a, std::span<const double> b);
std::vector<double> add(std::span<const double> a, std::span<const double> b);
std::vector<double> scale(std::span<const double> p, double k);

// Drops leading zero coefficients, keeping at least one entry.
std::vector<double> trim(std::span<const double> p);

// Monic polynomial with the given roots. Complex roots must come in conjugate
// pairs; the imaginary residue of the product is discarded.
std::vector<double> from_roots(std::span<const Complex> roots);

// Roots via eigenvalues of the companion matrix.
std::vector<Complex> roots(std::span<const double> p);

std::vector<double> binomial_power(double a, double b, unsigned n);  // (a s + b)^n

}  // namespace fopi::poly
