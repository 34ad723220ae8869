#ifndef MLAB_SPECIAL_FUNCTIONS_HPP
#define MLAB_SPECIAL_FUNCTIONS_HPP

#include <complex>

namespace mlab {

/// log Gamma(z), principal branch (Lanczos approximation, ~1e-13 relative).
std::complex<double> log_gamma(std::complex<double> z);
std::complex<double> gamma_fn(std::complex<double> z);

/// Kummer confluent hypergeometric 1F1(a, b; z) for complex parameters.
/// Power series for |z| < 30, large-|z| asymptotic expansion beyond
/// (accuracy ~1e-9 relative on moderate parameter sizes).
std::complex<double> hyp1f1(std::complex<double> a, std::complex<double> b,
                            std::complex<double> z);

/// Airy function of the first kind, real argument.
double airy_ai(double x);

/// Physicists' Hermite polynomial H_n.
double hermite_h(int n, double y);

/// L2-normalized Hermite function H_n(y) e^{-y^2/2} / sqrt(2^n n! sqrt(pi)).
double hermite_function(int n, double y);

} // namespace mlab

#endif
