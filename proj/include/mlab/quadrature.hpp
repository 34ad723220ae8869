#ifndef MLAB_QUADRATURE_HPP
#define MLAB_QUADRATURE_HPP

#include <complex>
#include <functional>

namespace mlab {

struct QuadResult {
    std::complex<double> value;
    double error;
    int evaluations;
};

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b] for a complex-valued integrand of a
/// real parameter.  Bisects until the local Kronrod error estimate meets
/// rel_tol * |I| + abs_tol.
QuadResult integrate(const std::function<std::complex<double>(double)>& f,
                     double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 1e-14, int max_depth = 50);

} // namespace mlab

#endif
