#ifndef MLAB_ZEROS_HPP
#define MLAB_ZEROS_HPP

#include "mlab/trig_poly.hpp"

#include <vector>

namespace mlab {

struct TorusZero {
    enum class Mult { Simple, Double };
    double location;        // in [0, 2*pi*denom)
    Mult multiplicity;
    double derivative_value; // f'(theta0) for simple, f''(theta0) for double
};

/// All zeros of a real-valued trig polynomial on one period, classified as
/// simple (sign change, f' != 0) or double (tangential, f'' != 0).
/// Simple zeros are located by bracketing sign changes on a uniform
/// 4*(N+1)-point grid followed by bisection and a Newton polish; double zeros
/// are located as zeros of f' at which |f| is below tolerance.
/// Throws ZeroResolutionError when a candidate passes neither multiplicity
/// test.  Tolerances are applied relative to max(1, ||f||_inf).
std::vector<TorusZero> find_zeros(const TrigPoly& f, double zero_tol = 1e-10,
                                  double deriv_tol = 1e-6);

} // namespace mlab

#endif
