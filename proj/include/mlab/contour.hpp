#ifndef MLAB_CONTOUR_HPP
#define MLAB_CONTOUR_HPP

#include "mlab/trig_poly.hpp"
#include "mlab/zeros.hpp"

#include <functional>
#include <vector>

namespace mlab {

/// A piecewise contour from theta_start to theta_start + 2*pi: real segments
/// interleaved with half-circles around the zeros of the target function.
struct ContourPiece {
    enum class Kind { RealSegment, HalfCircle };
    Kind kind;
    double a = 0, b = 0;      // RealSegment endpoints
    double center = 0;        // HalfCircle
    double radius = 0;
    bool upper = true;        // half-plane of the arc
};

struct Contour {
    std::vector<ContourPiece> pieces;
    double start() const;
    double end() const;
};

enum class XiMode { Direct, PrincipalValue, ContourHyperbolic, ContourUnipotent };

/// Builds the contour covering one period: the start point is placed in the
/// middle of the largest zero gap, and each zero is bypassed by a half-circle
/// on the requested side (side[i] = true -> upper).  radius = 0 selects the
/// default min(0.1, gap/4).
Contour build_contour(const std::vector<TorusZero>& zeros,
                      const std::vector<bool>& upper_side, double period = kTwoPi,
                      double radius = 0);

/// Integral of f along the contour (f analytic in a neighbourhood of it).
Complex integrate_contour(const Contour& c,
                          const std::function<Complex(Complex)>& f,
                          double rel_tol = 1e-10);

struct XiIntegralOptions {
    double rel_tol = 1e-10;
    double zero_tol = 1e-10;
    double deriv_tol = 1e-6;
    double radius_override = 0; // 0 = default min(0.1, gap/4)
};

/// The period integral of 1/xi in the requested regularization.
///
/// xi must be real up to a constant unit phase (real or purely imaginary).
///  - Direct: plain integral; requires a zero-free xi.
///  - PrincipalValue: simple zeros only.  Evaluated as a contour integral with
///    upper half-circles plus the exact residue correction + i*pi*sum(1/xi'),
///    so the result is independent of the excision radius.
///  - ContourHyperbolic: simple zeros; the half-circle sides alternate so that
///    Re xi(z) >= 0 along the contour when xi = i*eta (side chosen from the
///    sign of the profile derivative at each zero).
///  - ContourUnipotent: double zeros only; all half-circles in the upper
///    half-plane.  The result is radius-independent because 1/xi has no
///    residues at double zeros of Hill stabilizers.
Complex xi_integral(const TrigPoly& xi, XiMode mode,
                    const XiIntegralOptions& opt = {});

} // namespace mlab

#endif
