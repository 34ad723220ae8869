#ifndef MLAB_STABILIZER_HPP
#define MLAB_STABILIZER_HPP

#include "mlab/hill.hpp"
#include "mlab/trig_poly.hpp"
#include "mlab/zeros.hpp"

#include <vector>

namespace mlab {

/// Periodic stabilizer of a Hill operator: a solution of
///   (1/2) xi''' + 2 u xi' + u' xi = 0
/// stored as a real profile plus an imaginary flag (xi = profile or
/// i * profile).  I is the first integral xi xi'' - xi'^2/2 + 2 u xi^2 of the
/// stored xi; it is real in both cases.
struct Stabilizer {
    enum class Kind { CaseI, CaseII, CaseIII };
    TrigPoly profile;
    bool imaginary = false;
    double I = 0;
    double I_drift = 0;
    Kind kind = Kind::CaseI;
    std::vector<TorusZero> zeros; // zeros of the profile
    Eigen::Matrix2d Q = Eigen::Matrix2d::Zero(); // xi = psi^T Q psi
    bool degenerate = false; // fixed space of the symmetric square had dim > 1

    Complex unit() const { return imaginary ? Complex(0, 1) : Complex(1, 0); }
    Complex xi(Complex z) const { return unit() * profile.eval(z); }
    TrigPoly xi_poly() const { return profile * unit(); }
};

struct StabilizerOptions {
    double rk_tol = 1e-11;
    int samples = 1024;
    double zero_tol = 1e-10;
    double deriv_tol = 1e-6;
    double degenerate_tol = 1e-8;
};

/// The periodic stabilizer of d^2 + u, found algebraically: quadratic forms
/// Q with M^T Q M = Q are exactly the 2pi-periodic combinations
/// xi = psi^T Q psi of Floquet solutions.  For elliptic u the result is real;
/// for hyperbolic u it is stored purely imaginary (paper convention, so that
/// the first integral is positive and the I = 2 normalization exists).
Stabilizer periodic_stabilizer(const HillOperator& u, const StabilizerOptions& opt = {});

/// theta-average of xi xi'' - xi'^2/2 + 2 u xi^2 plus the observed drift.
/// Throws NotInvariant when the drift exceeds 1e-6 relative.
double invariant_I(const HillOperator& u, const TrigPoly& xi, double* drift = nullptr);

/// Rescales so that I = 2 (real scale when I > 0, multiplication by i when
/// I < 0).  Case III (I = 0) admits no such normalization: ZeroInvariant.
Stabilizer normalize_stabilizer(const HillOperator& u, const Stabilizer& s);

struct KirillovFamily {
    enum class Case { I, II, III };
    Case c = Case::I;
    int n = 1;          // cases II, III
    double alpha = 0;   // case I: the constant potential; II/III: family parameter
    double a = 1;       // field amplitude (cases I, II)
    int sign = +1;      // case III: xi_{+-}
};

struct KirillovPair {
    PeriodicFn u;
    TrigPoly xi;
};

/// The closed-form normal-form pairs (u_{n,alpha}, xi_{n,alpha}) etc.
/// The potentials are rational in sin(n theta) and carried as exact analytic
/// callbacks with closed-form derivatives.
KirillovPair kirillov_family(const KirillovFamily& f);

/// Sup-norm of (1/2) xi''' + 2 u xi' + u' xi on a sample grid.
double stabilizer_ode_residual(const HillOperator& u, const TrigPoly& xi,
                               int samples = 512);

} // namespace mlab

#endif
