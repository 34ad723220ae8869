#ifndef MLAB_EL_INVARIANT_HPP
#define MLAB_EL_INVARIANT_HPP

#include "mlab/svaction.hpp"

#include <functional>

namespace mlab {

/// Coefficients of the quadratic invariant
///   (1/2)[ a x^2 - b d_x^2 - i c (x d_x + d_x x) + d (-i d_x) + e x + f ].
/// For hyperbolic and resonant operators the entries are purely imaginary
/// multiples of real periodic functions (the operator is anti-hermitian).
struct ELCoefficients {
    TrigPoly a, b, c, d, e, f;
    /// max residual of the six first-order constraints
    ///   a' = 2 V2 c, b' = -2c, c' = -a + V2 b,
    ///   d' = V1 b - e, e' = V1 c + V2 d, f' = d V1 / 2.
    double constraint_residual = 0;
};

/// Builds the invariant of D from its vector invariant: a, b, c from xi
/// (a by integrating a' = 2 V2 c, pinned at the profile peak, which avoids
/// dividing by xi near its zeros), d = -2 delta1, e = V1 xi + 2 delta1',
/// f = 2(delta2 + V0 xi / 2).  ConstraintViolation above 1e-6.
ELCoefficients el_coefficients(const SchrodingerOp& D, const VectorInvariant& inv);

double el_constraint_residual(const SchrodingerOp& D, const ELCoefficients& el,
                              int samples = 512);

/// Routes to the invariant construction appropriate for the class: the
/// Definition-4.2 triple for generic and reduced-elliptic classes, the
/// eta-based unipotent variant otherwise.
VectorInvariant invariant_for(const SchrodingerOp& D, const OrbitClass& cls,
                              const ClassifyOptions& opt = {});

/// The eta-based pseudo-invariant for resonant classes: xi = i eta with eta
/// the real unipotent profile, I = 0, delta1 the kernel-orthogonal periodic
/// solution, delta2 the zero-mean primitive.
VectorInvariant resonant_invariant(const SchrodingerOp& D, const OrbitClass& cls,
                                   const ClassifyOptions& opt = {});

/// Sup over a zero-avoiding contour of |zeta'' + V2 zeta - (I/2) zeta^{-3}|
/// with zeta = sqrt(xi) branch-tracked along the contour.
double pinney_check(const PeriodicFn& V2, const Stabilizer& xi,
                    int samples_per_piece = 64);

// ---------------------------------------------------------------------------

struct MonodromySpec {
    enum class Kind {
        DiscreteElliptic,
        ContinuousHyperbolic,
        ContinuousUnipotent,
        ResonantIBis,
        ResonantIIIBis
    };
    Kind kind;
    double a = 0;     // elliptic: lambda_n = -2 pi (n + 1/2) a - pi gamma
    Complex T{0, 0};  // period integral int dtheta / xi (continuous kinds)
    double gamma = 0;
    double gamma_tilde = 0; // resonant kinds
    double kshift = 0;      // (i)bis: k' - k
    double C_alpha = 0;     // (iii)bis
    double identity_residual = 0; // (iii)bis: drift of the d-identity constant

    double lambda_n(int n) const { return -kTwoPi * (n + 0.5) * a - M_PI * gamma; }
    Complex multiplier(double k) const {
        return std::exp(k * T - Complex(0, M_PI * gamma_tilde));
    }
};

const char* monodromy_kind_name(MonodromySpec::Kind k);

MonodromySpec monodromy_spec(const OrbitClass& cls, const VectorInvariant& inv);

// ---------------------------------------------------------------------------

struct EigenLabel {
    int n = 0;      // Hermite index
    double k = 0;   // spectral parameter (continuous kinds)
    int sign = +1;  // parity (+1 even / -1 odd) or wave direction
};

struct ModelEigenfunction {
    enum class Family { Hermite, HypergeometricEvenOdd, PlaneWave, IBisWave, Airy };
    Family family;
    EigenLabel label;
    bool unit_l2 = false; // true only for the Hermite family
    std::function<Complex(double, double)> eval; // (theta, x)
};

/// Instantaneous eigenfunctions of the invariant, with the theta-dependent
/// prefactors built from the stabilizer profile.  Normalization is numerical:
/// Hermite states are unit-L2 by construction, continuous families are scaled
/// to O(1) (UpToConstant).
ModelEigenfunction eigenfunction(const OrbitClass& cls, const VectorInvariant& inv,
                                 const EigenLabel& label);

} // namespace mlab

#endif
