#ifndef MLAB_SVACTION_HPP
#define MLAB_SVACTION_HPP

#include "mlab/hill.hpp"
#include "mlab/periodic_fn.hpp"
#include "mlab/stabilizer.hpp"

#include <functional>
#include <optional>

namespace mlab {

/// D = -2i d/dtheta - d^2/dx^2 + V2 x^2 + V1 x + V0.
struct SchrodingerOp {
    PeriodicFn V2, V1, V0;
    HillOperator hill() const { return {V2}; }
};

/// Group element (phi; (a, b)) with phi(theta) = theta + p(theta).
/// Acting on operators: first the time reparametrization, then the nilpotent
/// part.  Stored as displacement + nilpotent pair of trig polynomials.
struct GroupElement {
    TrigPoly p; // phi = id + p, with phi' = 1 + p' > 0 everywhere
    TrigPoly a;
    TrigPoly b;

    double phi(double th) const { return th + p(th).real(); }
    Complex phi(Complex z) const { return z + p.eval(z); }
    double phi_prime(double th) const { return 1 + p.derivative()(th).real(); }
    bool valid(double* min_slope = nullptr) const;
};

GroupElement identity_element();

/// Pointwise Newton inversion of phi on a uniform grid, projected back onto a
/// degree-capped displacement series.  projection_tail_out reports the
/// relative coefficient tail of the projection.
TrigPoly invert_diffeo(const TrigPoly& p, int max_degree = 128,
                       double* projection_tail_out = nullptr);

/// Group law chosen so that act(g2, act(g1, D)) = act(product(g2, g1), D).
GroupElement product(const GroupElement& g2, const GroupElement& g1);
GroupElement inverse(const GroupElement& g);

struct InfinitesimalElement {
    TrigPoly f, g, h; // L_f + Y_g + M_h
};

/// Schwarzian derivative phi'''/phi' - (3/2)(phi''/phi')^2 as an analytic
/// callback (exact, built from the displacement derivatives).
PeriodicFn schwarzian(const GroupElement& g);

struct ActOptions {
    int max_degree = 512;
    double tail_tol = 1e-12;
};

/// sigma_{1/4}: time part  V2 -> phi'^2 V2 o phi + Theta(phi)/2,
///                         V1 -> phi'^{3/2} V1 o phi,  V0 -> phi' V0 o phi,
/// then nilpotent part     V1 -> V1 - 2 a V2 - 2 a'',
///                         V0 -> V0 - a V1 + a^2 V2 - 2 b' + a a''.
/// Outputs are re-projected onto finite Fourier series.
SchrodingerOp act(const GroupElement& g, const SchrodingerOp& D,
                  const ActOptions& opt = {});

struct PotentialIncrement {
    PeriodicFn dV2, dV1, dV0;
};
PotentialIncrement infinitesimal_act(const InfinitesimalElement& X,
                                     const SchrodingerOp& D);

/// First-order exponential (phi = id + eps f; a = eps g; b = eps h); accurate
/// to O(eps^2), which is all the finite-difference consistency checks need.
GroupElement group_exp(const InfinitesimalElement& X, double eps);

// ---------------------------------------------------------------------------
// Orbit classification
// ---------------------------------------------------------------------------

struct OrbitClass {
    enum class Tag { Ci, CiBis, Cii, Ciii, CiiiBis };
    Tag tag;
    bool generic = false; // Ci with alpha away from every m^2/4
    int n = 0;            // family index (CiBis/Cii/Ciii/CiiiBis)
    double alpha = 0;     // Ci: reduced constant; Cii/Ciii: family parameter
    double C = 0;         // resonant drift amplitude (CiBis/CiiiBis)
    double sigma = 0;     // resonant drift phase (CiBis)
    double gamma = 0;
    MonodromyClass hill_class;
};

const char* orbit_tag_name(OrbitClass::Tag t);

struct ClassifyOptions {
    double class_tol = 1e-7;
    double resonance_tol = 1e-6;
    double rk_tol = 1e-11;
};

OrbitClass classify_orbit(const SchrodingerOp& D, const ClassifyOptions& opt = {});

/// gamma = (1/2pi) int (V0 - V1 W1 / 4) with (d^2 + V2) W1 = V1 solved
/// periodically in the Floquet basis.  ResonantOperator when d^2 + V2 has a
/// periodic kernel in the parity sector of V1.
double recover_gamma(const SchrodingerOp& D, const ClassifyOptions& opt = {});

/// Solve w'' + V2 w = r with boundary condition w(2pi) = sign * w(0) (sign
/// -1 handles the anti-periodic sector).  When the monodromy is resonant the
/// minimum-norm solution orthogonal to the kernel is returned and kernel_out
/// (if non-null) receives the kernel function.
TrigPoly solve_hill_linear(const HillOperator& op, const PeriodicFn& r, int sign,
                           double rk_tol = 1e-11, TrigPoly* kernel_out = nullptr,
                           bool* resonant_out = nullptr);

// ---------------------------------------------------------------------------
// Vector invariant
// ---------------------------------------------------------------------------

/// (xi, delta1, delta2) of Definition-4.2 type: xi the I = 2 normalized
/// stabilizer, delta1 the periodic solution of
///   delta1'' + V2 delta1 = -(1/2)(V1' xi + (3/2) V1 xi'),
/// delta2 = -(1/2) int V1 delta1 - (1/2) V0 xi, stored zero-mean with the
/// dropped constant recorded.  All three share the unit of xi (real in the
/// elliptic case, purely imaginary in the hyperbolic case); the stored
/// profiles are real.
struct VectorInvariant {
    Stabilizer xi;
    TrigPoly delta1; // profile: delta1 = unit * profile
    TrigPoly delta2; // profile, zero-mean
    double delta2_offset = 0;
    Complex unit() const { return xi.unit(); }
};

VectorInvariant vector_invariant(const SchrodingerOp& D,
                                 const ClassifyOptions& opt = {},
                                 bool allow_nongeneric = false);

/// Adjoint transformation of the invariant under g, in the same direction as
/// act():  xi~ = xi o phi / phi',  delta1~ = delta1 o phi / sqrt(phi') +
/// (xi~ a' - a xi~'/2),  delta2~ = delta2 o phi + (a' d1 - a d1') + xi~ b' +
/// (1/2) xi~ (a'^2 - a a'') - (1/2) xi~' a a' + (1/4) xi~'' a^2, re-centred to
/// zero mean.
VectorInvariant transform_invariant(const GroupElement& g, const VectorInvariant& inv,
                                    const ActOptions& opt = {});

// ---------------------------------------------------------------------------
// The unitary representation pi_lambda on functions of (theta, x)
// ---------------------------------------------------------------------------

using SpaceTimeFn = std::function<Complex(double, double)>;

/// pi_lambda(g) on an analytic function of (theta, x); exact closed form.
SpaceTimeFn apply_pi(const GroupElement& g, double lambda, const SpaceTimeFn& psi);

/// Grid version: transforms a fixed-time slice.  The input slice must be the
/// wave function at time phi^{-1}(theta_out) sampled on x_grid; cubic
/// interpolation covers points displaced off the grid, and the mass fraction
/// of the input that the transform needs from outside the grid is reported
/// (GridOverflow above 1e-6).
Eigen::VectorXcd apply_pi_grid(const GroupElement& g, double lambda,
                               const Eigen::VectorXcd& slice_at_preimage,
                               const Eigen::VectorXd& x_grid, double theta_out,
                               double* clipped_mass = nullptr);

} // namespace mlab

#endif
