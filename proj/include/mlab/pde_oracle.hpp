#ifndef MLAB_PDE_ORACLE_HPP
#define MLAB_PDE_ORACLE_HPP

#include "mlab/el_invariant.hpp"
#include "mlab/svaction.hpp"

#include <Eigen/Dense>

namespace mlab {

struct Grid {
    double L = 16;    // x in [-L, L)
    int Nx = 1024;    // power of two
    double dtheta = kTwoPi / 4096;
    Eigen::VectorXd x() const;
    Eigen::VectorXd k() const; // FFT wavenumbers
};

struct WaveState {
    double theta = 0;
    Eigen::VectorXcd values;
    double norm(const Grid& g) const;
};

enum class Propagator { SplitStep, CrankNicolson };

struct PropagateOptions {
    Propagator backend = Propagator::SplitStep;
    double leak_tol = 1e-6; // BoundaryLeak threshold on edge mass fraction
};

/// i psi_theta = (1/2)(-psi_xx + V psi): Strang split-step (exact unitarity,
/// spectral accuracy in x, second order in dtheta) or Crank-Nicolson as a
/// cross-check backend.  The potential phase uses the midpoint time.
WaveState propagate(const SchrodingerOp& D, const Grid& g, const WaveState& psi0,
                    double theta_target, const PropagateOptions& opt = {});

/// <psi, EL psi> sampled along the evolution; returns the max deviation from
/// the initial value (spectral differentiation for the derivative terms).
double expectation_drift(const SchrodingerOp& D, const ELCoefficients& el,
                         const Grid& g, const WaveState& psi0, int samples,
                         const PropagateOptions& opt = {});

Complex el_expectation(const ELCoefficients& el, const Grid& g, const WaveState& s);

/// <psi(0), psi(2pi)> / <psi(0), psi(0)>; NotEigenlike when the modulus drops
/// below 0.99 (the state failed to return to itself up to phase).
Complex measure_monodromy_phase(const SchrodingerOp& D, const Grid& g,
                                const ModelEigenfunction& state,
                                const PropagateOptions& opt = {});

/// Sample a (theta, x) evaluator on the grid at fixed theta.
WaveState sample_state(const std::function<Complex(double, double)>& f, const Grid& g,
                       double theta = 0);

} // namespace mlab

#endif
