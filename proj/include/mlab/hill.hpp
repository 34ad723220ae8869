#ifndef MLAB_HILL_HPP
#define MLAB_HILL_HPP

#include "mlab/periodic_fn.hpp"

#include <Eigen/Dense>

namespace mlab {

struct HillOperator {
    PeriodicFn u; // d^2/dtheta^2 + u(theta)
};

/// Floquet data of psi'' = -u psi over one period, in the canonical basis
/// psi1(0)=1, psi1'(0)=0, psi2(0)=0, psi2'(0)=1.  The convention is
/// psi(theta+2pi) = M psi(theta) on the column (psi1, psi2), which gives
/// M = [[psi1(2pi), psi1'(2pi)], [psi2(2pi), psi2'(2pi)]].
struct FloquetData {
    Eigen::Matrix2d M;
    double W; // Wronskian psi1 psi2' - psi1' psi2 (= 1 at theta = 0)
    double wronskian_drift; // max relative drift along the integration
    // dense output on a uniform grid over [0, 2pi]: columns psi1, psi1', psi2, psi2'
    Eigen::VectorXd theta;
    Eigen::MatrixX4d psi;
    /// Fundamental-system matrix Phi(2pi) propagating (y, y') column vectors.
    Eigen::Matrix2d fundamental() const {
        Eigen::Matrix2d F;
        F << M(0, 0), M(1, 0), M(0, 1), M(1, 1);
        return F;
    }
};

struct MonodromyClass {
    enum class Tag { Elliptic, Hyperbolic, UnipotentPlus, UnipotentMinus, PlusId, MinusId };
    Tag tag;
    /// Elliptic: rotation angle in (0, pi) with cos(angle) = Tr/2.
    /// Hyperbolic: expansion rate log of the larger |eigenvalue|.
    double lambda = 0;
    bool low_confidence = false; // |Tr M| within class_tol of 2
};

struct LiftedMonodromy {
    double delta_omega; // total Pruefer angle increment over one period
    long winding;       // nearest integer of delta_omega / 2pi
    MonodromyClass cls;
};

struct FloquetOptions {
    double rk_tol = 1e-11;
    int samples = 1024; // dense-output grid resolution
};

FloquetData floquet(const HillOperator& u, const FloquetOptions& opt = {});

MonodromyClass classify(const Eigen::Matrix2d& M, double class_tol = 1e-7);

/// Pruefer lift: integrates omega' = W / (psi1^2 + psi2^2) alongside the Hill
/// system (the angle is never computed through arctan branches).
LiftedMonodromy lifted_monodromy(const HillOperator& u, const FloquetOptions& opt = {});

} // namespace mlab

#endif
