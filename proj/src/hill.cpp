#include "mlab/hill.hpp"

#include "mlab/errors.hpp"
#include "mlab/ode.hpp"

#include <cmath>

namespace mlab {

namespace {

// state y = (psi1, psi1', psi2, psi2' [, omega])
template <bool WithPruefer>
void hill_rhs(const PeriodicFn& u, double t, const Eigen::VectorXd& y,
              Eigen::VectorXd& dy) {
    const double uv = u(t);
    dy[0] = y[1];
    dy[1] = -uv * y[0];
    dy[2] = y[3];
    dy[3] = -uv * y[2];
    if constexpr (WithPruefer) {
        const double xi = y[0] * y[0] + y[2] * y[2];
        dy[4] = (y[0] * y[3] - y[1] * y[2]) / xi;
    }
}

} // namespace

FloquetData floquet(const HillOperator& op, const FloquetOptions& opt) {
    FloquetData out;
    const int K = opt.samples;
    out.theta = Eigen::VectorXd::Zero(K + 1);
    out.psi = Eigen::MatrixX4d::Zero(K + 1, 4);

    Eigen::VectorXd y(4);
    y << 1, 0, 0, 1;
    int row = 0;
    double wmax = 0;
    auto record = [&](double t, const Eigen::VectorXd& s) {
        out.theta[row] = t;
        out.psi.row(row) << s[0], s[1], s[2], s[3];
        wmax = std::max(wmax, std::abs(s[0] * s[3] - s[1] * s[2] - 1.0));
        ++row;
    };
    integrate_ode<double>(
        [&](double t, const Eigen::VectorXd& s, Eigen::VectorXd& d) {
            hill_rhs<false>(op.u, t, s, d);
        },
        0, kTwoPi, y, opt.rk_tol, opt.rk_tol, uniform_samples(K, kTwoPi), record);

    out.M << y[0], y[1], y[2], y[3];
    out.W = 1.0;
    out.wronskian_drift = wmax;
    return out;
}

MonodromyClass classify(const Eigen::Matrix2d& M, double class_tol) {
    MonodromyClass c;
    const double tr = M.trace();
    if (std::abs(tr) < 2 - class_tol) {
        c.tag = MonodromyClass::Tag::Elliptic;
        c.lambda = std::acos(std::clamp(tr / 2, -1.0, 1.0));
        return c;
    }
    if (std::abs(tr) > 2 + class_tol) {
        c.tag = MonodromyClass::Tag::Hyperbolic;
        c.lambda = std::acosh(std::abs(tr) / 2);
        return c;
    }
    c.low_confidence = true;
    const double sign = (tr >= 0) ? 1.0 : -1.0;
    Eigen::Matrix2d D = M - sign * Eigen::Matrix2d::Identity();
    // +-Id when the full matrix (not just the trace) is at the center
    if (D.cwiseAbs().maxCoeff() < std::sqrt(class_tol))
        c.tag = (sign > 0) ? MonodromyClass::Tag::PlusId : MonodromyClass::Tag::MinusId;
    else
        c.tag = (sign > 0) ? MonodromyClass::Tag::UnipotentPlus
                           : MonodromyClass::Tag::UnipotentMinus;
    return c;
}

namespace {

double pruefer_increment(const HillOperator& op, const Eigen::Matrix2d& basis,
                         double rk_tol) {
    // basis rows are the initial (psi_i, psi_i') pairs
    Eigen::VectorXd y(5);
    y << basis(0, 0), basis(0, 1), basis(1, 0), basis(1, 1), 0;
    integrate_ode<double>(
        [&](double t, const Eigen::VectorXd& s, Eigen::VectorXd& d) {
            hill_rhs<true>(op.u, t, s, d);
        },
        0, kTwoPi, y, rk_tol, rk_tol, {}, [](double, const Eigen::VectorXd&) {});
    return y[4];
}

} // namespace

LiftedMonodromy lifted_monodromy(const HillOperator& op, const FloquetOptions& opt) {
    FloquetData fd = floquet(op, {opt.rk_tol, 16});
    MonodromyClass cls = classify(fd.M);

    Eigen::Matrix2d basis = Eigen::Matrix2d::Identity();
    if (cls.tag == MonodromyClass::Tag::Elliptic) {
        // Rotate to the basis in which M is a true rotation, so that
        // xi = psi1^2 + psi2^2 is the periodic stabilizer and the angle
        // advances by W * int dtheta / xi.
        Eigen::EigenSolver<Eigen::Matrix2d> es(fd.M);
        Eigen::Vector2cd v = es.eigenvectors().col(0);
        Eigen::Matrix2d P;
        P.col(0) = v.real();
        P.col(1) = v.imag();
        basis = P.inverse();
        if (basis.determinant() < 0) basis.row(0).swap(basis.row(1));
        basis /= std::sqrt(std::abs(basis.determinant()));
    }

    LiftedMonodromy lm;
    lm.delta_omega = pruefer_increment(op, basis, opt.rk_tol);
    lm.winding = std::lround(lm.delta_omega / kTwoPi);
    lm.cls = cls;
    return lm;
}

} // namespace mlab
