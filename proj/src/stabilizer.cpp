#include "mlab/stabilizer.hpp"

#include "mlab/errors.hpp"

#include <cmath>

namespace mlab {

namespace {

// first nonzero of xi(0), xi'(0), xi''(0), ... decides the sign
double leading_sign(const TrigPoly& p) {
    TrigPoly d = p;
    double scale = std::max(1e-300, p.max_abs());
    for (int k = 0; k < 6; ++k) {
        double v = d(0.0).real();
        if (std::abs(v) > 1e-7 * scale) return v > 0 ? 1.0 : -1.0;
        d = d.derivative();
    }
    return 1.0;
}

} // namespace

double invariant_I(const HillOperator& u, const TrigPoly& xi, double* drift) {
    const TrigPoly d1 = xi.derivative();
    const TrigPoly d2 = d1.derivative();
    const int K = 512;
    double acc = 0, lo = 1e300, hi = -1e300;
    for (int j = 0; j < K; ++j) {
        double th = kTwoPi * xi.denom() * j / K;
        Complex x = xi(th), x1 = d1(th), x2 = d2(th);
        Complex Ic = x * x2 - 0.5 * x1 * x1 + 2.0 * u.u(th) * x * x;
        double I = Ic.real(); // imaginary part vanishes for real/imaginary xi
        acc += I;
        lo = std::min(lo, I);
        hi = std::max(hi, I);
    }
    double mean = acc / K;
    double dr = hi - lo;
    if (drift) *drift = dr;
    if (dr > 1e-6 * (1 + std::abs(mean)))
        throw NotInvariant("first integral drifts by " + std::to_string(dr));
    return mean;
}

Stabilizer periodic_stabilizer(const HillOperator& op, const StabilizerOptions& opt) {
    FloquetData fd = floquet(op, {opt.rk_tol, opt.samples});
    const Eigen::Matrix2d M = fd.M;

    // B(Q) = M^T Q M on the coordinates (q11, q12, q22)
    auto apply = [&](double q11, double q12, double q22) {
        Eigen::Matrix2d Q;
        Q << q11, q12, q12, q22;
        Eigen::Matrix2d R = M.transpose() * Q * M;
        return Eigen::Vector3d(R(0, 0), R(0, 1), R(1, 1));
    };
    Eigen::Matrix3d L;
    L.col(0) = apply(1, 0, 0);
    L.col(1) = apply(0, 1, 0);
    L.col(2) = apply(0, 0, 1);
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(L - Eigen::Matrix3d::Identity(),
                                          Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();

    Stabilizer st;
    Eigen::Vector3d q;
    if (sv[1] < opt.degenerate_tol * std::max(1.0, sv[0])) {
        // non-generic case I (alpha = m^2/4): the whole symmetric square is
        // fixed; return the distinguished zero-free combination psi1^2+psi2^2
        st.degenerate = true;
        q << 1, 0, 1;
    } else {
        q = svd.matrixV().col(2);
    }
    st.Q << q[0], q[1], q[1], q[2];

    // assemble xi on the dense grid and project
    const int K = opt.samples;
    Eigen::VectorXcd vals(K);
    for (int j = 0; j < K; ++j) {
        double p1 = fd.psi(j, 0), p2 = fd.psi(j, 2);
        vals[j] = q[0] * p1 * p1 + 2 * q[1] * p1 * p2 + q[2] * p2 * p2;
    }
    TrigPoly prof = TrigPoly::from_samples(vals, std::min(K / 2 - 1, 400));
    prof = prof.real_part().trimmed(1e-12 * std::max(1.0, prof.max_abs()));
    double rescale = leading_sign(prof) / prof.max_abs();
    prof = prof * Complex(rescale, 0);
    st.Q *= rescale;
    st.profile = prof;

    st.zeros = find_zeros(prof, opt.zero_tol, opt.deriv_tol);
    bool has_simple = false, has_double = false;
    for (const auto& z : st.zeros) {
        has_simple |= z.multiplicity == TorusZero::Mult::Simple;
        has_double |= z.multiplicity == TorusZero::Mult::Double;
    }
    if (has_simple && has_double)
        throw ZeroResolutionError("stabilizer zero structure is mixed");
    st.kind = st.zeros.empty() ? Stabilizer::Kind::CaseI
              : has_simple     ? Stabilizer::Kind::CaseII
                               : Stabilizer::Kind::CaseIII;

    // hyperbolic operators (negative first integral of the real form) get the
    // purely imaginary stabilizer
    double Ireal = invariant_I(op, st.profile, &st.I_drift);
    st.imaginary = Ireal < -1e-9 * (1 + std::abs(Ireal));
    st.I = st.imaginary ? -Ireal : Ireal;
    return st;
}

Stabilizer normalize_stabilizer(const HillOperator& op, const Stabilizer& s) {
    Stabilizer out = s;
    if (s.kind == Stabilizer::Kind::CaseIII) {
        if (leading_sign(out.profile) < 0) out.profile = -out.profile;
        return out; // I = 0: convention fix only, no scaling possible
    }
    if (std::abs(s.I) < 1e-12)
        throw ZeroInvariant("cannot normalize a zero first integral to 2");
    double scale = std::sqrt(2.0 / std::abs(s.I));
    out.profile = s.profile * Complex(scale, 0);
    if (s.I < 0) out.imaginary = !s.imaginary; // multiply xi by i
    out.I = 2.0;
    double drift = 0;
    invariant_I(op, out.profile, &drift);
    out.I_drift = drift * scale * scale;
    return out;
}

KirillovPair kirillov_family(const KirillovFamily& f) {
    switch (f.c) {
    case KirillovFamily::Case::I: {
        if (f.a == 0) throw ParameterOutOfRange("case I requires a != 0");
        return {PeriodicFn(TrigPoly::constant(f.alpha)), TrigPoly::constant(f.a)};
    }
    case KirillovFamily::Case::II: {
        if (f.n < 1 || f.alpha < 0 || f.alpha >= 1)
            throw ParameterOutOfRange("case II requires n >= 1, 0 <= alpha < 1");
        const int n = f.n;
        const double al = f.alpha;
        auto u = [n, al](Complex z) {
            Complex s = std::sin(double(n) * z);
            Complex d = 1.0 + al * s;
            return 0.25 * double(n * n) * (1.0 + 6.0 * al * s + 4.0 * al * al * s * s) / (d * d);
        };
        auto du = [n, al](Complex z) {
            Complex s = std::sin(double(n) * z);
            Complex d = 1.0 + al * s;
            // d/ds of the bracket = 2 alpha (2 + alpha s) / (1+alpha s)^3
            return double(n) * std::cos(double(n) * z) * 0.5 * double(n * n) * al *
                   (2.0 + al * s) / (d * d * d);
        };
        TrigPoly xi = sin_poly(n) * (TrigPoly::constant(1.0) + sin_poly(n) * Complex(f.alpha, 0));
        return {PeriodicFn(u, du), xi * Complex(f.a, 0)};
    }
    case KirillovFamily::Case::III: {
        if (f.n < 1 || f.alpha < 0 || f.alpha >= 1)
            throw ParameterOutOfRange("case III requires n >= 1, 0 <= alpha < 1");
        const int n = f.n;
        const double al = f.alpha;
        auto v = [n, al](Complex z) {
            Complex s = std::sin(double(n) * z);
            Complex d = 1.0 + al * s;
            return 0.25 * double(n * n) *
                   ((al - 1) * (al - 1) + 2.0 * al * (3.0 - al) * s +
                    4.0 * al * al * s * s) /
                   (d * d);
        };
        auto dv = [n, al](Complex z) {
            Complex s = std::sin(double(n) * z);
            Complex d = 1.0 + al * s;
            return double(n) * std::cos(double(n) * z) * 0.5 * double(n * n) * al *
                   (1.0 + al) * ((2.0 - al) + al * s) / (d * d * d);
        };
        TrigPoly xi = (TrigPoly::constant(1.0) + sin_poly(n)) *
                      (TrigPoly::constant(1.0) + sin_poly(n) * Complex(f.alpha, 0));
        return {PeriodicFn(v, dv), xi * Complex(double(f.sign >= 0 ? 1 : -1), 0)};
    }
    }
    throw ParameterOutOfRange("unknown Kirillov case");
}

double stabilizer_ode_residual(const HillOperator& op, const TrigPoly& xi,
                               int samples) {
    const TrigPoly d1 = xi.derivative();
    const TrigPoly d3 = d1.derivative().derivative();
    PeriodicFn du = op.u.derivative();
    double worst = 0;
    for (int j = 0; j < samples; ++j) {
        double th = kTwoPi * xi.denom() * j / samples;
        Complex r = 0.5 * d3(th) + 2.0 * op.u(th) * d1(th) + du(th) * xi(th);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

} // namespace mlab
