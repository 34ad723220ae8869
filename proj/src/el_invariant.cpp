#include "mlab/el_invariant.hpp"

#include "mlab/contour.hpp"
#include "mlab/errors.hpp"
#include "mlab/quadrature.hpp"
#include "mlab/special_functions.hpp"

#include <cmath>

namespace mlab {

namespace {

// value of (1 + xi'^2/4)/xi (or xi'^2/(4 xi) when I = 0) at the profile peak
double peak_theta(const TrigPoly& p) {
    int K = std::max(256, 8 * p.degree());
    double best = -1e300, arg = 0;
    for (int j = 0; j < K; ++j) {
        double th = kTwoPi * p.denom() * j / K;
        double v = std::abs(p(th).real());
        if (v > best) {
            best = v;
            arg = th;
        }
    }
    return arg;
}

// a from the first-order system: a' = 2 V2 c with c = -xi'/2, anchored at the
// peak of the profile by the closed form.  Operating on the real profile; the
// unit factor is applied by the caller.
TrigPoly quadratic_coefficient_a(const SchrodingerOp& D, const TrigPoly& prof,
                                 Complex unit, double I) {
    TrigPoly v2 = D.V2.projection();
    TrigPoly c_prof = prof.derivative() * Complex(-0.5, 0);
    TrigPoly rhs = v2 * c_prof * Complex(2, 0);
    Complex drift = rhs.mean(); // ~0 in exact arithmetic
    TrigPoly prim = (rhs - TrigPoly::constant(drift)).antiderivative().first;
    double th0 = peak_theta(prof);
    // closed form at the anchor: a = (I/2 + xi'^2/4) / xi, xi = unit * prof
    Complex xi0 = unit * prof(th0);
    Complex xp0 = unit * prof.derivative()(th0);
    Complex a0 = (I / 2 + 0.25 * xp0 * xp0) / xi0;
    // prim is real-profile based: a(theta) = unit_a * [prof-part]; work fully
    // complex to keep the algebra case-uniform
    TrigPoly a = prim * unit + TrigPoly::constant(a0 - (prim * unit)(th0));
    return a;
}

} // namespace

double el_constraint_residual(const SchrodingerOp& D, const ELCoefficients& el,
                              int samples) {
    TrigPoly da = el.a.derivative(), db = el.b.derivative(), dc = el.c.derivative();
    TrigPoly dd = el.d.derivative(), de = el.e.derivative(), df = el.f.derivative();
    double worst = 0;
    for (int j = 0; j < samples; ++j) {
        double th = 2 * kTwoPi * j / samples;
        double V2 = D.V2(th), V1 = D.V1(th);
        Complex r1 = da(th) - 2.0 * V2 * el.c(th);
        Complex r2 = db(th) + 2.0 * el.c(th);
        Complex r3 = dc(th) + el.a(th) - V2 * el.b(th);
        Complex r4 = dd(th) - V1 * el.b(th) + el.e(th);
        Complex r5 = de(th) - V1 * el.c(th) - V2 * el.d(th);
        Complex r6 = df(th) - 0.5 * el.d(th) * V1;
        worst = std::max({worst, std::abs(r1), std::abs(r2), std::abs(r3),
                          std::abs(r4), std::abs(r5), std::abs(r6)});
    }
    return worst;
}

ELCoefficients el_coefficients(const SchrodingerOp& D, const VectorInvariant& inv) {
    Complex unit = inv.unit();
    const TrigPoly& p = inv.xi.profile;
    const double I = (inv.xi.kind == Stabilizer::Kind::CaseIII) ? 0.0 : inv.xi.I;

    ELCoefficients el;
    el.b = p * unit;
    el.c = p.derivative() * (unit * Complex(-0.5, 0));
    el.a = quadratic_coefficient_a(D, p, unit, I);
    el.d = inv.delta1 * (unit * Complex(-2.0, 0));
    TrigPoly v1 = D.V1.projection(), v0 = D.V0.projection();
    el.e = (v1 * p + inv.delta1.derivative() * Complex(2, 0)) * unit;
    // the stored zero-mean delta2: the additive constant of f is a trivial
    // shift of the invariant and is dropped with it
    el.f = (inv.delta2 + v0 * p * Complex(0.5, 0)) * (unit * Complex(2, 0));
    el.constraint_residual = el_constraint_residual(D, el);
    double scale = 1 + el.a.max_abs() + el.b.max_abs() + el.d.max_abs() + el.f.max_abs();
    if (el.constraint_residual > 1e-6 * scale)
        throw ConstraintViolation("EL coefficient system residual " +
                                  std::to_string(el.constraint_residual));
    return el;
}

VectorInvariant resonant_invariant(const SchrodingerOp& D, const OrbitClass& cls,
                                   const ClassifyOptions& opt) {
    if (cls.tag != OrbitClass::Tag::CiBis && cls.tag != OrbitClass::Tag::CiiiBis &&
        cls.tag != OrbitClass::Tag::Ciii)
        throw InconsistentInvariant("resonant_invariant needs a unipotent/bis class");

    HillOperator hop = D.hill();
    TrigPoly eta;
    if (cls.tag == OrbitClass::Tag::CiBis) {
        // eta = 1 - cos(2 n theta - sigma)
        eta = TrigPoly::constant(1.0) -
              (cos_poly(2 * cls.n) * Complex(std::cos(cls.sigma), 0) +
               sin_poly(2 * cls.n) * Complex(std::sin(cls.sigma), 0));
    } else {
        Stabilizer st = periodic_stabilizer(hop, {opt.rk_tol});
        if (st.kind != Stabilizer::Kind::CaseIII)
            throw InconsistentInvariant("operator is not of unipotent type");
        eta = st.profile;
        // match the literal family scale (1 + sin)(1 + alpha sin): peak 2(1+alpha)
        if (std::isfinite(cls.alpha) && cls.alpha >= 0) {
            double peak = eta(peak_theta(eta)).real();
            eta = eta * Complex(2 * (1 + cls.alpha) / peak, 0);
        }
    }

    VectorInvariant inv;
    inv.xi.profile = eta;
    inv.xi.imaginary = true;
    inv.xi.I = 0;
    inv.xi.kind = Stabilizer::Kind::CaseIII;
    inv.xi.zeros = find_zeros(eta, 1e-8, 1e-5);

    // delta1: kernel-orthogonal periodic solution with the real eta
    TrigPoly v1 = D.V1.projection();
    TrigPoly deta = eta.derivative();
    TrigPoly d1 = TrigPoly::constant(0.0);
    if (v1.max_abs() > 1e-14) {
        TrigPoly r = (v1.derivative() * eta + v1 * deta * Complex(1.5, 0)) *
                     Complex(-0.5, 0);
        int sign = (v1.denom() == 2) ? -1 : 1;
        d1 = solve_hill_linear(hop, PeriodicFn(r), sign, opt.rk_tol);
    }
    inv.delta1 = d1;

    TrigPoly prod = v1 * d1;
    Complex pm = prod.mean();
    TrigPoly prim = (prod - TrigPoly::constant(pm)).antiderivative().first;
    TrigPoly d2full = prim * Complex(-0.5, 0) - D.V0.projection() * eta * Complex(0.5, 0);
    Complex mean2 = d2full.mean();
    inv.delta2 = d2full - TrigPoly::constant(mean2);
    inv.delta2_offset = mean2.real();
    return inv;
}

VectorInvariant invariant_for(const SchrodingerOp& D, const OrbitClass& cls,
                              const ClassifyOptions& opt) {
    switch (cls.tag) {
    case OrbitClass::Tag::Ci:
        if (std::abs(cls.alpha) > 1e-9)
            return vector_invariant(D, opt, /*allow_nongeneric=*/true);
        else {
            // alpha = 0: zero-free profile with I = 0, peak-normalized
            Stabilizer st = periodic_stabilizer(D.hill(), {opt.rk_tol});
            VectorInvariant inv;
            inv.xi = st;
            inv.xi.imaginary = true;
            inv.xi.I = 0;
            double peak = st.profile(peak_theta(st.profile)).real();
            inv.xi.profile = st.profile * Complex(1.0 / peak, 0);
            inv.delta1 = TrigPoly::constant(0.0);
            inv.delta2 = TrigPoly::constant(0.0);
            return inv;
        }
    case OrbitClass::Tag::Cii:
        return vector_invariant(D, opt);
    case OrbitClass::Tag::Ciii:
    case OrbitClass::Tag::CiBis:
    case OrbitClass::Tag::CiiiBis:
        return resonant_invariant(D, cls, opt);
    }
    throw InconsistentInvariant("unknown class");
}

double pinney_check(const PeriodicFn& V2, const Stabilizer& xi, int samples_per_piece) {
    const TrigPoly poly = xi.xi_poly();
    const TrigPoly d1 = poly.derivative();
    const TrigPoly d2 = d1.derivative();
    const double I = xi.I;

    std::vector<bool> side(xi.zeros.size(), true);
    Contour c = build_contour(xi.zeros, side, kTwoPi * poly.denom());

    Complex zeta_prev(0, 0);
    bool first = true;
    double worst = 0;
    for (const auto& piece : c.pieces) {
        for (int j = 0; j <= samples_per_piece; ++j) {
            double t = double(j) / samples_per_piece;
            Complex z;
            if (piece.kind == ContourPiece::Kind::RealSegment) {
                if (piece.b <= piece.a) continue;
                z = Complex(piece.a + t * (piece.b - piece.a), 0);
            } else {
                double phi0 = piece.upper ? M_PI : -M_PI;
                z = piece.center + piece.radius * std::exp(Complex(0, phi0 * (1 - t)));
            }
            Complex xv = poly.eval(z);
            if (std::abs(xv) < 1e-13)
                throw BranchCut("xi vanishes on the contour");
            Complex zeta = std::sqrt(xv);
            if (first) {
                if (zeta.real() < 0) zeta = -zeta; // start in the right half-plane
                first = false;
            } else if (std::abs(zeta - zeta_prev) > std::abs(zeta + zeta_prev)) {
                zeta = -zeta;
            }
            zeta_prev = zeta;
            // zeta'' = xi''/(2 zeta) - xi'^2/(4 zeta^3)
            Complex z3 = zeta * zeta * zeta;
            Complex resid = d2.eval(z) / (2.0 * zeta) - d1.eval(z) * d1.eval(z) / (4.0 * z3) +
                            V2.eval(z) * zeta - (I / 2) / z3;
            worst = std::max(worst, std::abs(resid));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------

const char* monodromy_kind_name(MonodromySpec::Kind k) {
    switch (k) {
    case MonodromySpec::Kind::DiscreteElliptic: return "discrete-elliptic";
    case MonodromySpec::Kind::ContinuousHyperbolic: return "continuous-hyperbolic";
    case MonodromySpec::Kind::ContinuousUnipotent: return "continuous-unipotent";
    case MonodromySpec::Kind::ResonantIBis: return "resonant-i-bis";
    case MonodromySpec::Kind::ResonantIIIBis: return "resonant-iii-bis";
    }
    return "?";
}

namespace {

Complex contour_integral_inv(const TrigPoly& eta) {
    return xi_integral(eta * Complex(0, 1), XiMode::ContourUnipotent);
}

// mean over theta in [0, 2pi) of an analytic ratio along the real axis
double real_mean(const std::function<double(double)>& f, int K = 2048) {
    double acc = 0;
    for (int j = 0; j < K; ++j) acc += f(kTwoPi * (j + 0.3719) / K);
    return acc / K;
}

} // namespace

MonodromySpec monodromy_spec(const OrbitClass& cls, const VectorInvariant& inv) {
    MonodromySpec spec;
    spec.gamma = cls.gamma;
    spec.gamma_tilde = cls.gamma;
    const TrigPoly& p = inv.xi.profile;

    switch (cls.tag) {
    case OrbitClass::Tag::Ci: {
        if (cls.alpha > 1e-9) {
            // oscillator side (covers the +-Id non-generic constants too)
            if (inv.xi.imaginary || inv.xi.zeros.size())
                throw InconsistentInvariant("elliptic class needs a real zero-free xi");
            spec.kind = MonodromySpec::Kind::DiscreteElliptic;
            Complex T = xi_integral(p, XiMode::Direct);
            spec.T = T;
            spec.a = T.real() / kTwoPi;
        } else if (cls.alpha < -1e-9) {
            spec.kind = MonodromySpec::Kind::ContinuousHyperbolic;
            spec.T = xi_integral(p * Complex(0, 1), XiMode::Direct);
        } else {
            // alpha = 0: conjugate to the free operator, eta constant
            spec.kind = MonodromySpec::Kind::ContinuousUnipotent;
            TrigPoly eta = p * Complex(1.0 / p(peak_theta(p)).real(), 0);
            spec.T = xi_integral(eta * Complex(0, 1), XiMode::Direct);
        }
        return spec;
    }
    case OrbitClass::Tag::Cii: {
        if (!inv.xi.imaginary)
            throw InconsistentInvariant("hyperbolic class needs an imaginary xi");
        spec.kind = MonodromySpec::Kind::ContinuousHyperbolic;
        spec.T = xi_integral(p * Complex(0, 1), XiMode::PrincipalValue);
        return spec;
    }
    case OrbitClass::Tag::Ciii: {
        spec.kind = MonodromySpec::Kind::ContinuousUnipotent;
        // peak normalization: xi(theta*) = i at the critical point of eta
        TrigPoly eta = p * Complex(1.0 / p(peak_theta(p)).real(), 0);
        spec.T = contour_integral_inv(eta);
        return spec;
    }
    case OrbitClass::Tag::CiBis: {
        spec.kind = MonodromySpec::Kind::ResonantIBis;
        const TrigPoly& eta = p; // 1 - cos(2 n theta - sigma)
        const TrigPoly d = inv.delta1 * Complex(-2, 0);
        spec.T = contour_integral_inv(eta);
        // k' - k = mean(-f + d^2/(4 eta)) / 2 with the zero-mean f convention;
        // d^2/eta is analytic (d vanishes where eta does)
        TrigPoly d2 = d * d;
        double mean_d2_over_eta =
            real_mean([&](double th) { return (d2(th) / eta(th)).real(); });
        spec.kshift = 0.125 * mean_d2_over_eta;
        // gamma~ = gamma + (1/(8 pi)) int_Gamma (d/eta)^2
        std::vector<bool> side(inv.xi.zeros.size(), true);
        Contour c = build_contour(inv.xi.zeros, side, kTwoPi * eta.denom());
        Complex g2 = integrate_contour(c, [&](Complex z) {
            Complex r = d.eval(z) / eta.eval(z);
            return r * r;
        });
        spec.gamma_tilde = cls.gamma + g2.real() / (8 * M_PI);
        return spec;
    }
    case OrbitClass::Tag::CiiiBis: {
        spec.kind = MonodromySpec::Kind::ResonantIIIBis;
        const TrigPoly& eta = p;
        const TrigPoly d = inv.delta1 * Complex(-2, 0);
        const TrigPoly dd = d.derivative();
        const TrigPoly deta = eta.derivative();
        spec.T = contour_integral_inv(eta);

        // the d-identity: (d/f)' = C (eta - C_alpha / eta) with f the smooth
        // signed square root of eta; evaluate eta (C eta - g) / C pointwise
        // along the real segments of the contour, g = (d/f)'
        double C = cls.C;
        const int nn = cls.n;
        const double al = cls.alpha;
        auto froot = [nn, al](double th) {
            return std::sqrt(1 + al * std::sin(nn * th)) *
                   std::cos(M_PI / 4 - nn * th / 2.0);
        };
        std::vector<bool> side(inv.xi.zeros.size(), true);
        Contour c = build_contour(inv.xi.zeros, side, kTwoPi * eta.denom());
        double lo = 1e300, hi = -1e300, acc = 0;
        int count = 0;
        for (const auto& piece : c.pieces) {
            if (piece.kind != ContourPiece::Kind::RealSegment) continue;
            int S = 48;
            for (int j = 0; j <= S; ++j) {
                double th = piece.a + (piece.b - piece.a) * j / S;
                double ev = eta(th).real(), dv = d(th).real();
                double g = (dd(th).real() - 0.5 * deta(th).real() / ev * dv) / froot(th);
                double ca = ev * (C * ev - g) / C;
                lo = std::min(lo, ca);
                hi = std::max(hi, ca);
                acc += ca;
                ++count;
            }
        }
        spec.C_alpha = acc / count;
        spec.identity_residual = hi - lo;

        // gamma~ = gamma + (1/2pi) int_Gamma (-f/eta + (d/eta)^2/2), with f the
        // zero-mean primitive of d V1 / 2 and V1 = C * sqrt(eta) rebuilt from
        // the class parameters
        const int n = cls.n;
        const double alpha = cls.alpha;
        TrigPoly fhat = TrigPoly::fit(
            [n, alpha](double th) {
                return Complex(std::sqrt(1 + alpha * std::sin(n * th)) *
                                   std::cos(M_PI / 4 - n * th / 2.0),
                               0);
            },
            1e-13, 256, 2);
        TrigPoly integrand = d * fhat * Complex(0.5 * C, 0);
        TrigPoly fel = (integrand - TrigPoly::constant(integrand.mean()))
                           .antiderivative()
                           .first;
        Complex gint = integrate_contour(c, [&](Complex z) {
            Complex ev = eta.eval(z);
            Complex r = d.eval(z) / ev;
            return -fel.eval(z) / ev + 0.5 * r * r;
        });
        spec.gamma_tilde = cls.gamma + gint.real() / kTwoPi;
        return spec;
    }
    }
    throw InconsistentInvariant("unknown class");
}

// ---------------------------------------------------------------------------

ModelEigenfunction eigenfunction(const OrbitClass& cls, const VectorInvariant& inv,
                                 const EigenLabel& label) {
    ModelEigenfunction out;
    out.label = label;
    const TrigPoly p = inv.xi.profile;
    const TrigPoly dp = p.derivative();

    const bool elliptic_ci = cls.tag == OrbitClass::Tag::Ci && cls.alpha > 1e-9;
    const bool unipotent_ci =
        cls.tag == OrbitClass::Tag::Ci && std::abs(cls.alpha) <= 1e-9;

    if (elliptic_ci) {
        if (label.n < 0) throw LabelOutOfDomain("Hermite index must be >= 0");
        out.family = ModelEigenfunction::Family::Hermite;
        out.unit_l2 = true;
        int n = label.n;
        out.eval = [p, dp, n](double th, double x) -> Complex {
            double xi = p(th).real(), xid = dp(th).real();
            double y = x / std::sqrt(xi);
            Complex phase = std::exp(Complex(0, 0.25 * (xid / xi) * x * x));
            return std::pow(xi, -0.25) * phase * hermite_function(n, y);
        };
        return out;
    }

    switch (cls.tag) {
    case OrbitClass::Tag::Ci:
        if (unipotent_ci) {
            if (label.k <= 0) throw LabelOutOfDomain("plane-wave label requires k > 0");
            out.family = ModelEigenfunction::Family::PlaneWave;
            double k = label.k;
            double sgn = label.sign >= 0 ? 1.0 : -1.0;
            TrigPoly q = p, dq = dp;
            out.eval = [q, dq, k, sgn](double th, double x) -> Complex {
                double eta = q(th).real(), etad = dq(th).real();
                return std::exp(Complex(0, 0.25 * (etad / eta) * x * x)) *
                       std::exp(Complex(0, sgn * std::sqrt(2 * k / eta) * x));
            };
            return out;
        }
        [[fallthrough]];
    case OrbitClass::Tag::Cii: {
        // hyperbolic: confluent hypergeometric even/odd pair
        if (!inv.xi.imaginary)
            throw InconsistentInvariant("hyperbolic family needs imaginary xi");
        out.family = ModelEigenfunction::Family::HypergeometricEvenOdd;
        double k = label.k;
        bool even = label.sign >= 0;
        TrigPoly q = p, dq = dp;
        out.eval = [q, dq, k, even](double th, double x) -> Complex {
            double eta = q(th).real(), etad = dq(th).real();
            // the (2 i eta)^{1/4} factor carries the theta dependence the
            // D-action identity needs
            Complex pref = std::sqrt(2.0) * std::exp(k / 4) *
                           std::pow(Complex(0, 2 * eta), 0.25) *
                           std::exp(Complex(0, 0.25 * (etad / eta) * x * x)) *
                           std::exp(Complex(0, -0.5 * x * x / eta));
            Complex z(0, x * x / eta);
            if (even) {
                Complex g = gamma_fn(Complex(0.25, k / 2));
                return pref / g * hyp1f1(Complex(0.25, 0.5 * k), Complex(0.5, 0), z);
            }
            Complex g = gamma_fn(Complex(0.75, k / 2));
            return 2.0 * pref / g * x *
                   hyp1f1(Complex(0.75, 0.5 * k), Complex(1.5, 0), z);
        };
        return out;
    }
    case OrbitClass::Tag::Ciii: {
        if (label.k <= 0) throw LabelOutOfDomain("plane-wave label requires k > 0");
        out.family = ModelEigenfunction::Family::PlaneWave;
        double k = label.k;
        double sgn = label.sign >= 0 ? 1.0 : -1.0;
        TrigPoly q = p, dq = dp;
        out.eval = [q, dq, k, sgn](double th, double x) -> Complex {
            double eta = q(th).real(), etad = dq(th).real();
            return std::exp(Complex(0, 0.25 * (etad / eta) * x * x)) *
                   std::exp(Complex(0, sgn * std::sqrt(2 * k / eta) * x));
        };
        return out;
    }
    case OrbitClass::Tag::CiBis: {
        if (label.k <= 0) throw LabelOutOfDomain("(i)bis label requires k > 0");
        out.family = ModelEigenfunction::Family::IBisWave;
        double kp = label.k; // interpreted as the shifted k'
        double sgn = label.sign >= 0 ? 1.0 : -1.0;
        TrigPoly q = p, dq = dp, d = inv.delta1 * Complex(-2, 0);
        out.eval = [q, dq, d, kp, sgn](double th, double x) -> Complex {
            double eta = q(th).real(), etad = dq(th).real(), dv = d(th).real();
            return std::exp(Complex(0, 0.25 * (etad / eta) * x * x -
                                           0.5 * (dv / eta) * x)) *
                   std::exp(Complex(0, sgn * std::sqrt(2 * kp / eta) * x));
        };
        return out;
    }
    case OrbitClass::Tag::CiiiBis: {
        out.family = ModelEigenfunction::Family::Airy;
        MonodromySpec spec = monodromy_spec(cls, inv);
        const double k = label.k;
        const double Ca = spec.C_alpha;
        const int n = cls.n;
        const double alpha = cls.alpha, C = cls.C;
        TrigPoly fhat = TrigPoly::fit(
            [n, alpha](double th) {
                return Complex(std::sqrt(1 + alpha * std::sin(n * th)) *
                                   std::cos(M_PI / 4 - n * th / 2.0),
                               0);
            },
            1e-13, 256, 2);
        TrigPoly d = inv.delta1 * Complex(-2, 0);
        TrigPoly integrand = d * fhat * Complex(0.5 * C, 0);
        TrigPoly fel = (integrand - TrigPoly::constant(integrand.mean()))
                           .antiderivative()
                           .first;
        TrigPoly q = p, dq = dp;
        // the Airy scaling carries the signed ratio s = fhat / sqrt(eta)
        // (= +-1/sqrt(2) segment-wise): A = (C C_alpha s)^{1/3} eta^{-1/2}
        out.eval = [q, dq, d, fel, fhat, k, Ca, C](double th, double x) -> Complex {
            double eta = q(th).real(), etad = dq(th).real(), dv = d(th).real();
            double fv = fel(th).real();
            double sratio = fhat(th).real() / std::sqrt(eta);
            double cb = std::cbrt(C * Ca * sratio);
            double arg = x * cb / std::sqrt(eta) -
                         (-fv + 2 * k + 0.25 * dv * dv / eta) / (cb * cb);
            return std::exp(Complex(0, 0.25 * (etad / eta) * x * x -
                                           0.5 * (dv / eta) * x)) *
                   airy_ai(arg) / std::sqrt(eta);
        };
        return out;
    }
    }
    throw LabelOutOfDomain("unsupported class/label combination");
}

} // namespace mlab
