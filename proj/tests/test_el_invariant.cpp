#include "mlab/el_invariant.hpp"
#include "mlab/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mlab;

namespace {

SchrodingerOp const_op(double alpha, double gamma) {
    return {PeriodicFn(TrigPoly::constant(alpha)), PeriodicFn(TrigPoly::constant(0.0)),
            PeriodicFn(TrigPoly::constant(gamma))};
}

// apply the operator (1/2)[a x^2 - b dxx - i c (x d + d x) + d(-i d) + e x + f]
// to a smooth closure by finite differences in x
Complex apply_el(const ELCoefficients& el, const std::function<Complex(double, double)>& f,
                 double th, double x) {
    const double h = 5e-4;
    Complex f0 = f(th, x);
    Complex fp = f(th, x + h), fm = f(th, x - h);
    Complex fpp = f(th, x + 2 * h), fmm = f(th, x - 2 * h);
    Complex d1 = (-fpp + 8.0 * fp - 8.0 * fm + fmm) / (12 * h);
    Complex d2 = (-fpp + 16.0 * fp - 30.0 * f0 + 16.0 * fm - fmm) / (12 * h * h);
    Complex a = el.a(th), b = el.b(th), c = el.c(th), dd = el.d(th), e = el.e(th),
            ff = el.f(th);
    // -i c (x d + d x) = -i c (2 x d + 1)
    return 0.5 * (a * x * x * f0 - b * d2 - Complex(0, 1) * c * (2.0 * x * d1 + f0) +
                  dd * Complex(0, -1) * d1 + e * x * f0 + ff * f0);
}

Complex apply_D(const SchrodingerOp& D, const std::function<Complex(double, double)>& f,
                double th, double x) {
    const double ht = 1e-4, hx = 5e-4;
    Complex dth = (-f(th + 2 * ht, x) + 8.0 * f(th + ht, x) - 8.0 * f(th - ht, x) +
                   f(th - 2 * ht, x)) /
                  (12 * ht);
    Complex dxx = (-f(th, x + 2 * hx) + 16.0 * f(th, x + hx) - 30.0 * f(th, x) +
                   16.0 * f(th, x - hx) - f(th, x - 2 * hx)) /
                  (12 * hx * hx);
    return Complex(0, -2) * dth - dxx +
           (D.V2(th) * x * x + D.V1(th) * x + D.V0(th)) * f(th, x);
}

} // namespace

TEST_CASE("el_coefficients on the constant operator") {
    double alpha = 0.3, gamma = 0.8;
    SchrodingerOp D = const_op(alpha, gamma);
    VectorInvariant inv = vector_invariant(D);
    ELCoefficients el = el_coefficients(D, inv);
    CHECK(el.a(1.0).real() == doctest::Approx(std::sqrt(alpha)).epsilon(1e-8));
    CHECK(el.b(1.0).real() == doctest::Approx(1 / std::sqrt(alpha)).epsilon(1e-8));
    CHECK(std::abs(el.c(1.0)) < 1e-9);
    CHECK(std::abs(el.d(1.0)) < 1e-9);
    CHECK(std::abs(el.e(1.0)) < 1e-9);
    CHECK(el.f(1.0).real() == doctest::Approx(gamma / std::sqrt(alpha)).epsilon(1e-8));
    CHECK(el.constraint_residual < 1e-8);
}

TEST_CASE("el_coefficients constraints on random generic operators") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 3; ++trial) {
        TrigPoly V2 = TrigPoly::real_series(0.35 + 0.05 * u(rng), {0.04 * u(rng)},
                                            {0.04 * u(rng)});
        TrigPoly V1 = TrigPoly::real_series(0.2 * u(rng), {0.3 * u(rng)}, {0.2 * u(rng)});
        TrigPoly V0 = TrigPoly::real_series(u(rng), {0.3 * u(rng)}, {0.2 * u(rng)});
        SchrodingerOp D{PeriodicFn(V2), PeriodicFn(V1), PeriodicFn(V0)};
        VectorInvariant inv = vector_invariant(D);
        ELCoefficients el = el_coefficients(D, inv);
        CHECK(el.constraint_residual < 1e-7);
        // the quadratic block against the closed form away from zeros
        double th = 0.93;
        Complex xi = inv.unit() * inv.xi.profile(th);
        Complex xid = inv.unit() * inv.xi.profile.derivative()(th);
        CHECK(std::abs(el.a(th) - (1.0 + 0.25 * xid * xid) / xi) < 1e-7);
    }
}

TEST_CASE("pinney equation") {
    SUBCASE("constant") {
        SchrodingerOp D = const_op(0.3, 0.0);
        VectorInvariant inv = vector_invariant(D);
        CHECK(pinney_check(D.V2, inv.xi) < 1e-8);
    }
    SUBCASE("hyperbolic family along the zero-avoiding contour") {
        auto fam = kirillov_family({KirillovFamily::Case::II, 1, 0.5, 1.0});
        SchrodingerOp D{fam.u, PeriodicFn(TrigPoly::constant(0.0)),
                        PeriodicFn(TrigPoly::constant(0.0))};
        VectorInvariant inv = vector_invariant(D);
        CHECK(pinney_check(D.V2, inv.xi) < 1e-7);
    }
    SUBCASE("covariance under a time reparametrization") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> u(-0.08, 0.08);
        GroupElement g;
        g.p = TrigPoly::real_series(0.0, {u(rng)}, {u(rng)});
        SchrodingerOp D = const_op(0.4, 0.0);
        SchrodingerOp Dt = act(g, D);
        VectorInvariant inv = vector_invariant(Dt);
        CHECK(pinney_check(Dt.V2, inv.xi) < 1e-6);
    }
}

TEST_CASE("monodromy_spec basics") {
    SUBCASE("elliptic constant a = 1") {
        SchrodingerOp D = const_op(1.0, 0.0);
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        MonodromySpec spec = monodromy_spec(cls, inv);
        CHECK(spec.kind == MonodromySpec::Kind::DiscreteElliptic);
        CHECK(spec.a == doctest::Approx(1.0).epsilon(1e-9));
        for (int n : {0, 1, 2}) {
            CHECK(spec.lambda_n(n) == doctest::Approx(-M_PI * (2 * n + 1)).epsilon(1e-9));
            Complex mult = std::exp(Complex(0, spec.lambda_n(n)));
            CHECK(std::abs(mult - Complex(-1, 0)) < 1e-9);
        }
    }
    SUBCASE("hyperbolic constant has purely imaginary T") {
        SchrodingerOp D = const_op(-0.36, 0.0);
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        MonodromySpec spec = monodromy_spec(cls, inv);
        CHECK(spec.kind == MonodromySpec::Kind::ContinuousHyperbolic);
        CHECK(std::abs(spec.T.real()) < 1e-9);
        // eta = 1/0.6: T = -i 2 pi 0.6
        CHECK(spec.T.imag() == doctest::Approx(-kTwoPi * 0.6).epsilon(1e-8));
        CHECK(std::abs(std::abs(spec.multiplier(0.7)) - 1) < 1e-9);
    }
    SUBCASE("case II has purely imaginary T matching the Floquet rate") {
        auto fam = kirillov_family({KirillovFamily::Case::II, 1, 0.5, 1.0});
        SchrodingerOp D{fam.u, PeriodicFn(TrigPoly::constant(0.0)),
                        PeriodicFn(TrigPoly::constant(0.0))};
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        MonodromySpec spec = monodromy_spec(cls, inv);
        CHECK(std::abs(spec.T.real()) < 1e-8);
        // |log larger eigenvalue| = pi n alpha / sqrt(1 - alpha^2) mod pi
        double expect = M_PI * 0.5 / std::sqrt(0.75);
        double got = std::abs(spec.T.imag());
        double dist = std::fmod(std::abs(got - expect), M_PI);
        dist = std::min(dist, M_PI - dist);
        CHECK(dist < 1e-7);
    }
    SUBCASE("(i)bis shift constant") {
        double C = 0.16;
        TrigPoly V1 = cos_poly(1) * Complex(C, 0);
        SchrodingerOp D{PeriodicFn(TrigPoly::constant(1.0)), PeriodicFn(V1),
                        PeriodicFn(TrigPoly::constant(0.0))};
        OrbitClass cls = classify_orbit(D);
        REQUIRE(cls.tag == OrbitClass::Tag::CiBis);
        VectorInvariant inv = invariant_for(D, cls);
        MonodromySpec spec = monodromy_spec(cls, inv);
        CHECK(spec.kshift == doctest::Approx(3 * std::pow(C / 16.0, 2)).epsilon(1e-6));
        CHECK(std::abs(spec.T.real()) < 1e-8);
    }
    SUBCASE("(iii)bis identity constant is theta-independent") {
        const double alpha = 0.5;
        auto fam = kirillov_family({KirillovFamily::Case::III, 1, alpha, 1.0});
        TrigPoly f = TrigPoly::fit(
            [alpha](double th) {
                return Complex(std::sqrt(1 + alpha * std::sin(th)) *
                                   std::cos(M_PI / 4 - th / 2),
                               0);
            },
            1e-13, 64, 2);
        SchrodingerOp D{fam.u, PeriodicFn(f), PeriodicFn(TrigPoly::constant(0.0))};
        OrbitClass cls = classify_orbit(D);
        REQUIRE(cls.tag == OrbitClass::Tag::CiiiBis);
        VectorInvariant inv = invariant_for(D, cls);
        MonodromySpec spec = monodromy_spec(cls, inv);
        CHECK(spec.identity_residual < 1e-6 * (1 + std::abs(spec.C_alpha)));
        MESSAGE("pipeline C_alpha(0.5) = ", spec.C_alpha);
    }
}

TEST_CASE("eigenfunction families") {
    SUBCASE("ground state of the unit oscillator") {
        SchrodingerOp D = const_op(1.0, 0.0);
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        ModelEigenfunction h0 = eigenfunction(cls, inv, {0, 0, +1});
        // profile proportional to exp(-x^2/2)
        double r = h0.eval(0, 0.0).real() / std::exp(0.0);
        for (double x : {0.5, 1.0, 2.0}) {
            CHECK(h0.eval(0, x).real() ==
                  doctest::Approx(r * std::exp(-x * x / 2)).epsilon(1e-10));
        }
    }
    SUBCASE("Hermite states satisfy the quadratic EL eigenrelation") {
        SchrodingerOp D = const_op(0.49, 0.3);
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        ELCoefficients el = el_coefficients(D, inv);
        // the (n + 1/2) relation is for the quadratic block EL(xi); the
        // linear block vanishes here except for the constant f, which only
        // shifts the spectrum
        el.f = TrigPoly::constant(0.0);
        for (int n : {0, 1, 3}) {
            ModelEigenfunction hn = eigenfunction(cls, inv, {n, 0, +1});
            double worst = 0;
            for (double th : {0.0, 1.3}) {
                for (double x : {-2.0, 0.4, 1.7}) {
                    Complex lhs = apply_el(el, hn.eval, th, x);
                    Complex rhs = (n + 0.5) * hn.eval(th, x);
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
            }
            CHECK(worst < 1e-6);
        }
    }
    SUBCASE("hyperbolic even/odd D-action identities") {
        auto fam = kirillov_family({KirillovFamily::Case::II, 1, 0.4, 1.0});
        SchrodingerOp D{fam.u, PeriodicFn(TrigPoly::constant(0.0)),
                        PeriodicFn(TrigPoly::constant(0.0))};
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        TrigPoly dp = inv.xi.profile.derivative();
        for (double k : {0.35, 1.1}) {
            for (int sign : {+1, -1}) {
                ModelEigenfunction psi = eigenfunction(cls, inv, {0, k, sign});
                double worst = 0;
                for (double th : {0.8, 2.0}) {
                    double eta = inv.xi.profile(th).real();
                    double etad = dp(th).real();
                    Complex mult = (sign > 0)
                                       ? Complex(2 * k / eta, -etad / eta)
                                       : Complex(2 * k / eta, -2 * etad / eta);
                    for (double x : {-1.1, 0.6, 2.3}) {
                        Complex lhs = apply_D(D, psi.eval, th, x);
                        Complex rhs = mult * psi.eval(th, x);
                        worst = std::max(worst,
                                         std::abs(lhs - rhs) /
                                             std::max(1.0, std::abs(rhs)));
                    }
                }
                CHECK(worst < 1e-6);
            }
        }
    }
    SUBCASE("unipotent plane waves") {
        // eta = 1: free operator, psi = e^{+-i sqrt(2k) x}
        SchrodingerOp D = const_op(0.0, 0.0);
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        ModelEigenfunction psi = eigenfunction(cls, inv, {0, 0.8, +1});
        for (double x : {-1.0, 0.3, 2.0}) {
            Complex expect = std::exp(Complex(0, std::sqrt(1.6) * x));
            CHECK(std::abs(psi.eval(0.9, x) - expect) < 1e-9);
        }
    }
    SUBCASE("(i)bis wave D-action identity") {
        double C = 0.4;
        TrigPoly V1 = cos_poly(1) * Complex(C, 0);
        SchrodingerOp D{PeriodicFn(TrigPoly::constant(1.0)), PeriodicFn(V1),
                        PeriodicFn(TrigPoly::constant(0.0))};
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        TrigPoly d = inv.delta1 * Complex(-2, 0);
        TrigPoly dp = inv.xi.profile.derivative();
        double kp = 0.9;
        for (int sign : {+1, -1}) {
            ModelEigenfunction psi = eigenfunction(cls, inv, {0, kp, sign});
            double worst = 0;
            for (double th : {0.9, 2.4}) {
                double eta = inv.xi.profile(th).real();
                double etad = dp(th).real();
                double dv = d(th).real();
                Complex mult =
                    Complex(2 * kp / eta + 0.25 * dv * dv / (eta * eta) -
                                sign * dv * std::pow(eta, -1.5) * std::sqrt(2 * kp),
                            -0.5 * etad / eta) +
                    Complex(cls.gamma, 0);
                for (double x : {-0.9, 0.5, 1.6}) {
                    Complex lhs = apply_D(D, psi.eval, th, x);
                    Complex rhs = mult * psi.eval(th, x);
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
            }
            CHECK(worst < 1e-5);
        }
    }
    SUBCASE("(iii)bis Airy D-action identity") {
        const double alpha = 0.5;
        auto fam = kirillov_family({KirillovFamily::Case::III, 1, alpha, 1.0});
        TrigPoly f = TrigPoly::fit(
            [alpha](double th) {
                return Complex(std::sqrt(1 + alpha * std::sin(th)) *
                                   std::cos(M_PI / 4 - th / 2),
                               0);
            },
            1e-13, 64, 2);
        SchrodingerOp D{fam.u, PeriodicFn(f), PeriodicFn(TrigPoly::constant(0.0))};
        OrbitClass cls = classify_orbit(D);
        VectorInvariant inv = invariant_for(D, cls);
        TrigPoly d = inv.delta1 * Complex(-2, 0);
        TrigPoly dp = inv.xi.profile.derivative();
        // f coefficient of the invariant (zero-mean primitive of d V1 / 2)
        TrigPoly v1 = D.V1.projection();
        TrigPoly integrand = d * v1 * Complex(0.5, 0);
        TrigPoly fel =
            (integrand - TrigPoly::constant(integrand.mean())).antiderivative().first;
        double k = 0.6;
        ModelEigenfunction psi = eigenfunction(cls, inv, {0, k, +1});
        double worst = 0;
        for (double th : {0.7, 2.1}) {
            double eta = inv.xi.profile(th).real();
            double etad = dp(th).real();
            double dv = d(th).real(), fv = fel(th).real();
            Complex mult = Complex(2 * k / eta + 0.5 * dv * dv / (eta * eta) -
                                       fv / eta,
                                   0.5 * etad / eta) +
                           Complex(cls.gamma, 0);
            for (double x : {-0.8, 0.4, 1.2}) {
                Complex lhs = apply_D(D, psi.eval, th, x);
                Complex rhs = mult * psi.eval(th, x);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
        CHECK(worst < 1e-5);
    }
}
