#include "mlab/svaction.hpp"

#include "mlab/contour.hpp"
#include "mlab/errors.hpp"
#include "mlab/ode.hpp"
#include "mlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mlab {

namespace {

constexpr int kGridK = 1024;

double l2_product(const TrigPoly& f, const TrigPoly& g, int samples = 1024) {
    // integral over the common full period, normalized to [0, 4pi] so that
    // mixed-parity pairings are unambiguous
    double acc = 0;
    for (int j = 0; j < samples; ++j) {
        double th = 2 * kTwoPi * j / samples;
        acc += (f(th) * g(th)).real();
    }
    return acc * 2 * kTwoPi / samples;
}

} // namespace

bool GroupElement::valid(double* min_slope) const {
    TrigPoly dp = p.derivative();
    double lo = 1e300;
    int K = std::max(256, 8 * p.degree());
    for (int j = 0; j < K; ++j) lo = std::min(lo, 1 + dp(kTwoPi * j / K).real());
    if (min_slope) *min_slope = lo;
    return lo > 0;
}

GroupElement identity_element() { return GroupElement{}; }

TrigPoly invert_diffeo(const TrigPoly& p, int max_degree, double* tail_out) {
    GroupElement g{p, {}, {}};
    double slope = 0;
    if (!g.valid(&slope))
        throw NotADiffeomorphism("phi' reaches " + std::to_string(slope));
    TrigPoly dp = p.derivative();
    auto inv_at = [&](double th) {
        // solve x + p(x) = th; phi' > 0 makes Newton from x = th safe
        double x = th;
        for (int it = 0; it < 100; ++it) {
            double fx = x + p(x).real() - th;
            double dfx = 1 + dp(x).real();
            double step = fx / dfx;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        return Complex(x - th, 0);
    };
    return TrigPoly::fit(inv_at, 1e-13, max_degree, 1, tail_out);
}

namespace {

// displacement of phi1 o phi2
TrigPoly compose_displacement(const TrigPoly& p1, const TrigPoly& p2,
                              int max_degree = 256) {
    return TrigPoly::fit(
        [&](double th) {
            double inner = th + p2(th).real();
            return p2(th) + p1(inner);
        },
        1e-13, max_degree, 1);
}

// pullback of a nilpotent component by phi: (phi')^{-1/2} a o phi
TrigPoly pullback_half_density(const TrigPoly& a, const GroupElement& g,
                               int max_degree = 256) {
    TrigPoly dp = g.p.derivative();
    return TrigPoly::fit(
        [&](double th) {
            double fp = 1 + dp(th).real();
            return a(g.phi(th)) / std::sqrt(fp);
        },
        1e-13, max_degree, a.denom());
}

TrigPoly pullback_scalar(const TrigPoly& b, const GroupElement& g,
                         int max_degree = 256) {
    return TrigPoly::fit([&](double th) { return b(g.phi(th)); }, 1e-13, max_degree,
                         b.denom());
}

} // namespace

GroupElement product(const GroupElement& g2, const GroupElement& g1) {
    GroupElement out;
    out.p = compose_displacement(g1.p, g2.p);
    TrigPoly a1t = pullback_half_density(g1.a, g2);
    TrigPoly b1t = pullback_scalar(g1.b, g2);
    out.a = a1t + g2.a;
    // two-step nilpotent cocycle; the pulled-back factor acts first
    out.b = b1t + g2.b +
            (a1t * g2.a.derivative() - a1t.derivative() * g2.a) * Complex(0.5, 0);
    return out;
}

GroupElement inverse(const GroupElement& g) {
    GroupElement out;
    out.p = invert_diffeo(g.p);
    GroupElement gi{out.p, {}, {}};
    out.a = -pullback_half_density(g.a, gi);
    out.b = -pullback_scalar(g.b, gi);
    return out;
}

PeriodicFn schwarzian(const GroupElement& g) {
    if (!g.valid()) throw NotADiffeomorphism("schwarzian of a non-diffeomorphism");
    TrigPoly d1 = g.p.derivative();
    TrigPoly d2 = d1.derivative();
    TrigPoly d3 = d2.derivative();
    TrigPoly d4 = d3.derivative();
    auto f = [d1, d2, d3](Complex z) {
        Complex fp = 1.0 + d1.eval(z);
        Complex r = d2.eval(z) / fp;
        return d3.eval(z) / fp - 1.5 * r * r;
    };
    auto df = [d1, d2, d3, d4](Complex z) {
        Complex fp = 1.0 + d1.eval(z);
        Complex f2 = d2.eval(z), f3 = d3.eval(z), f4 = d4.eval(z);
        return f4 / fp - f3 * f2 / (fp * fp) - 3.0 * f2 * f3 / (fp * fp) +
               3.0 * f2 * f2 * f2 / (fp * fp * fp);
    };
    return PeriodicFn(f, df);
}

SchrodingerOp act(const GroupElement& g, const SchrodingerOp& D, const ActOptions& opt) {
    if (!g.valid()) throw NotADiffeomorphism("act with phi' <= 0");
    TrigPoly dp = g.p.derivative();
    PeriodicFn theta_fn = schwarzian(g);

    auto v2c = [&](double th) {
        double fp = 1 + dp(th).real();
        return Complex(fp * fp * D.V2(g.phi(th)) + 0.5 * theta_fn(th), 0);
    };
    auto v1c = [&](double th) {
        double fp = 1 + dp(th).real();
        return Complex(std::pow(fp, 1.5) * D.V1(g.phi(th)), 0);
    };
    auto v0c = [&](double th) {
        double fp = 1 + dp(th).real();
        return Complex(fp * D.V0(g.phi(th)), 0);
    };
    TrigPoly V2 = TrigPoly::fit(v2c, opt.tail_tol, opt.max_degree, D.V2.denom());
    TrigPoly V1 = TrigPoly::fit(v1c, opt.tail_tol, opt.max_degree, D.V1.denom());
    TrigPoly V0 = TrigPoly::fit(v0c, opt.tail_tol, opt.max_degree, D.V0.denom());

    // nilpotent part (exact trig algebra)
    const TrigPoly& a = g.a;
    TrigPoly add = a.derivative().derivative();
    TrigPoly V1n = V1 - a * V2 * Complex(2, 0) - add * Complex(2, 0);
    TrigPoly V0n = V0 - a * V1 + a * a * V2 - g.b.derivative() * Complex(2, 0) + a * add;
    return SchrodingerOp{PeriodicFn(V2), PeriodicFn(V1n), PeriodicFn(V0n)};
}

PotentialIncrement infinitesimal_act(const InfinitesimalElement& X,
                                     const SchrodingerOp& D) {
    TrigPoly f = X.f, gg = X.g, h = X.h;
    TrigPoly f1 = f.derivative();
    TrigPoly f3 = f1.derivative().derivative();
    TrigPoly g2 = gg.derivative().derivative();
    TrigPoly h1 = h.derivative();
    PeriodicFn V2 = D.V2, V1 = D.V1, V0 = D.V0;
    PeriodicFn dV2 = D.V2.derivative(), dV1 = D.V1.derivative(), dV0 = D.V0.derivative();

    auto c2 = [=](Complex z) {
        return -(0.5 * f3.eval(z) + 2.0 * f1.eval(z) * V2.eval(z) +
                 f.eval(z) * dV2.eval(z));
    };
    auto c1 = [=](Complex z) {
        return -(f.eval(z) * dV1.eval(z) + 1.5 * f1.eval(z) * V1.eval(z)) -
               2.0 * (g2.eval(z) + gg.eval(z) * V2.eval(z));
    };
    auto c0 = [=](Complex z) {
        return -(f.eval(z) * dV0.eval(z) + f1.eval(z) * V0.eval(z)) -
               (2.0 * h1.eval(z) + gg.eval(z) * V1.eval(z));
    };
    int dv1 = std::max(D.V1.denom(), X.g.denom());
    return {PeriodicFn(c2, nullptr, D.V2.denom()), PeriodicFn(c1, nullptr, dv1),
            PeriodicFn(c0, nullptr, dv1)};
}

GroupElement group_exp(const InfinitesimalElement& X, double eps) {
    // L_f carries the vector field -f d/dtheta, so the time flow runs along -f
    return GroupElement{X.f * Complex(-eps, 0), X.g * Complex(eps, 0),
                        X.h * Complex(eps, 0)};
}

// ---------------------------------------------------------------------------

TrigPoly solve_hill_linear(const HillOperator& op, const PeriodicFn& r, int sign,
                           double rk_tol, TrigPoly* kernel_out, bool* resonant_out) {
    const int K = kGridK;
    Eigen::VectorXd y(6);
    y << 1, 0, 0, 1, 0, 0;
    Eigen::MatrixXd rec(K + 1, 6);
    int row = 0;
    integrate_ode<double>(
        [&](double t, const Eigen::VectorXd& s, Eigen::VectorXd& d) {
            double u = op.u(t);
            d[0] = s[1];
            d[1] = -u * s[0];
            d[2] = s[3];
            d[3] = -u * s[2];
            d[4] = s[5];
            d[5] = -u * s[4] + r(t);
        },
        0, kTwoPi, y, rk_tol, rk_tol, uniform_samples(K, kTwoPi),
        [&](double, const Eigen::VectorXd& s) { rec.row(row++) = s.transpose(); });

    Eigen::Matrix2d F;
    F << y[0], y[2], y[1], y[3];
    Eigen::Vector2d P(y[4], y[5]);
    Eigen::Matrix2d A = double(sign) * Eigen::Matrix2d::Identity() - F;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    bool resonant = svd.singularValues()(1) < 1e-8 * std::max(1.0, svd.singularValues()(0));
    if (resonant_out) *resonant_out = resonant;

    Eigen::Vector2d c;
    std::vector<Eigen::Vector2d> kvecs;
    if (resonant) {
        // minimum-norm consistent solution + every near-null direction
        Eigen::JacobiSVD<Eigen::Matrix2d> s2(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Vector2d sv = s2.singularValues();
        Eigen::Vector2d rhs = s2.matrixU().transpose() * P;
        Eigen::Vector2d z = Eigen::Vector2d::Zero();
        for (int i = 0; i < 2; ++i) {
            if (sv(i) > 1e-8 * std::max(1.0, sv(0)))
                z(i) = rhs(i) / sv(i);
            else
                kvecs.push_back(s2.matrixV().col(i));
        }
        c = s2.matrixV() * z;
    } else {
        c = A.colPivHouseholderQr().solve(P);
    }

    // assemble samples of the solution (and kernel functions)
    const int denom = (sign == -1) ? 2 : 1;
    const int KK = (sign == -1) ? 2 * K : K;
    Eigen::VectorXcd vals(KK);
    for (int j = 0; j < K; ++j) {
        double w = rec(j, 4) + c[0] * rec(j, 0) + c[1] * rec(j, 2);
        vals[j] = w;
        if (sign == -1) vals[j + K] = -w; // anti-periodic continuation
    }
    TrigPoly sol = TrigPoly::from_samples(vals, std::min(KK / 2 - 1, 400), denom);
    sol = sol.real_part().trimmed(1e-12 * std::max(1.0, sol.max_abs()));
    TrigPoly ker;
    for (size_t m = 0; m < kvecs.size(); ++m) {
        Eigen::VectorXcd kvals(KK);
        for (int j = 0; j < K; ++j) {
            double kv = kvecs[m][0] * rec(j, 0) + kvecs[m][1] * rec(j, 2);
            kvals[j] = kv;
            if (sign == -1) kvals[j + K] = -kv;
        }
        TrigPoly kpoly = TrigPoly::from_samples(kvals, std::min(KK / 2 - 1, 400), denom)
                             .real_part()
                             .trimmed(1e-11);
        double kn = l2_product(kpoly, kpoly);
        if (kn > 1e-12) {
            double pr = l2_product(sol, kpoly) / kn;
            sol = sol - kpoly * Complex(pr, 0);
        }
        if (m == 0) ker = kpoly;
    }
    if (kernel_out) *kernel_out = ker;
    return sol;
}

namespace {

double recover_gamma_impl(const SchrodingerOp& D, const ClassifyOptions& opt,
                          bool allow_orthogonal) {
    // split V1 into periodic / anti-periodic sectors
    const TrigPoly v1 = D.V1.projection();
    TrigPoly v1p = v1, v1a = v1;
    if (v1.denom() == 2) {
        Eigen::VectorXcd cp = v1.coefficients(), ca = v1.coefficients();
        int n = v1.degree();
        for (int m = -n; m <= n; ++m) {
            if (std::abs(m) % 2 == 0)
                ca[m + n] = 0;
            else
                cp[m + n] = 0;
        }
        v1p = TrigPoly(cp, 2);
        v1a = TrigPoly(ca, 2);
    } else {
        v1a = TrigPoly::constant(0.0);
    }

    HillOperator hop = D.hill();
    double corr = 0;
    for (int sector = 0; sector < 2; ++sector) {
        const TrigPoly& rhs = (sector == 0) ? v1p : v1a;
        int sign = (sector == 0) ? 1 : -1;
        if (rhs.max_abs() < 1e-14) continue;
        bool resonant = false;
        TrigPoly ker;
        TrigPoly W1 = solve_hill_linear(hop, PeriodicFn(rhs), sign, opt.rk_tol, &ker,
                                        &resonant);
        if (resonant) {
            double obstruction =
                l2_product(rhs, ker) / std::sqrt(std::max(1e-300, l2_product(ker, ker)));
            if (!allow_orthogonal || std::abs(obstruction) > 1e-6 * (1 + rhs.max_abs()))
                throw ResonantOperator("d^2 + V2 has a periodic kernel meeting V1");
        }
        corr += l2_product(rhs, W1) / (2 * kTwoPi); // 4pi-normalized mean of V1 W1
    }
    return D.V0.mean() - 0.25 * corr;
}

} // namespace

double recover_gamma(const SchrodingerOp& D, const ClassifyOptions& opt) {
    return recover_gamma_impl(D, opt, false);
}

namespace {

// reduction of a case-I operator to constant V2: phi with xi-bar constant
struct Reduction {
    GroupElement g;
    double alpha;
    double c; // reduced stabilizer constant
};

Reduction reduce_case1(const SchrodingerOp& D, const Stabilizer& st,
                       const ClassifyOptions& opt) {
    // tau(y) = int_0^y ds / profile, strictly increasing
    const TrigPoly& p = st.profile;
    const int K = 2048;
    std::vector<double> tau(K + 1, 0.0);
    for (int j = 0; j < K; ++j) {
        auto q = integrate([&](double s) { return 1.0 / p(s); }, kTwoPi * j / K,
                           kTwoPi * (j + 1) / K, 1e-12);
        tau[j + 1] = tau[j] + q.value.real();
    }
    const double T = tau[K];
    const double c = kTwoPi / T;

    auto tau_at = [&](double y) {
        // y in [0, 2pi]
        int j = std::clamp(int(y / kTwoPi * K), 0, K - 1);
        double base = kTwoPi * j / K;
        auto q = integrate([&](double s) { return 1.0 / p(s); }, base, y, 1e-12);
        return tau[j] + q.value.real();
    };
    auto phi_red = [&](double th) {
        // solve tau(x) = th / c by Newton (tau' = 1/p > 0)
        double target = th / c;
        double period_shift = std::floor(target / T);
        target -= period_shift * T;
        double x = target / T * kTwoPi;
        for (int it = 0; it < 60; ++it) {
            double fx = tau_at(x) - target;
            double step = fx * p(x).real();
            x -= step;
            if (std::abs(step) < 1e-14) break;
        }
        return x + period_shift * kTwoPi;
    };
    Reduction red;
    red.g.p = TrigPoly::fit([&](double th) { return Complex(phi_red(th) - th, 0); },
                            1e-12, 256, 1);
    red.c = c;
    red.alpha = st.imaginary ? -st.I / (2 * c * c) : st.I / (2 * c * c);
    return red;
}

double mean_of(const PeriodicFn& f) { return f.mean(); }

} // namespace

const char* orbit_tag_name(OrbitClass::Tag t) {
    switch (t) {
    case OrbitClass::Tag::Ci: return "i";
    case OrbitClass::Tag::CiBis: return "i-bis";
    case OrbitClass::Tag::Cii: return "ii";
    case OrbitClass::Tag::Ciii: return "iii";
    case OrbitClass::Tag::CiiiBis: return "iii-bis";
    }
    return "?";
}

OrbitClass classify_orbit(const SchrodingerOp& D, const ClassifyOptions& opt) {
    HillOperator hop = D.hill();
    FloquetData fd = floquet(hop, {opt.rk_tol, 64});
    MonodromyClass mc = classify(fd.M, opt.class_tol);
    Stabilizer st = periodic_stabilizer(hop, {opt.rk_tol});

    OrbitClass out;
    out.hill_class = mc;

    switch (st.kind) {
    case Stabilizer::Kind::CaseI: {
        if (mc.low_confidence && !st.degenerate && std::abs(st.I) > 1e-6)
            throw BoundaryClass("Hill trace at the elliptic/hyperbolic boundary");
        Reduction red = reduce_case1(D, st, opt);
        out.alpha = red.alpha;
        double dist_quarter = 1e300;
        for (int m = 0; m * m / 4.0 < std::abs(out.alpha) + 2; ++m)
            dist_quarter = std::min(dist_quarter, std::abs(out.alpha - m * m / 4.0));
        out.generic = dist_quarter > opt.resonance_tol * (1 + std::abs(out.alpha));

        // resonance test at alpha = m^2 (integer m >= 0)
        int m = int(std::lround(std::sqrt(std::max(0.0, out.alpha))));
        bool near_res = std::abs(out.alpha - double(m) * m) <=
                        opt.resonance_tol * (1 + std::abs(out.alpha));
        if (!near_res) {
            out.tag = OrbitClass::Tag::Ci;
            out.gamma = recover_gamma(D, opt);
            return out;
        }
        // reduce and inspect the +-m Fourier coefficients of V1
        SchrodingerOp Dred = act(red.g, D);
        TrigPoly v1 = Dred.V1.projection();
        Complex cm = v1.coeff(m * v1.denom());
        double scale = 1 + v1.max_abs();
        bool resonant = std::abs(cm) > 1e-7 * scale;
        if (resonant && m == 0)
            throw BoundaryClass(
                "free operator with nonzero mean drift has no representative here");

        // gamma via the reduced normal form: solve the solvable part of V1
        TrigPoly v0 = Dred.V0.projection();
        double alpha = double(m) * m; // exact resonant value
        int nd = v1.degree();
        Eigen::VectorXcd ac = Eigen::VectorXcd::Zero(2 * nd + 1);
        for (int k = -nd; k <= nd; ++k) {
            if (std::abs(k) == m * v1.denom()) continue;
            double freq = double(k) / v1.denom();
            ac[k + nd] = v1.coeff(k) / (2.0 * (alpha - freq * freq));
        }
        TrigPoly a(ac, v1.denom());
        TrigPoly add = a.derivative().derivative();
        TrigPoly inner = v0 - a * v1 + a * a * Complex(alpha, 0) + a * add;
        out.gamma = inner.mean().real();

        if (resonant) {
            out.tag = OrbitClass::Tag::CiBis;
            out.n = m;
            out.C = 2 * std::abs(cm);
            out.sigma = -2 * std::arg(cm);
        } else {
            out.tag = OrbitClass::Tag::Ci;
            out.alpha = alpha;
        }
        return out;
    }
    case Stabilizer::Kind::CaseII: {
        if (mc.low_confidence)
            throw BoundaryClass("Hill trace at the stability boundary");
        out.tag = OrbitClass::Tag::Cii;
        out.n = int(st.zeros.size()) / 2;
        double Ireal = -st.I; // stored imaginary: I(profile) = -I
        Complex pv = xi_integral(st.profile, XiMode::PrincipalValue,
                                 {1e-10, 1e-8, 1e-5, 0});
        double J = pv.real() * std::sqrt(-Ireal); // scale-free
        double t = std::abs(J) / (std::sqrt(2.0) * M_PI * out.n);
        out.alpha = t / std::sqrt(1 + t * t);
        out.gamma = recover_gamma(D, opt);
        return out;
    }
    case Stabilizer::Kind::CaseIII: {
        out.n = int(st.zeros.size());
        // kernel function of d^2 + V2 (anti-periodic sector when Tr M < 0)
        int sign = fd.M.trace() >= 0 ? 1 : -1;
        bool resonant = false;
        TrigPoly ker;
        (void)solve_hill_linear(hop, PeriodicFn(TrigPoly::constant(0.0)), sign,
                                opt.rk_tol, &ker, &resonant);
        if (!resonant || ker.max_abs() < 1e-9)
            throw BoundaryClass("type III operator without resolvable kernel");
        double kn = std::sqrt(l2_product(ker, ker));
        double ob = l2_product(D.V1.projection(), ker) / kn;
        double v1scale = std::sqrt(std::max(1e-300, l2_product(D.V1.projection(),
                                                               D.V1.projection())));
        bool drift_resonant = std::abs(ob) > 1e-6 * (1e-9 + v1scale);

        // family parameter from the mean of V2 (exact for literal v_{n,alpha})
        double mu = 4.0 * mean_of(D.V2) / (out.n * out.n);
        double lo = 0, hi = 0.999999;
        auto vmean = [&](double al) {
            auto fam = kirillov_family({KirillovFamily::Case::III, out.n, al, 1.0});
            return 4.0 * fam.u.mean() / (out.n * out.n);
        };
        double alpha = std::numeric_limits<double>::quiet_NaN();
        double flo = vmean(lo) - mu, fhi = vmean(hi) - mu;
        if (flo == 0) alpha = lo;
        else if ((flo < 0) != (fhi < 0)) {
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = vmean(mid) - mu;
                if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
                else hi = mid;
            }
            alpha = 0.5 * (lo + hi);
        }
        out.alpha = alpha;

        if (drift_resonant) {
            out.tag = OrbitClass::Tag::CiiiBis;
            if (std::isfinite(alpha)) {
                // match against the closed-form drift profile
                const int n = out.n;
                TrigPoly fhat = TrigPoly::fit(
                    [n, alpha](double th) {
                        return Complex(std::sqrt(1 + alpha * std::sin(n * th)) *
                                           std::cos(M_PI / 4 - n * th / 2.0),
                                       0);
                    },
                    1e-12, 256, 2);
                out.C = l2_product(D.V1.projection(), fhat) / l2_product(fhat, fhat);
            }
            out.gamma = mean_of(D.V0);
        } else {
            out.tag = OrbitClass::Tag::Ciii;
            out.gamma = recover_gamma_impl(D, opt, true);
        }
        return out;
    }
    }
    throw BoundaryClass("unreachable");
}

// ---------------------------------------------------------------------------

VectorInvariant vector_invariant(const SchrodingerOp& D, const ClassifyOptions& opt,
                                 bool allow_nongeneric) {
    HillOperator hop = D.hill();
    Stabilizer raw = periodic_stabilizer(hop, {opt.rk_tol});
    if (!allow_nongeneric &&
        (raw.degenerate || raw.kind == Stabilizer::Kind::CaseIII ||
         std::abs(raw.I) < 1e-9))
        throw NonGenericOperator("vector invariant requires generic type (i)/(ii)");
    if (raw.kind == Stabilizer::Kind::CaseIII || std::abs(raw.I) < 1e-9)
        throw NonGenericOperator("vector invariant needs a nonzero first integral");
    Stabilizer xi = normalize_stabilizer(hop, raw);

    VectorInvariant inv;
    inv.xi = xi;
    const TrigPoly& p = xi.profile;
    TrigPoly dp = p.derivative();

    // delta1 equation with the real profile: the unit factor carries through
    PeriodicFn dV1 = D.V1.derivative();
    auto rhs = [&](Complex z) {
        return -0.5 * (dV1.eval(z) * p.eval(z) + 1.5 * D.V1.eval(z) * dp.eval(z));
    };
    int sector_sign = (D.V1.denom() == 2) ? -1 : 1;
    // mixed-parity V1 splits linearly; handle the common pure cases directly
    TrigPoly v1proj = D.V1.projection();
    TrigPoly d1;
    if (v1proj.max_abs() < 1e-14) {
        d1 = TrigPoly::constant(0.0);
    } else if (v1proj.denom() == 2) {
        // split sectors
        int n = v1proj.degree();
        Eigen::VectorXcd ce = v1proj.coefficients(), co = v1proj.coefficients();
        for (int m = -n; m <= n; ++m) {
            if (std::abs(m) % 2 == 0) co[m + n] = 0;
            else ce[m + n] = 0;
        }
        TrigPoly v1e(ce, 2), v1o(co, 2);
        TrigPoly d1e = TrigPoly::constant(0.0), d1o = TrigPoly::constant(0.0);
        if (v1e.max_abs() > 1e-14) {
            TrigPoly r = (v1e.derivative() * p + v1e * dp * Complex(1.5, 0)) * Complex(-0.5, 0);
            d1e = solve_hill_linear(hop, PeriodicFn(r), 1, opt.rk_tol);
        }
        if (v1o.max_abs() > 1e-14) {
            TrigPoly r = (v1o.derivative() * p + v1o * dp * Complex(1.5, 0)) * Complex(-0.5, 0);
            d1o = solve_hill_linear(hop, PeriodicFn(r), -1, opt.rk_tol);
        }
        d1 = d1e + d1o;
    } else {
        TrigPoly r = (v1proj.derivative() * p + v1proj * dp * Complex(1.5, 0)) * Complex(-0.5, 0);
        d1 = solve_hill_linear(hop, PeriodicFn(r), sector_sign, opt.rk_tol);
    }
    (void)rhs;
    inv.delta1 = d1;

    // delta2 = -(1/2) primitive(V1 delta1) - (1/2) V0 xi, zero-mean
    TrigPoly prod = v1proj * d1;
    Complex pm = prod.mean();
    TrigPoly prim = (prod - TrigPoly::constant(pm)).antiderivative().first;
    TrigPoly v0p = D.V0.projection();
    TrigPoly d2full = prim * Complex(-0.5, 0) - v0p * p * Complex(0.5, 0);
    Complex mean2 = d2full.mean();
    inv.delta2 = d2full - TrigPoly::constant(mean2);
    inv.delta2_offset = mean2.real();
    return inv;
}

VectorInvariant transform_invariant(const GroupElement& g, const VectorInvariant& inv,
                                    const ActOptions& opt) {
    if (!g.valid()) throw NotADiffeomorphism("transform_invariant");
    TrigPoly dp = g.p.derivative();
    auto fprime = [&](double th) { return 1 + dp(th).real(); };

    TrigPoly xi_t = TrigPoly::fit(
        [&](double th) { return inv.xi.profile(g.phi(th)) / fprime(th); }, 1e-13,
        opt.max_degree, inv.xi.profile.denom());
    TrigPoly d1_bar = TrigPoly::fit(
        [&](double th) { return inv.delta1(g.phi(th)) / std::sqrt(fprime(th)); },
        1e-13, opt.max_degree, inv.delta1.denom());
    TrigPoly d2_bar = TrigPoly::fit([&](double th) { return inv.delta2(g.phi(th)); },
                                    1e-13, opt.max_degree, inv.delta2.denom());

    const TrigPoly& a = g.a;
    TrigPoly ad = a.derivative();
    TrigPoly add = ad.derivative();
    TrigPoly xd = xi_t.derivative();
    TrigPoly xdd = xd.derivative();

    VectorInvariant out;
    out.xi = inv.xi;
    out.xi.profile = xi_t;
    out.xi.zeros = find_zeros(xi_t, 1e-8, 1e-5);
    out.delta1 = d1_bar + xi_t * ad - a * xd * Complex(0.5, 0);
    TrigPoly d2 = d2_bar + (ad * d1_bar - a * d1_bar.derivative()) +
                  xi_t * g.b.derivative() +
                  (xi_t * (ad * ad - a * add)) * Complex(0.5, 0) -
                  (xd * a * ad) * Complex(0.5, 0) + (xdd * a * a) * Complex(0.25, 0);
    Complex m2 = d2.mean();
    out.delta2 = d2 - TrigPoly::constant(m2);
    out.delta2_offset = inv.delta2_offset + m2.real();
    return out;
}

// ---------------------------------------------------------------------------

SpaceTimeFn apply_pi(const GroupElement& g, double lambda, const SpaceTimeFn& psi) {
    TrigPoly p = g.p, a = g.a, b = g.b;
    TrigPoly dp = p.derivative(), d2p = dp.derivative();
    TrigPoly ad = a.derivative();
    return [p, a, b, dp, d2p, ad, lambda, psi](double th, double x) -> Complex {
        // nilpotent stage: e^{i(a' x + b - a a'/2)} psi(theta, x - a)
        double av = a(th).real(), adv = ad(th).real(), bv = b(th).real();
        Complex phase = std::exp(Complex(0, adv * x + bv - 0.5 * av * adv));
        double z = x - av;
        // time-reparametrization stage (pullback): phi'^{lambda}
        //   e^{-(i/4)(phi''/phi') z^2} psi(phi(theta), z sqrt(phi'))
        double fp = 1 + dp(th).real();
        double fpp = d2p(th).real();
        Complex pref = std::pow(fp, lambda) *
                       std::exp(Complex(0, -0.25 * (fpp / fp) * z * z));
        return phase * pref * psi(th + p(th).real(), z * std::sqrt(fp));
    };
}

Eigen::VectorXcd apply_pi_grid(const GroupElement& g, double lambda,
                               const Eigen::VectorXcd& slice, const Eigen::VectorXd& x,
                               double theta_out, double* clipped_mass) {
    const int N = int(x.size());
    const double x0 = x[0], dx = x[1] - x[0];
    auto interp = [&](double y) -> Complex {
        double u = (y - x0) / dx;
        int i = int(std::floor(u));
        if (i < 1 || i > N - 3) return Complex(0, 0);
        double t = u - i;
        // Catmull-Rom
        Complex pm1 = slice[i - 1], p0 = slice[i], p1 = slice[i + 1], p2 = slice[i + 2];
        return 0.5 * ((2.0 * p0) + (-pm1 + p1) * t +
                      (2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2) * (t * t) +
                      (-pm1 + 3.0 * p0 - 3.0 * p1 + p2) * (t * t * t));
    };
    TrigPoly dp = g.p.derivative(), d2p = dp.derivative(), ad = g.a.derivative();
    double th = theta_out;
    double av = g.a(th).real(), adv = ad(th).real(), bv = g.b(th).real();
    double fp = 1 + dp(th).real(), fpp = d2p(th).real();

    Eigen::VectorXcd out(N);
    double ymax = 0;
    for (int j = 0; j < N; ++j) {
        double z = x[j] - av;
        double y = z * std::sqrt(fp);
        ymax = std::max(ymax, std::abs(y));
        Complex phase = std::exp(Complex(0, adv * x[j] + bv - 0.5 * av * adv));
        Complex pref = std::pow(fp, lambda) *
                       std::exp(Complex(0, -0.25 * (fpp / fp) * z * z));
        out[j] = phase * pref * interp(y);
    }
    if (clipped_mass) {
        double total = 0, outside = 0;
        for (int j = 0; j < N; ++j) {
            double m = std::norm(slice[j]);
            total += m;
            if (std::abs(x[j]) > ymax) outside += m;
        }
        *clipped_mass = (total > 0) ? outside / total : 0.0;
        if (*clipped_mass > 1e-6)
            throw GridOverflow("transform needs " + std::to_string(*clipped_mass) +
                               " of the mass from outside the grid");
    }
    return out;
}

} // namespace mlab
