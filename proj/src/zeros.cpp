#include "mlab/zeros.hpp"

#include "mlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mlab {

namespace {

double wrap(double th, double period) {
    th = std::fmod(th, period);
    if (th < 0) th += period;
    return th;
}

// Bisect a bracketed sign change of re(f), then polish with Newton on f/f'.
double refine_simple(const std::function<double(double)>& f,
                     const std::function<double(double)>& df, double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
        double m = 0.5 * (a + b), fm = f(m);
        if ((fa < 0) == (fm < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 4; ++it) {
        double d = df(x);
        if (d == 0) break;
        x -= f(x) / d;
    }
    return x;
}

} // namespace

std::vector<TorusZero> find_zeros(const TrigPoly& fp, double zero_tol,
                                  double deriv_tol) {
    if (!fp.is_real())
        throw ParameterOutOfRange("find_zeros requires a real-valued function");
    const double period = kTwoPi * fp.denom();
    const TrigPoly d1p = fp.derivative();
    const TrigPoly d2p = d1p.derivative();
    auto f = [&](double th) { return fp(th).real(); };
    auto d1 = [&](double th) { return d1p(th).real(); };
    auto d2 = [&](double th) { return d2p(th).real(); };

    const double scale = std::max(1.0, fp.max_abs());
    const double ztol = zero_tol * scale;
    const double dtol = deriv_tol * scale;
    if (fp.max_abs() < ztol)
        throw ParameterOutOfRange("find_zeros: function is identically zero at tolerance");

    const int K = std::max(4 * (fp.degree() + 1), 16) * fp.denom();
    // offset grid so that common symmetric zeros do not sit on grid nodes
    auto node = [&](int j) { return period * (j + 0.372) / K; };

    std::vector<TorusZero> out;

    // simple zeros: sign changes of f
    for (int j = 0; j < K; ++j) {
        double a = node(j), b = node(j + 1);
        double fa = f(a), fb = f(b);
        if ((fa < 0) != (fb < 0)) {
            double x = refine_simple(f, d1, a, b);
            if (std::abs(f(x)) > ztol)
                throw ZeroResolutionError("sign change could not be refined below tolerance");
            double dv = d1(x);
            if (std::abs(dv) <= dtol)
                throw ZeroResolutionError("zero fails the simple-multiplicity test");
            out.push_back({wrap(x, period), TorusZero::Mult::Simple, dv});
        }
    }

    // double zeros: zeros of f' where |f| is below tolerance
    for (int j = 0; j < K; ++j) {
        double a = node(j), b = node(j + 1);
        double ga = d1(a), gb = d1(b);
        if ((ga < 0) != (gb < 0)) {
            double x = refine_simple(d1, d2, a, b);
            if (std::abs(f(x)) >= ztol) continue; // ordinary critical point
            double dv = d2(x);
            if (std::abs(dv) <= dtol)
                throw ZeroResolutionError("zero fails both multiplicity tests");
            double xw = wrap(x, period);
            for (const auto& z : out)
                if (std::abs(z.location - xw) < 1e-6 ||
                    period - std::abs(z.location - xw) < 1e-6)
                    throw ZeroResolutionError("unresolvable zero cluster");
            out.push_back({xw, TorusZero::Mult::Double, dv});
        }
    }

    std::sort(out.begin(), out.end(),
              [](const TorusZero& a, const TorusZero& b) { return a.location < b.location; });
    return out;
}

} // namespace mlab
