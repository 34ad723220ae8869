#include "mlab/quadrature.hpp"

#include "mlab/errors.hpp"

#include <cmath>

namespace mlab {

namespace {

// G7/K15 nodes and weights (Fullerton, 80-digit arithmetic; QUADPACK dqk15).
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

using C = std::complex<double>;
using Fn = std::function<C(double)>;

struct Panel {
    C value;
    double error;
};

Panel gk15(const Fn& f, double a, double b, int& evals) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const C fc = f(c);
    evals += 15;
    C resg = kWg[3] * fc;
    C resk = kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const C f1 = f(c - dx), f2 = f(c + dx);
        const C fsum = f1 + f2;
        resk += kWgk[j] * fsum;
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    resk *= h;
    resg *= h;
    double err = std::abs(resk - resg);
    // QUADPACK-style sharpening of the raw difference
    err = std::min(err, 200.0 * err * std::sqrt(err / std::max(1e-300, std::abs(resk) + err)));
    return {resk, std::abs(resk - resg)};
}

void adapt(const Fn& f, double a, double b, double rel_tol, double abs_tol,
           int depth, int max_depth, C& acc, double& err_acc, int& evals) {
    Panel p = gk15(f, a, b, evals);
    const double tol = std::max(abs_tol, rel_tol * std::abs(p.value));
    if (p.error <= tol || depth >= max_depth) {
        if (depth >= max_depth && p.error > 1e3 * tol)
            throw IntegratorFailure("adaptive quadrature failed to converge on ["
                                    + std::to_string(a) + "," + std::to_string(b) + "]");
        acc += p.value;
        err_acc += p.error;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, rel_tol, abs_tol, depth + 1, max_depth, acc, err_acc, evals);
    adapt(f, m, b, rel_tol, abs_tol, depth + 1, max_depth, acc, err_acc, evals);
}

} // namespace

QuadResult integrate(const Fn& f, double a, double b, double rel_tol,
                     double abs_tol, int max_depth) {
    C acc(0, 0);
    double err = 0;
    int evals = 0;
    if (a != b) adapt(f, a, b, rel_tol, abs_tol, 0, max_depth, acc, err, evals);
    return {acc, err, evals};
}

} // namespace mlab
