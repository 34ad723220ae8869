#include "mlab/contour.hpp"

#include "mlab/errors.hpp"
#include "mlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mlab {

double Contour::start() const {
    if (pieces.empty()) return 0;
    const auto& p = pieces.front();
    return p.kind == ContourPiece::Kind::RealSegment ? p.a : p.center - p.radius;
}

double Contour::end() const {
    if (pieces.empty()) return 0;
    const auto& p = pieces.back();
    return p.kind == ContourPiece::Kind::RealSegment ? p.b : p.center + p.radius;
}

Contour build_contour(const std::vector<TorusZero>& zeros,
                      const std::vector<bool>& upper_side, double period,
                      double radius) {
    Contour c;
    if (zeros.empty()) {
        c.pieces.push_back({ContourPiece::Kind::RealSegment, 0.0, period});
        return c;
    }
    // sort zero locations and find the largest gap; start there
    std::vector<std::pair<double, bool>> zs;
    for (size_t i = 0; i < zeros.size(); ++i)
        zs.emplace_back(zeros[i].location, upper_side[i]);
    std::sort(zs.begin(), zs.end());
    double min_gap = period, best_gap = -1, start = 0;
    for (size_t i = 0; i < zs.size(); ++i) {
        double next = (i + 1 < zs.size()) ? zs[i + 1].first : zs[0].first + period;
        double gap = next - zs[i].first;
        min_gap = std::min(min_gap, gap);
        if (gap > best_gap) {
            best_gap = gap;
            start = zs[i].first + gap / 2;
        }
    }
    double eps = (radius > 0) ? radius : std::min(0.1, min_gap / 4);
    if (2 * eps >= min_gap)
        throw ParameterOutOfRange("contour radius exceeds half the zero gap");
    // translate every zero into (start, start + period) and walk in order
    for (auto& z : zs)
        if (z.first < start) z.first += period;
    std::sort(zs.begin(), zs.end());
    double cursor = start;
    for (const auto& [z, up] : zs) {
        c.pieces.push_back({ContourPiece::Kind::RealSegment, cursor, z - eps});
        ContourPiece arc;
        arc.kind = ContourPiece::Kind::HalfCircle;
        arc.center = z;
        arc.radius = eps;
        arc.upper = up;
        c.pieces.push_back(arc);
        cursor = z + eps;
    }
    c.pieces.push_back({ContourPiece::Kind::RealSegment, cursor, start + period});
    return c;
}

Complex integrate_contour(const Contour& c,
                          const std::function<Complex(Complex)>& f,
                          double rel_tol) {
    Complex total(0, 0);
    for (const auto& p : c.pieces) {
        if (p.kind == ContourPiece::Kind::RealSegment) {
            if (p.b <= p.a) continue;
            total += integrate([&](double t) { return f(Complex(t, 0)); }, p.a, p.b,
                               rel_tol)
                         .value;
        } else {
            // z(phi) = center + radius * exp(i phi), phi: +-pi -> 0
            const double phi0 = p.upper ? M_PI : -M_PI;
            total += integrate(
                         [&](double phi) {
                             Complex z = p.center + p.radius * std::exp(Complex(0, phi));
                             Complex dz = p.radius * Complex(0, 1) * std::exp(Complex(0, phi));
                             return f(z) * dz;
                         },
                         phi0, 0.0, rel_tol)
                         .value;
        }
    }
    return total;
}

Complex xi_integral(const TrigPoly& xi, XiMode mode, const XiIntegralOptions& opt) {
    // split xi = unit * profile with profile real:  unit in {1, i}
    Complex unit(1, 0);
    TrigPoly profile = xi;
    if (!xi.is_real()) {
        TrigPoly rotated = xi * Complex(0, -1);
        if (!rotated.is_real())
            throw RegularizationMismatch(
                "xi_integral requires a real or purely imaginary xi");
        unit = Complex(0, 1);
        profile = rotated;
    }

    auto zeros = [&]() -> std::vector<TorusZero> {
        return find_zeros(profile, opt.zero_tol, opt.deriv_tol);
    };

    auto inv_xi = [&](Complex z) { return 1.0 / xi.eval(z); };

    switch (mode) {
    case XiMode::Direct: {
        auto zs = zeros();
        if (!zs.empty())
            throw RegularizationMismatch("Direct mode requires a zero-free xi");
        return integrate([&](double t) { return inv_xi(Complex(t, 0)); }, 0, kTwoPi,
                         opt.rel_tol)
            .value;
    }
    case XiMode::PrincipalValue: {
        auto zs = zeros();
        for (const auto& z : zs)
            if (z.multiplicity != TorusZero::Mult::Simple)
                throw RegularizationMismatch(
                    "PrincipalValue requires simple zeros only");
        std::vector<bool> side(zs.size(), true); // all upper
        Contour c = build_contour(zs, side, kTwoPi, opt.radius_override);
        Complex val = integrate_contour(c, inv_xi, opt.rel_tol);
        // upper half-circle around a simple pole contributes -i*pi*residue;
        // the principal value restores it:  p.v. = contour + i*pi*sum residues
        Complex res_sum(0, 0);
        for (const auto& z : zs) res_sum += 1.0 / (unit * z.derivative_value);
        return val + Complex(0, M_PI) * res_sum;
    }
    case XiMode::ContourHyperbolic: {
        auto zs = zeros();
        std::vector<bool> side(zs.size());
        for (size_t i = 0; i < zs.size(); ++i) {
            if (zs[i].multiplicity != TorusZero::Mult::Simple)
                throw RegularizationMismatch(
                    "ContourHyperbolic requires simple zeros only");
            // Re xi >= 0 on the arc when xi = i*eta: eta' > 0 -> lower arc
            side[i] = !(zs[i].derivative_value > 0);
        }
        Contour c = build_contour(zs, side, kTwoPi, opt.radius_override);
        return integrate_contour(c, inv_xi, opt.rel_tol);
    }
    case XiMode::ContourUnipotent: {
        auto zs = zeros();
        for (const auto& z : zs)
            if (z.multiplicity != TorusZero::Mult::Double)
                throw RegularizationMismatch(
                    "ContourUnipotent requires double zeros only");
        std::vector<bool> side(zs.size(), true);
        Contour c = build_contour(zs, side, kTwoPi, opt.radius_override);
        return integrate_contour(c, inv_xi, opt.rel_tol);
    }
    }
    throw ParameterOutOfRange("unknown XiMode");
}

} // namespace mlab
