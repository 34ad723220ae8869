#include "mlab/pde_oracle.hpp"

#include "mlab/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace mlab {

Eigen::VectorXd Grid::x() const {
    Eigen::VectorXd v(Nx);
    for (int j = 0; j < Nx; ++j) v[j] = -L + 2 * L * j / Nx;
    return v;
}

Eigen::VectorXd Grid::k() const {
    Eigen::VectorXd v(Nx);
    for (int j = 0; j < Nx; ++j) {
        int m = (j < Nx / 2) ? j : j - Nx;
        v[j] = M_PI * m / L;
    }
    return v;
}

double WaveState::norm(const Grid& g) const {
    return std::sqrt(values.squaredNorm() * 2 * g.L / g.Nx);
}

namespace {

double edge_mass_fraction(const Grid& g, const Eigen::VectorXcd& v) {
    const int edge = g.Nx / 10;
    double total = v.squaredNorm(), outer = 0;
    for (int j = 0; j < edge; ++j)
        outer += std::norm(v[j]) + std::norm(v[g.Nx - 1 - j]);
    return (total > 0) ? outer / total : 0.0;
}

WaveState propagate_split_step(const SchrodingerOp& D, const Grid& g, WaveState s,
                               double theta_target, const PropagateOptions& opt) {
    Eigen::FFT<double> fft;
    const Eigen::VectorXd x = g.x(), k = g.k();
    Eigen::VectorXcd kin(g.Nx);
    Eigen::VectorXcd freq(g.Nx), half(g.Nx);

    long steps = std::lround((theta_target - s.theta) / g.dtheta);
    if (steps < 0) throw ParameterOutOfRange("propagate goes forward only");
    double dth = (theta_target - s.theta) / std::max<long>(steps, 1);
    for (int j = 0; j < g.Nx; ++j)
        kin[j] = std::exp(Complex(0, -0.5 * k[j] * k[j] * dth));

    int leak_check = std::max<long>(1, steps / 64);
    for (long n = 0; n < steps; ++n) {
        double tm = s.theta + 0.5 * dth;
        double V2 = D.V2(tm), V1 = D.V1(tm), V0 = D.V0(tm);
        for (int j = 0; j < g.Nx; ++j) {
            double V = V2 * x[j] * x[j] + V1 * x[j] + V0;
            half[j] = std::exp(Complex(0, -0.25 * V * dth));
        }
        s.values.array() *= half.array();
        fft.fwd(freq, s.values);
        freq.array() *= kin.array();
        fft.inv(s.values, freq);
        s.values.array() *= half.array();
        s.theta += dth;
        if (n % leak_check == 0 && edge_mass_fraction(g, s.values) > opt.leak_tol)
            throw BoundaryLeak("edge mass fraction exceeded " +
                               std::to_string(opt.leak_tol));
    }
    return s;
}

WaveState propagate_crank_nicolson(const SchrodingerOp& D, const Grid& g, WaveState s,
                                   double theta_target, const PropagateOptions& opt) {
    const Eigen::VectorXd x = g.x();
    const double dx = 2 * g.L / g.Nx;
    long steps = std::lround((theta_target - s.theta) / g.dtheta);
    double dth = (theta_target - s.theta) / std::max<long>(steps, 1);
    const int N = g.Nx;
    Eigen::VectorXcd dlo(N), dmid(N), dhi(N), rhs(N), scratch(N);

    for (long n = 0; n < steps; ++n) {
        double tm = s.theta + 0.5 * dth;
        double V2 = D.V2(tm), V1 = D.V1(tm), V0 = D.V0(tm);
        const Complex mu(0, dth / 4); // (i dth/4) H
        for (int j = 0; j < N; ++j) {
            double V = V2 * x[j] * x[j] + V1 * x[j] + V0;
            Complex Hdiag = 2.0 / (dx * dx) + V;
            Complex Hoff = -1.0 / (dx * dx);
            dmid[j] = 1.0 + mu * Hdiag;
            dlo[j] = mu * Hoff;
            dhi[j] = mu * Hoff;
            // rhs = (1 - mu H) psi
            Complex acc = (1.0 - mu * Hdiag) * s.values[j];
            if (j > 0) acc -= mu * Hoff * s.values[j - 1];
            if (j + 1 < N) acc -= mu * Hoff * s.values[j + 1];
            rhs[j] = acc;
        }
        // Thomas solve
        scratch[0] = dhi[0] / dmid[0];
        rhs[0] /= dmid[0];
        for (int j = 1; j < N; ++j) {
            Complex m = dmid[j] - dlo[j] * scratch[j - 1];
            scratch[j] = dhi[j] / m;
            rhs[j] = (rhs[j] - dlo[j] * rhs[j - 1]) / m;
        }
        for (int j = N - 2; j >= 0; --j) rhs[j] -= scratch[j] * rhs[j + 1];
        s.values = rhs;
        s.theta += dth;
        if (edge_mass_fraction(g, s.values) > opt.leak_tol)
            throw BoundaryLeak("edge mass fraction exceeded");
    }
    return s;
}

} // namespace

WaveState propagate(const SchrodingerOp& D, const Grid& g, const WaveState& psi0,
                    double theta_target, const PropagateOptions& opt) {
    // fresh runs must start with negligible boundary mass; continuation
    // segments are held to the running leak tolerance instead
    double entry_tol = (psi0.theta == 0) ? 1e-8 : opt.leak_tol;
    if (edge_mass_fraction(g, psi0.values) > entry_tol)
        throw BoundaryLeak("initial state has mass near the boundary");
    if (opt.backend == Propagator::SplitStep)
        return propagate_split_step(D, g, psi0, theta_target, opt);
    return propagate_crank_nicolson(D, g, psi0, theta_target, opt);
}

Complex el_expectation(const ELCoefficients& el, const Grid& g, const WaveState& s) {
    static thread_local Eigen::FFT<double> fft;
    const Eigen::VectorXd x = g.x(), k = g.k();
    const int N = g.Nx;
    Eigen::VectorXcd freq(N), d1(N), d2(N), tmp(N);
    fft.fwd(freq, s.values);
    tmp = freq;
    for (int j = 0; j < N; ++j) tmp[j] *= Complex(0, k[j]);
    fft.inv(d1, tmp);
    for (int j = 0; j < N; ++j) tmp[j] = freq[j] * (-k[j] * k[j]);
    fft.inv(d2, tmp);

    double th = s.theta;
    Complex a = el.a(th), b = el.b(th), c = el.c(th), d = el.d(th), e = el.e(th),
            f = el.f(th);
    Complex acc(0, 0);
    for (int j = 0; j < N; ++j) {
        Complex Ipsi = 0.5 * (a * x[j] * x[j] * s.values[j] - b * d2[j] -
                              Complex(0, 1) * c * (2.0 * x[j] * d1[j] + s.values[j]) +
                              d * Complex(0, -1) * d1[j] + e * x[j] * s.values[j] +
                              f * s.values[j]);
        acc += std::conj(s.values[j]) * Ipsi;
    }
    return acc * (2 * g.L / g.Nx);
}

double expectation_drift(const SchrodingerOp& D, const ELCoefficients& el,
                         const Grid& g, const WaveState& psi0, int samples,
                         const PropagateOptions& opt) {
    WaveState s = psi0;
    Complex base = el_expectation(el, g, s);
    double drift = 0;
    for (int i = 1; i <= samples; ++i) {
        double target = psi0.theta + kTwoPi * i / samples;
        s = propagate(D, g, s, target, opt);
        drift = std::max(drift, std::abs(el_expectation(el, g, s) - base));
    }
    return drift;
}

Complex measure_monodromy_phase(const SchrodingerOp& D, const Grid& g,
                                const ModelEigenfunction& state,
                                const PropagateOptions& opt) {
    WaveState s0 = sample_state(state.eval, g, 0.0);
    WaveState s1 = propagate(D, g, s0, kTwoPi, opt);
    Complex num(0, 0), den(0, 0);
    for (int j = 0; j < g.Nx; ++j) {
        num += std::conj(s0.values[j]) * s1.values[j];
        den += std::conj(s0.values[j]) * s0.values[j];
    }
    Complex phase = num / den;
    if (std::abs(phase) < 0.99)
        throw NotEigenlike("state returned with overlap modulus " +
                           std::to_string(std::abs(phase)));
    return phase;
}

WaveState sample_state(const std::function<Complex(double, double)>& f, const Grid& g,
                       double theta) {
    WaveState s;
    s.theta = theta;
    s.values.resize(g.Nx);
    Eigen::VectorXd x = g.x();
    for (int j = 0; j < g.Nx; ++j) s.values[j] = f(theta, x[j]);
    return s;
}

} // namespace mlab
