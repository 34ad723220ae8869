#ifndef MLAB_ODE_HPP
#define MLAB_ODE_HPP

#include "mlab/errors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

namespace mlab {

/// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with mandatory output
/// points: the step size is clipped so every requested abscissa is hit
/// exactly, and on_sample is invoked there.  Scalar may be double or
/// std::complex<double>.
template <typename Scalar>
void integrate_ode(
    const std::function<void(double, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& rhs,
    double t0, double t1, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y,
    double rtol, double atol, const std::vector<double>& samples,
    const std::function<void(double, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>&
        on_sample) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const int n = static_cast<int>(y.size());
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    double t = t0;
    size_t next_sample = 0;
    while (next_sample < samples.size() && samples[next_sample] <= t0 + 1e-14) {
        on_sample(t0, y);
        ++next_sample;
    }

    rhs(t, y, k1);
    double h = (t1 - t0) / 100.0;
    int rejected_in_row = 0;
    long steps = 0;
    const long max_steps = 40'000'000;

    while (t < t1 - 1e-14) {
        if (++steps > max_steps)
            throw IntegratorFailure("step budget exceeded");
        bool hit_sample = false;
        double target = t1;
        if (next_sample < samples.size() && samples[next_sample] < target)
            target = samples[next_sample];
        if (t + h >= target - 1e-14) {
            h = target - t;
            hit_sample = (target != t1) || (next_sample < samples.size() &&
                                            std::abs(samples[next_sample] - target) < 1e-13);
        }

        ytmp = y + h * a21 * k1;
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);

        double err = 0;
        for (int i = 0; i < n; ++i) {
            double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double e = std::abs(h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                     e5 * k5[i] + e6 * k6[i] + e7 * k7[i]));
            err = std::max(err, e / sc);
        }

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            rejected_in_row = 0;
            if (hit_sample) {
                while (next_sample < samples.size() && samples[next_sample] <= t + 1e-13) {
                    on_sample(t, y);
                    ++next_sample;
                }
            }
        } else if (++rejected_in_row > 60) {
            throw IntegratorFailure("step control cannot meet tolerance");
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (!(h > 1e-15)) throw IntegratorFailure("step size underflow");
    }
    while (next_sample < samples.size()) {
        on_sample(t1, y);
        ++next_sample;
    }
}

/// Uniform grid of k+1 sample points covering [0, span].
std::vector<double> uniform_samples(int k, double span);

} // namespace mlab

#endif
