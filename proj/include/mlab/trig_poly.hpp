#ifndef MLAB_TRIG_POLY_HPP
#define MLAB_TRIG_POLY_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace mlab {

using Complex = std::complex<double>;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Finite Fourier series f(theta) = sum_{m=-N..N} c_m exp(i m theta / denom).
///
/// denom == 1 is the ordinary 2*pi-periodic case.  denom == 2 admits
/// half-integer harmonics (4*pi-periodic carriers); these show up as
/// anti-periodic drift terms for odd family index n.  All operations are
/// exact on the coefficients, and eval() extends f to an entire function of
/// the complex time variable, which is what the contour integrals rely on.
class TrigPoly {
public:
    TrigPoly() : coeff_(Eigen::VectorXcd::Zero(1)), denom_(1) {}
    TrigPoly(Eigen::VectorXcd coeff, int denom = 1);

    static TrigPoly constant(Complex c);
    /// c * exp(i m theta / denom)
    static TrigPoly harmonic(int m, Complex c, int denom = 1);
    /// mean + sum_k cos_c[k-1] cos(k theta) + sin_c[k-1] sin(k theta)
    static TrigPoly real_series(double mean,
                                const std::vector<double>& cos_c,
                                const std::vector<double>& sin_c);
    /// Projection of uniform samples over one full period (2*pi*denom).
    static TrigPoly from_samples(const Eigen::VectorXcd& samples, int degree,
                                 int denom = 1);
    /// Adaptive projection of an analytic periodic function: the degree grows
    /// until the coefficient tail drops below tail_tol * scale.
    /// Reports the achieved tail in *tail_out when non-null.
    static TrigPoly fit(const std::function<Complex(double)>& f,
                        double tail_tol = 1e-13, int max_degree = 512,
                        int denom = 1, double* tail_out = nullptr);

    int degree() const { return static_cast<int>(coeff_.size() / 2); }
    int denom() const { return denom_; }
    /// Coefficient of exp(i m theta / denom); 0 outside the stored band.
    Complex coeff(int m) const;
    void set_coeff(int m, Complex c);

    Complex operator()(double theta) const { return eval(Complex(theta, 0)); }
    Complex eval(Complex z) const;
    /// Derivative of eval in the complex sense (exact).
    Complex eval_derivative(Complex z) const;

    TrigPoly derivative() const;
    /// Zero-mean periodic primitive of (f - mean); the mean is returned
    /// separately because the primitive of a nonzero-mean function is not
    /// periodic.
    std::pair<TrigPoly, Complex> antiderivative() const;
    Complex mean() const { return coeff(0); }

    TrigPoly conjugated() const;
    TrigPoly real_part() const;
    bool is_real(double tol = 1e-11) const;
    /// Sup-norm estimate on a uniform grid (grid size adapted to degree).
    double max_abs() const;
    /// Truncate trailing coefficients below tol (absolute).
    TrigPoly trimmed(double tol = 0.0) const;

    TrigPoly operator+(const TrigPoly& o) const;
    TrigPoly operator-(const TrigPoly& o) const;
    TrigPoly operator*(const TrigPoly& o) const;
    TrigPoly operator*(Complex s) const;
    TrigPoly operator-() const { return *this * Complex(-1, 0); }
    friend TrigPoly operator*(Complex s, const TrigPoly& f) { return f * s; }

    const Eigen::VectorXcd& coefficients() const { return coeff_; }

private:
    // index i <-> frequency (i - degree()) / denom_
    Eigen::VectorXcd coeff_;
    int denom_;
};

/// cos(m theta), sin(m theta) helpers.
TrigPoly cos_poly(int m, double amplitude = 1.0);
TrigPoly sin_poly(int m, double amplitude = 1.0);

} // namespace mlab

#endif
