#include "mlab/trig_poly.hpp"

#include "mlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mlab {

namespace {
int lcm2(int a, int b) { return (a == b) ? a : 2; }
} // namespace

TrigPoly::TrigPoly(Eigen::VectorXcd coeff, int denom)
    : coeff_(std::move(coeff)), denom_(denom) {
    if (coeff_.size() % 2 == 0 || coeff_.size() == 0)
        throw ParameterOutOfRange("TrigPoly coefficient vector must have odd length");
    if (denom_ != 1 && denom_ != 2)
        throw ParameterOutOfRange("TrigPoly denom must be 1 or 2");
}

TrigPoly TrigPoly::constant(Complex c) {
    Eigen::VectorXcd v(1);
    v[0] = c;
    return TrigPoly(v, 1);
}

TrigPoly TrigPoly::harmonic(int m, Complex c, int denom) {
    int n = std::abs(m);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n + 1);
    v[m + n] = c;
    return TrigPoly(v, denom);
}

TrigPoly TrigPoly::real_series(double mean, const std::vector<double>& cos_c,
                               const std::vector<double>& sin_c) {
    int n = static_cast<int>(std::max(cos_c.size(), sin_c.size()));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n + 1);
    v[n] = mean;
    for (int k = 1; k <= n; ++k) {
        double ck = (k <= (int)cos_c.size()) ? cos_c[k - 1] : 0.0;
        double sk = (k <= (int)sin_c.size()) ? sin_c[k - 1] : 0.0;
        // cos k = (e^{ik}+e^{-ik})/2, sin k = (e^{ik}-e^{-ik})/(2i)
        v[n + k] += Complex(ck / 2, -sk / 2);
        v[n - k] += Complex(ck / 2, sk / 2);
    }
    return TrigPoly(v, 1);
}

Complex TrigPoly::coeff(int m) const {
    int n = degree();
    if (m < -n || m > n) return Complex(0, 0);
    return coeff_[m + n];
}

void TrigPoly::set_coeff(int m, Complex c) {
    int n = degree();
    if (m < -n || m > n) throw ParameterOutOfRange("set_coeff outside band");
    coeff_[m + n] = c;
}

Complex TrigPoly::eval(Complex z) const {
    // Horner in w = exp(i z / denom): f = w^{-N} * sum_k c_{k-N} w^k
    const int n = degree();
    const Complex w = std::exp(Complex(0, 1) * z / double(denom_));
    Complex acc(0, 0);
    for (int i = 2 * n; i >= 0; --i) acc = acc * w + coeff_[i];
    // multiply by w^{-n}
    if (n > 0) acc *= std::exp(Complex(0, -1) * z * (double(n) / denom_));
    return acc;
}

Complex TrigPoly::eval_derivative(Complex z) const {
    return derivative().eval(z);
}

TrigPoly TrigPoly::derivative() const {
    const int n = degree();
    Eigen::VectorXcd v(coeff_.size());
    for (int m = -n; m <= n; ++m)
        v[m + n] = coeff_[m + n] * Complex(0, double(m) / denom_);
    return TrigPoly(v, denom_);
}

std::pair<TrigPoly, Complex> TrigPoly::antiderivative() const {
    const int n = degree();
    Eigen::VectorXcd v(coeff_.size());
    for (int m = -n; m <= n; ++m)
        v[m + n] = (m == 0) ? Complex(0, 0)
                            : coeff_[m + n] / Complex(0, double(m) / denom_);
    return {TrigPoly(v, denom_), coeff_[n]};
}

TrigPoly TrigPoly::conjugated() const {
    const int n = degree();
    Eigen::VectorXcd v(coeff_.size());
    for (int m = -n; m <= n; ++m) v[m + n] = std::conj(coeff_[-m + n]);
    return TrigPoly(v, denom_);
}

TrigPoly TrigPoly::real_part() const {
    TrigPoly c = conjugated();
    return (*this + c) * Complex(0.5, 0);
}

bool TrigPoly::is_real(double tol) const {
    const int n = degree();
    double scale = std::max(1.0, coeff_.cwiseAbs().maxCoeff());
    for (int m = 0; m <= n; ++m)
        if (std::abs(coeff_[m + n] - std::conj(coeff_[-m + n])) > tol * scale)
            return false;
    return true;
}

double TrigPoly::max_abs() const {
    int samples = std::max(64, 8 * degree() + 8);
    double best = 0;
    for (int j = 0; j < samples; ++j) {
        double th = kTwoPi * denom_ * j / samples;
        best = std::max(best, std::abs((*this)(th)));
    }
    return best;
}

TrigPoly TrigPoly::trimmed(double tol) const {
    const int n = degree();
    int keep = 0;
    for (int m = -n; m <= n; ++m)
        if (std::abs(coeff_[m + n]) > tol) keep = std::max(keep, std::abs(m));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * keep + 1);
    for (int m = -keep; m <= keep; ++m) {
        Complex c = coeff_[m + n];
        v[m + keep] = (std::abs(c) > tol) ? c : Complex(0, 0);
    }
    return TrigPoly(v, denom_);
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
    int d = lcm2(denom_, o.denom_);
    int sa = d / denom_, sb = d / o.denom_;
    int n = std::max(degree() * sa, o.degree() * sb);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n + 1);
    for (int m = -degree(); m <= degree(); ++m) v[m * sa + n] += coeff(m);
    for (int m = -o.degree(); m <= o.degree(); ++m) v[m * sb + n] += o.coeff(m);
    return TrigPoly(v, d);
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const { return *this + (o * Complex(-1, 0)); }

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
    int d = lcm2(denom_, o.denom_);
    int sa = d / denom_, sb = d / o.denom_;
    int n = degree() * sa + o.degree() * sb;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n + 1);
    for (int p = -degree(); p <= degree(); ++p) {
        Complex cp = coeff(p);
        if (cp == Complex(0, 0)) continue;
        for (int q = -o.degree(); q <= o.degree(); ++q)
            v[p * sa + q * sb + n] += cp * o.coeff(q);
    }
    return TrigPoly(v, d);
}

TrigPoly TrigPoly::operator*(Complex s) const {
    return TrigPoly(coeff_ * s, denom_);
}

TrigPoly TrigPoly::from_samples(const Eigen::VectorXcd& samples, int degree,
                                int denom) {
    const int K = static_cast<int>(samples.size());
    if (2 * degree + 1 > K)
        throw ParameterOutOfRange("from_samples: not enough samples for requested degree");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * degree + 1);
    // plain DFT; sample counts here are small enough that this is not a hot path
    for (int m = -degree; m <= degree; ++m) {
        Complex acc(0, 0);
        for (int j = 0; j < K; ++j) {
            double th = kTwoPi * denom * j / K;
            acc += samples[j] * std::exp(Complex(0, -double(m) / denom * th));
        }
        v[m + degree] = acc / double(K);
    }
    return TrigPoly(v, denom);
}

TrigPoly TrigPoly::fit(const std::function<Complex(double)>& f, double tail_tol,
                       int max_degree, int denom, double* tail_out) {
    int deg = 16;
    TrigPoly best;
    double tail = 0, scale = 1;
    for (;;) {
        int K = 4 * deg;
        Eigen::VectorXcd s(K);
        for (int j = 0; j < K; ++j) s[j] = f(kTwoPi * denom * j / K);
        best = from_samples(s, deg, denom);
        scale = std::max(1e-300, best.coefficients().cwiseAbs().maxCoeff());
        // tail = largest coefficient in the outer quarter of the band
        tail = 0;
        int n = best.degree();
        for (int m = 3 * n / 4; m <= n; ++m)
            tail = std::max({tail, std::abs(best.coeff(m)), std::abs(best.coeff(-m))});
        if (tail <= tail_tol * scale || deg >= max_degree) break;
        deg = std::min(max_degree, 2 * deg);
    }
    if (tail_out) *tail_out = tail / scale;
    return best.trimmed(tail_tol * scale * 1e-2);
}

TrigPoly cos_poly(int m, double a) {
    return TrigPoly::harmonic(m, a / 2.0) + TrigPoly::harmonic(-m, a / 2.0);
}

TrigPoly sin_poly(int m, double a) {
    return TrigPoly::harmonic(m, Complex(0, -a / 2.0)) +
           TrigPoly::harmonic(-m, Complex(0, a / 2.0));
}

} // namespace mlab
