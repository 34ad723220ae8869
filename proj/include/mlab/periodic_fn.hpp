#ifndef MLAB_PERIODIC_FN_HPP
#define MLAB_PERIODIC_FN_HPP

#include "mlab/trig_poly.hpp"

#include <functional>
#include <memory>

namespace mlab {

/// A real-analytic periodic function of time.  Backed either by an exact
/// TrigPoly or by an analytic callback (e.g. the rational Kirillov family
/// potentials).  Callback-backed functions can be projected onto a finite
/// Fourier series on demand; the projection is cached and its relative
/// coefficient tail recorded in projection_tail().
class PeriodicFn {
public:
    PeriodicFn() : PeriodicFn(TrigPoly()) {}
    PeriodicFn(TrigPoly p); // NOLINT: implicit by design
    PeriodicFn(std::function<Complex(Complex)> f,
               std::function<Complex(Complex)> df = nullptr, int denom = 1);

    double operator()(double th) const { return eval(Complex(th, 0)).real(); }
    Complex eval(Complex z) const { return f_(z); }
    /// df/dtheta; exact when a closed-form derivative was supplied or the
    /// carrier is a TrigPoly, otherwise the derivative of the projection.
    PeriodicFn derivative() const;
    int denom() const { return denom_; }
    bool exact_trig() const { return trig_ != nullptr; }
    /// nullptr when callback-backed (use projection()).
    const TrigPoly* trig() const { return trig_.get(); }

    const TrigPoly& projection(double tail_tol = 1e-12, int max_degree = 512) const;
    double projection_tail() const { return proj_tail_; }

    double mean() const;

private:
    std::function<Complex(Complex)> f_;
    std::function<Complex(Complex)> df_;
    std::shared_ptr<const TrigPoly> trig_;
    mutable std::shared_ptr<const TrigPoly> proj_;
    mutable double proj_tail_ = 0;
    int denom_ = 1;
};

} // namespace mlab

#endif
