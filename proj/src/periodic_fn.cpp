#include "mlab/periodic_fn.hpp"

#include "mlab/quadrature.hpp"

namespace mlab {

PeriodicFn::PeriodicFn(TrigPoly p) {
    auto sp = std::make_shared<TrigPoly>(std::move(p));
    trig_ = sp;
    proj_ = sp;
    denom_ = sp->denom();
    f_ = [sp](Complex z) { return sp->eval(z); };
}

PeriodicFn::PeriodicFn(std::function<Complex(Complex)> f,
                       std::function<Complex(Complex)> df, int denom)
    : f_(std::move(f)), df_(std::move(df)), denom_(denom) {}

PeriodicFn PeriodicFn::derivative() const {
    if (trig_) return PeriodicFn(trig_->derivative());
    if (df_) return PeriodicFn(df_, nullptr, denom_);
    return PeriodicFn(projection().derivative());
}

const TrigPoly& PeriodicFn::projection(double tail_tol, int max_degree) const {
    if (!proj_) {
        auto f = f_;
        double tail = 0;
        proj_ = std::make_shared<TrigPoly>(TrigPoly::fit(
            [f](double th) { return f(Complex(th, 0)); }, tail_tol, max_degree,
            denom_, &tail));
        proj_tail_ = tail;
    }
    return *proj_;
}

double PeriodicFn::mean() const {
    if (trig_ && trig_->denom() == 1) return trig_->mean().real();
    double period = kTwoPi * denom_;
    return integrate([&](double t) { return eval(Complex(t, 0)); }, 0, period)
               .value.real() /
           period;
}

} // namespace mlab
