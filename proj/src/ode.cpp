#include "twinsurf/ode.hpp"

#include "twinsurf/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twinsurf {

namespace {

bool is_catenoid(RadialLaw law)
{
    return law == RadialLaw::kCatenoidHeight || law == RadialLaw::kCatenoidRadius;
}

bool has_aux(RadialLaw law)
{
    return law == RadialLaw::kEllipticDelaunay || law == RadialLaw::kHyperbolicDelaunay;
}

[[noreturn]] void fail(const std::string& what, double t)
{
    std::ostringstream os;
    os << what << " at t = " << t;
    throw Error(ErrorKind::kOde, os.str(), {}, t);
}

/// d/ds of the catenoid laws in s = sqrt(t - lambda).
Eigen::Vector2d substituted_rhs(const RadialOdeSpec& spec, double s)
{
    const double lam = spec.lambda;
    const double t = lam + s * s;
    const double tt = spec.tau * spec.tau * t * t + 1;
    if (spec.law == RadialLaw::kCatenoidRadius) return {2 * std::sqrt(tt / (t + lam)), 0};
    return {2 * s * s * std::sqrt((t + lam) / tt), 0};
}

} // namespace

Eigen::Vector2d radial_rhs(const RadialOdeSpec& spec, double t, const Eigen::Vector2d& y)
{
    const double tau = spec.tau, lam = spec.lambda;
    switch (spec.law) {
    case RadialLaw::kCatenoidHeight: {
        const double a = t * t - lam * lam;
        if (a < 0) fail("catenoid height law evaluated inside t < lambda", t);
        return {std::sqrt(a / (tau * tau * t * t + 1)), 0};
    }
    case RadialLaw::kCatenoidRadius: {
        const double a = t * t - lam * lam;
        if (!(a > 0)) fail("catenoid radius law is singular", t);
        return {std::sqrt((tau * tau * t * t + 1) / a), 0};
    }
    case RadialLaw::kCatenoidChart: {
        const double c = std::cosh(y[0]);
        return {std::sqrt(tau * tau * lam * lam * c * c + 1), 0};
    }
    case RadialLaw::kEllipticDelaunay: {
        if (t == 0) fail("elliptic Delaunay law is singular", t);
        const double q = y[1];
        return {q / std::sqrt(1 + q * q), 2 * tau - q / t};
    }
    case RadialLaw::kHyperbolicDelaunay: {
        const double rho = y[0], q = y[1];
        if (!(rho > 0)) fail("hyperbolic Delaunay radius left rho > 0", t);
        return {q / std::sqrt(1 + q * q), 2 * tau - std::sqrt(1 + q * q) / rho};
    }
    }
    return {0, 0};
}

double first_integral(const RadialOdeSpec& spec, double t, const Eigen::Vector2d& y)
{
    switch (spec.law) {
    case RadialLaw::kEllipticDelaunay: return t * y[1] - spec.tau * t * t;
    case RadialLaw::kHyperbolicDelaunay: return spec.tau * y[0] * y[0] - y[0] * std::sqrt(1 + y[1] * y[1]);
    default: return 0;
    }
}

RadialSolution integrate_radial_ode(const RadialOdeSpec& spec)
{
    if (!(spec.h_ode > 0)) throw Error(ErrorKind::kOde, "ODE step must be positive");
    if (spec.t1 == spec.t0) throw Error(ErrorKind::kOde, "empty integration interval");

    RadialSolution sol;
    sol.spec_ = spec;
    sol.substituted_ = is_catenoid(spec.law) && spec.lambda >= 0 && spec.t1 > spec.t0
                       && std::abs(spec.t0 - spec.lambda) <= 1e-14 * (1 + spec.lambda);
    sol.origin_ = spec.t0;

    Eigen::Vector2d y(spec.initial, 0);
    if (spec.law == RadialLaw::kEllipticDelaunay) {
        if (spec.t0 == 0) fail("elliptic Delaunay needs t0 != 0", spec.t0);
        y[1] = spec.tau * spec.t0 - spec.mu / spec.t0;
    } else if (spec.law == RadialLaw::kHyperbolicDelaunay) {
        if (!(spec.initial > 0)) fail("hyperbolic Delaunay needs rho(t0) > 0", spec.t0);
        const double c = (spec.tau * spec.initial * spec.initial - spec.lambda) / spec.initial;
        if (c < 1) fail("first integral admits no spacelike start (sqrt(1 + q^2) < 1)", spec.t0);
        y[1] = (spec.q_sign >= 0 ? 1 : -1) * std::sqrt(c * c - 1);
    }

    const double p0 = sol.substituted_ ? 0.0 : spec.t0;
    const double p1 = sol.substituted_ ? std::sqrt(spec.t1 - spec.lambda) : spec.t1;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(p1 - p0) / spec.h_ode)));
    const double hp = (p1 - p0) / steps;

    auto f = [&](double p, const Eigen::Vector2d& s) -> Eigen::Vector2d {
        return sol.substituted_ ? substituted_rhs(spec, p) : radial_rhs(spec, p, s);
    };
    auto t_of = [&](double p) { return sol.substituted_ ? spec.lambda + p * p : p; };

    const double i0 = first_integral(spec, spec.t0, y);
    sol.p_.reserve(steps + 1);
    double p = p0;
    Eigen::Vector2d dy = f(p, y);
    sol.p_.push_back(p);
    sol.y_.push_back(y);
    sol.dy_.push_back(dy);
    for (int k = 0; k < steps; ++k) {
        const Eigen::Vector2d k1 = dy;
        const Eigen::Vector2d k2 = f(p + hp / 2, y + hp / 2 * k1);
        const Eigen::Vector2d k3 = f(p + hp / 2, y + hp / 2 * k2);
        const Eigen::Vector2d k4 = f(p + hp, y + hp * k3);
        y += hp / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        p = k + 1 == steps ? p1 : p0 + hp * (k + 1);
        if (!y.allFinite()) fail("ODE solution became non-finite", t_of(p));
        dy = f(p, y);
        sol.p_.push_back(p);
        sol.y_.push_back(y);
        sol.dy_.push_back(dy);
        sol.drift_ = std::max(sol.drift_, std::abs(first_integral(spec, t_of(p), y) - i0));
    }
    if (hp < 0) {
        std::reverse(sol.p_.begin(), sol.p_.end());
        std::reverse(sol.y_.begin(), sol.y_.end());
        std::reverse(sol.dy_.begin(), sol.dy_.end());
    }
    sol.t_min_ = std::min(spec.t0, spec.t1);
    sol.t_max_ = std::max(spec.t0, spec.t1);
    return sol;
}

double RadialSolution::param(double t) const
{
    if (!substituted_) return t;
    return std::sqrt(std::max(0.0, t - origin_));
}

Eigen::Vector2d RadialSolution::state(double t) const
{
    const double slack = 1e-12 * (1 + std::abs(t_max_) + std::abs(t_min_));
    if (t < t_min_ - slack || t > t_max_ + slack) fail("evaluation outside the tabulated interval", t);
    const double p = std::clamp(param(t), p_.front(), p_.back());
    auto it = std::upper_bound(p_.begin(), p_.end(), p);
    std::size_t b = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - p_.begin(), 1), p_.size() - 1);
    const std::size_t a = b - 1;
    const double hh = p_[b] - p_[a];
    const double s = (p - p_[a]) / hh;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y_[a] + (s3 - 2 * s2 + s) * hh * dy_[a] + (-2 * s3 + 3 * s2) * y_[b]
           + (s3 - s2) * hh * dy_[b];
}

double RadialSolution::value(double t) const
{
    return state(t)[0];
}

double RadialSolution::derivative(double t) const
{
    return radial_rhs(spec_, t, state(t))[0];
}

double RadialSolution::aux(double t) const
{
    return has_aux(spec_.law) ? state(t)[1] : 0.0;
}

RadialSolution RadialSolution::join(const RadialSolution& a, const RadialSolution& b)
{
    if (a.substituted_ || b.substituted_) throw Error(ErrorKind::kOde, "cannot join substituted solutions");
    if (a.spec_.t0 != b.spec_.t0) throw Error(ErrorKind::kOde, "joined solutions must share their start point");
    const RadialSolution& lo = a.t_min_ < b.t_min_ ? a : b;
    const RadialSolution& hi = a.t_min_ < b.t_min_ ? b : a;
    RadialSolution out = lo;
    out.p_.insert(out.p_.end(), hi.p_.begin() + 1, hi.p_.end());
    out.y_.insert(out.y_.end(), hi.y_.begin() + 1, hi.y_.end());
    out.dy_.insert(out.dy_.end(), hi.dy_.begin() + 1, hi.dy_.end());
    out.t_min_ = lo.t_min_;
    out.t_max_ = hi.t_max_;
    out.drift_ = std::max(a.drift_, b.drift_);
    return out;
}

} // namespace twinsurf
