#pragma once

// Radial ODEs behind the catenoid, Delaunay and chart examples: fixed-step RK4 with cubic
// Hermite dense output.

#include <Eigen/Core>

#include <vector>

namespace twinsurf {

enum class RadialLaw {
    /// h' = sqrt((t^2 - lambda^2)/(tau^2 t^2 + 1))
    kCatenoidHeight,
    /// rho' = sqrt((tau^2 t^2 + 1)/(t^2 - lambda^2))
    kCatenoidRadius,
    /// w' = sqrt(tau^2 lambda^2 cosh^2 w + 1)
    kCatenoidChart,
    /// q = rho'/sqrt(1 - rho'^2) with q' = 2 tau - q/t; first integral t q - tau t^2 = -mu
    kEllipticDelaunay,
    /// q' = 2 tau - sqrt(1 + q^2)/rho; first integral tau rho^2 - rho sqrt(1 + q^2) = lambda
    kHyperbolicDelaunay,
};

struct RadialOdeSpec {
    RadialLaw law = RadialLaw::kCatenoidRadius;
    double tau = 0;
    double lambda = 0;
    double mu = 0;
    double t0 = 0;
    double t1 = 1;
    /// Value of the tabulated function at t0.
    double initial = 0;
    double h_ode = 1e-3;
    /// Branch of q at t0 for the hyperbolic law.
    int q_sign = 1;
};

/// Tabulated solution on [t_min, t_max]. For the catenoid laws started at t0 = lambda the
/// table is kept in s = sqrt(t - lambda), where both laws are smooth.
class RadialSolution {
public:
    double value(double t) const;
    /// d/dt of the tabulated function, from the ODE right-hand side.
    double derivative(double t) const;
    /// q = rho'/sqrt(1 - rho'^2) for the Delaunay laws, 0 otherwise.
    double aux(double t) const;
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    /// Largest deviation of the first integral from its initial value (0 for laws without one).
    double first_integral_drift() const { return drift_; }
    const RadialOdeSpec& spec() const { return spec_; }

    /// Joins two solutions that share their start point and run in opposite directions.
    static RadialSolution join(const RadialSolution& a, const RadialSolution& b);

private:
    friend RadialSolution integrate_radial_ode(const RadialOdeSpec& spec);

    double param(double t) const;
    Eigen::Vector2d state(double t) const;

    RadialOdeSpec spec_;
    bool substituted_ = false;
    double origin_ = 0;
    std::vector<double> p_;
    std::vector<Eigen::Vector2d> y_;
    std::vector<Eigen::Vector2d> dy_;
    double t_min_ = 0;
    double t_max_ = 0;
    double drift_ = 0;
};

/// Throws kOde on singular or spacelike-violating states along the way.
RadialSolution integrate_radial_ode(const RadialOdeSpec& spec);

/// Right-hand side d(value, q)/dt of a law.
Eigen::Vector2d radial_rhs(const RadialOdeSpec& spec, double t, const Eigen::Vector2d& y);

/// First integral of the Delaunay laws; 0 for the others.
double first_integral(const RadialOdeSpec& spec, double t, const Eigen::Vector2d& y);

} // namespace twinsurf
