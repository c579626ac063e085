#pragma once

// Bianchi-Cartan-Vranceanu ambient data: the conformal factor of the base, the base
// curvature identity, and the coordinate metric with its orthonormal frame.

#include "twinsurf/error.hpp"

#include <Eigen/Core>

#include <cmath>
#include <span>

namespace twinsurf::bcv {

enum class Signature { kRiemannian, kLorentzian };

struct BcvParams {
    double kappa = 0;
    double tau = 0;
    Signature signature = Signature::kRiemannian;
};

template <typename Scalar>
struct BasicBcvPoint {
    Scalar x = 0;
    Scalar y = 0;
    Scalar z = 0;
};

using BcvPoint = BasicBcvPoint<double>;

/// delta_kappa(x, y) = 1 + kappa/4 (x^2 + y^2).
template <typename Scalar>
constexpr Scalar delta(Scalar kappa, Scalar x, Scalar y)
{
    return Scalar(1) + kappa / Scalar(4) * (x * x + y * y);
}

/// Largest |left - right| of 2/delta^2 = d/dx(x/delta) + d/dy(y/delta) over the points, with
/// both sides evaluated from closed-form derivatives.
template <typename Scalar>
Scalar base_curvature_identity_residual(Scalar kappa, std::span<const Eigen::Matrix<Scalar, 2, 1>> points)
{
    Scalar worst = 0;
    for (const auto& p : points) {
        const Scalar x = p.x(), y = p.y();
        const Scalar d = delta(kappa, x, y);
        if (!(d > 0)) throw Error(ErrorKind::kDomain, "delta_kappa is not positive at an identity sample point");
        const Scalar d_x = kappa * x / Scalar(2);
        const Scalar d_y = kappa * y / Scalar(2);
        const Scalar lhs = Scalar(2) / (d * d);
        const Scalar rhs = (d - x * d_x) / (d * d) + (d - y * d_y) / (d * d);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

template <typename Scalar>
struct BasicFrame {
    /// Metric tensor in (x, y, z) coordinates.
    Eigen::Matrix<Scalar, 3, 3> metric;
    /// Columns are E1, E2, E3 in coordinate components.
    Eigen::Matrix<Scalar, 3, 3> frame;

    Eigen::Matrix<Scalar, 3, 3> gram() const { return frame.transpose() * metric * frame; }
};

using Frame = BasicFrame<double>;

/// Metric (dx^2 + dy^2)/delta^2 +- (tau (y dx - x dy)/delta + dz)^2 and the frame
/// E1 = delta d_x - tau y d_z, E2 = delta d_y + tau x d_z, E3 = d_z.
template <typename Scalar>
BasicFrame<Scalar> frames_and_metric(const BcvParams& params, const BasicBcvPoint<Scalar>& p)
{
    const Scalar kappa = params.kappa, tau = params.tau;
    const Scalar d = delta(kappa, p.x, p.y);
    if (!(d > 0)) throw Error(ErrorKind::kDomain, "point lies outside {delta_kappa > 0}");
    const Scalar sign = params.signature == Signature::kRiemannian ? Scalar(1) : Scalar(-1);

    Eigen::Matrix<Scalar, 3, 1> vertical(tau * p.y / d, -tau * p.x / d, Scalar(1));
    BasicFrame<Scalar> out;
    out.metric.setZero();
    out.metric(0, 0) = out.metric(1, 1) = Scalar(1) / (d * d);
    out.metric += sign * vertical * vertical.transpose();
    out.frame << d, 0, 0,
                 0, d, 0,
                 -tau * p.y, tau * p.x, 1;
    return out;
}

} // namespace twinsurf::bcv
