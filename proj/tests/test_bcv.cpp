#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twinsurf/bcv.hpp"

#include <random>
#include <vector>

using namespace twinsurf;
using namespace twinsurf::bcv;

TEST_CASE("delta values")
{
    CHECK(delta(0.0, 5.0, -7.0) == 1.0);
    CHECK(delta(4.0, 1.0, 1.0) == 3.0);
    CHECK(delta(-4.0, 1.0, 0.0) == 0.0);
}

TEST_CASE("base curvature identity")
{
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) pts.emplace_back(i / 9.0, j / 9.0);
    CHECK(base_curvature_identity_residual<double>(0.0, pts) <= 1e-15);
    CHECK(base_curvature_identity_residual<double>(4.0, pts) <= 1e-12);

    std::vector<Eigen::Vector2d> inside;
    for (const auto& p : pts)
        if (delta(-4.0, p.x(), p.y()) > 0) inside.push_back(p);
    CHECK(base_curvature_identity_residual<double>(-4.0, inside) <= 1e-12);

    const std::vector<Eigen::Vector2d> bad{{1.0, 0.0}};
    CHECK_THROWS_AS(base_curvature_identity_residual<double>(-4.0, bad), Error);
}

TEST_CASE("flat frame is the standard basis")
{
    const Frame fr = frames_and_metric(BcvParams{}, BcvPoint{0.3, -0.2, 1.0});
    CHECK(fr.metric.isApprox(Eigen::Matrix3d::Identity()));
    CHECK(fr.frame.isApprox(Eigen::Matrix3d::Identity()));
}

TEST_CASE("Heisenberg frames are orthonormal")
{
    const Frame r = frames_and_metric(BcvParams{0, 0.5, Signature::kRiemannian}, BcvPoint{1, 0, 0});
    CHECK((r.gram() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);

    const Frame l = frames_and_metric(BcvParams{0, 1, Signature::kLorentzian}, BcvPoint{0, 1, 0});
    CHECK((l.gram() - Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("random frames are orthonormal")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (double kappa : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
        for (auto sig : {Signature::kRiemannian, Signature::kLorentzian}) {
            const Eigen::Vector3d diag(1, 1, sig == Signature::kRiemannian ? 1 : -1);
            for (int k = 0; k < 200; ++k) {
                const BcvPoint p{u(rng), u(rng), u(rng)};
                if (delta(kappa, p.x, p.y) <= 1e-6) continue;
                const Frame fr = frames_and_metric(BcvParams{kappa, u(rng), sig}, p);
                CHECK((fr.gram() - diag.asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() <= 1e-12);
            }
        }
    }
}

TEST_CASE("frames reject points outside the domain")
{
    CHECK_THROWS_AS(frames_and_metric(BcvParams{-4, 0, Signature::kRiemannian}, BcvPoint{2, 0, 0}), Error);
}
