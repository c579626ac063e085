#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twinsurf/twin2.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace twinsurf;

namespace {

double sq(double h) { return h * h; }

GridHandle disk(int n, double r)
{
    return make_grid(GridSpec{n, n, -r, r, -r, r}, regions::disk(r));
}

GridHandle slit(int n)
{
    const GridSpec spec{n, n, -3, 3, -3, 3};
    return make_grid(spec, regions::slit_annulus(1, 3, 0.5 * spec.hy()), 2, 0);
}

MultiGraph half_z2(const GridHandle& g)
{
    return {{ScalarField::sample(g, [](double x, double y) { return 0.5 * (x * x - y * y); }),
             ScalarField::sample(g, [](double x, double y) { return x * y; })}};
}

MultiGraph zero(const GridHandle& g, int n)
{
    return {std::vector<ScalarField>(n, ScalarField(g, 0.0))};
}

ScalarField radial(const GridHandle& g, double (*fn)(double))
{
    return ScalarField::sample(g, [fn](double x, double y) { return fn(std::hypot(x, y)); });
}

} // namespace

TEST_CASE("validation")
{
    const auto g = disk(21, 1);
    CHECK_NOTHROW(validate(zero(g, 3)));
    CHECK_THROWS_AS(validate(MultiGraph{}), Error);
    CHECK_THROWS_AS(validate(zero(g, 9)), Error);
    const auto other = disk(23, 1);
    CHECK_THROWS_AS(validate(MultiGraph{{ScalarField(g, 0.0), ScalarField(other, 0.0)}}), Error);
}

TEST_CASE("first fundamental form of the zero map")
{
    const FirstFundamental ff = first_fundamental(zero(disk(21, 1), 2), Signature::kRiemannian);
    CHECK((ff.E - 1.0).max_abs() == 0.0);
    CHECK((ff.G - 1.0).max_abs() == 0.0);
    CHECK(ff.F.max_abs() == 0.0);
    CHECK((ff.omega - 1.0).max_abs() == 0.0);
}

TEST_CASE("first fundamental form of the half z squared graph")
{
    const auto g = disk(201, 0.9);
    const FirstFundamental ff = first_fundamental(half_z2(g), Signature::kRiemannian);
    const ScalarField w = ScalarField::sample(g, [](double x, double y) { return 1 + x * x + y * y; });
    const double tol = 5 * sq(g->h());
    CHECK((ff.E - w).max_abs() <= tol);
    CHECK((ff.G - w).max_abs() <= tol);
    CHECK(ff.F.max_abs() <= tol);
    CHECK((ff.omega - w).max_abs() <= tol);
}

TEST_CASE("helicoid omega")
{
    const auto g = slit(201);
    const MultiGraph mg{{ScalarField::sample(g, [](double x, double y) { return std::atan2(y, x); })}};
    const FirstFundamental ff = first_fundamental(mg, Signature::kRiemannian);
    CHECK((ff.omega - radial(g, [](double r) { return std::sqrt(1 + 1 / (r * r)); })).max_abs() <= 5 * sq(g->h()));
}

TEST_CASE("Lorentzian first fundamental form rejects timelike input")
{
    const auto g = disk(21, 1);
    const MultiGraph mg{{ScalarField::sample(g, [](double x, double) { return 2 * x; })}};
    try {
        first_fundamental(mg, Signature::kLorentzian);
        FAIL("expected spacelike failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kSpacelike);
    }
}

TEST_CASE("Lagrange identity")
{
    const auto g = disk(101, 0.9);
    const MultiGraph z = zero(g, 2);
    const FirstFundamental fz = first_fundamental(z, Signature::kRiemannian);
    CHECK(lagrange_identity_residual(z, fz, area_angle(fz)) == 0.0);

    const MultiGraph h = half_z2(g);
    const FirstFundamental fh = first_fundamental(h, Signature::kRiemannian);
    CHECK(lagrange_identity_residual(h, fh, area_angle(fh)) <= 1e-12);

    const MultiGraph r{{ScalarField::sample(g, [](double x, double y) { return 0.3 * std::sin(x + 2 * y); }),
                        ScalarField::sample(g, [](double x, double y) { return 0.2 * x * y * y; }),
                        ScalarField::sample(g, [](double x, double y) { return 0.25 * std::cos(x - y); })}};
    const FirstFundamental fr = first_fundamental(r, Signature::kRiemannian);
    CHECK(lagrange_identity_residual(r, fr, area_angle(fr)) <= 1e-12);
}

TEST_CASE("area angle")
{
    const AreaAngle z = area_angle(zero(disk(21, 1), 2));
    CHECK(z.normJ.max_abs() == 0.0);
    CHECK((z.theta - std::numbers::pi / 2).max_abs() <= 1e-15);

    const auto g = disk(201, 0.9);
    const AreaAngle a = area_angle(half_z2(g));
    const ScalarField r2 = ScalarField::sample(g, [](double x, double y) { return x * x + y * y; });
    CHECK((a.normJ - r2).max_abs() <= 5 * sq(g->h()));
    CHECK((a.theta - ScalarField::sample(g, [](double x, double y) { return std::acos(x * x + y * y); })).max_abs() <= 5 * sq(g->h()));

    try {
        area_angle(half_z2(disk(201, 1.1)));
        FAIL("expected area failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kNotAreaDecreasing);
        CHECK_FALSE(e.nodes().empty());
    }
}

TEST_CASE("minimal system")
{
    // coarse grid: second differences amplify rounding by 1/h^2
    const auto c = disk(21, 0.9);
    const MultiGraph aff{{ScalarField::sample(c, [](double x, double y) { return 2 * x - y + 1; }),
                          ScalarField::sample(c, [](double x, double y) { return 0.5 * y + x; })}};
    CHECK(minimal_system_residual(aff).nondivergence_report().max_abs <= 1e-12);

    const auto g = disk(201, 0.9);
    const SystemResidual s = minimal_system_residual(half_z2(g));
    CHECK(s.nondivergence_report().max_abs <= 10 * sq(g->h()));
    CHECK(s.divergence_report().max_abs <= 10 * sq(g->h()));

    const auto gs = slit(201);
    const MultiGraph hel{{ScalarField::sample(gs, [](double x, double y) { return std::atan2(y, x); })}};
    CHECK(minimal_system_residual(hel).nondivergence_report().max_abs <= 10 * sq(gs->h()));
    CHECK(minimal_system_residual(hel).divergence_report().max_abs <= 10 * sq(gs->h()));
}

TEST_CASE("zero-divergence identities")
{
    CHECK(mss2_identities_residual(first_fundamental(zero(disk(21, 1), 2), Signature::kRiemannian)).max_abs == 0.0);

    const auto gs = slit(201);
    const MultiGraph hel{{ScalarField::sample(gs, [](double x, double y) { return std::atan2(y, x); })}};
    CHECK(mss2_identities_residual(first_fundamental(hel, Signature::kRiemannian)).max_abs <= 10 * sq(gs->h()));

    const auto g = disk(201, 0.9);
    CHECK(mss2_identities_residual(first_fundamental(half_z2(g), Signature::kRiemannian)).max_abs <= 10 * sq(g->h()));
}

TEST_CASE("maximal system")
{
    const MultiGraph z = zero(disk(21, 1), 2);
    CHECK(maximal_system_residual(z, first_fundamental(z, Signature::kLorentzian)).nondivergence_report().max_abs == 0.0);

    const auto gs = slit(201);
    const MultiGraph cat{{radial(gs, [](double r) { return std::asinh(r); })}};
    const SystemResidual s = maximal_system_residual(cat, first_fundamental(cat, Signature::kLorentzian));
    CHECK(s.nondivergence_report().max_abs <= 10 * sq(gs->h()));
    CHECK(s.divergence_report().max_abs <= 10 * sq(gs->h()));
}

TEST_CASE("codim twin of the helicoid is the Lorentz catenoid")
{
    const auto g = slit(201);
    const MultiGraph hel{{ScalarField::sample(g, [](double x, double y) { return std::atan2(y, x); })}};
    const CodimTwinResult t = twin_transform_codim(hel);
    CHECK(t.signature == Signature::kLorentzian);
    ScalarField cat = radial(g, [](double r) { return std::asinh(r); });
    cat -= cat.at(g->anchor());
    CHECK((t.twin.f[0] + cat).max_abs() <= 10 * sq(g->h()));
    CHECK(involutivity_check_codim(hel).max_abs <= 20 * sq(g->h()));

    const DualityReport d = duality_checks(hel, t.twin);
    CHECK(d.angle.max_abs <= 10 * sq(g->h()));
}

TEST_CASE("zero map twin")
{
    const MultiGraph z = zero(disk(21, 1), 2);
    const CodimTwinResult t = twin_transform_codim(z);
    CHECK(t.twin.f[0].max_abs() == 0.0);
    CHECK(t.twin.f[1].max_abs() == 0.0);
    const DualityReport d = duality_checks(z, t.twin);
    CHECK(d.jacobian.max_abs == 0.0);
    CHECK(d.angle.max_abs == 0.0);
    CHECK(d.conformal.max_abs == 0.0);
    CHECK(d.step_b1.max_abs == 0.0);
    CHECK(involutivity_check_codim(z).max_abs == 0.0);
}

TEST_CASE("half z squared twin dualities")
{
    const auto g = disk(201, 0.9);
    const double h2 = sq(g->h());
    const MultiGraph mg = half_z2(g);
    const CodimTwinResult t = twin_transform_codim(mg);
    const FirstFundamental fh = first_fundamental(t.twin, Signature::kLorentzian);
    CHECK(maximal_system_residual(t.twin, fh).nondivergence_report().max_abs <= 20 * h2);

    const DualityReport d = duality_checks(mg, t.twin);
    CHECK(d.jacobian.max_abs <= 10 * h2);
    CHECK(d.angle.max_abs <= 10 * h2);
    CHECK(d.conformal.max_abs <= 10 * h2);
    CHECK(d.step_b1.max_abs <= 10 * h2);
    CHECK(d.step_a3.max_abs <= 10 * h2);
    CHECK(d.area_angle.max_abs <= 10 * h2);

    const FirstFundamental ff = first_fundamental(mg, Signature::kRiemannian);
    const ScalarField r4 = ScalarField::sample(g, [](double x, double y) { return 1 - std::pow(x * x + y * y, 2); });
    CHECK((fh.omega * ff.omega - r4).max_abs() <= 10 * h2);

    CHECK(involutivity_check_codim(mg).max_abs <= 40 * h2);
}

TEST_CASE("area-violating input has no twin")
{
    CHECK_THROWS_AS(twin_transform_codim(half_z2(disk(101, 1.1))), Error);
}

TEST_CASE("twin relations invert each other at a node")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int n = 1; n <= 5; ++n) {
        for (int k = 0; k < 20; ++k) {
            NodeGradients ab(2, n);
            for (int c = 0; c < n; ++c) ab.col(c) << u(rng) / n, u(rng) / n;
            const NodeGradients back = inverse_twin_relation(forward_twin_relation(ab));
            CHECK((back - ab).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("n equals one reduces to the Calabi relation")
{
    NodeGradients ab(2, 1);
    ab << 0.3, -0.7;
    const double w = std::sqrt(1 + 0.09 + 0.49);
    const NodeGradients t = forward_twin_relation(ab);
    CHECK(t(0, 0) == doctest::Approx(0.7 / w));
    CHECK(t(1, 0) == doctest::Approx(0.3 / w));
}

TEST_CASE("reflection negates every height")
{
    const auto g = disk(21, 0.9);
    const MultiGraph r = reflect_heights(half_z2(g));
    CHECK((r.f[1] + ScalarField::sample(g, [](double x, double y) { return x * y; })).max_abs() == 0.0);
}
