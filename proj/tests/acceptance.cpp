// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
// Usage: acceptance [path-to-cli] [work-dir]

#include "twinsurf/catalog.hpp"
#include "twinsurf/conformal.hpp"
#include "twinsurf/io.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

using namespace twinsurf;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, std::string note)
    {
        if (!ok) note = "FAILED " + note;
        pass = pass && ok;
        notes.push_back(std::move(note));
    }
};

int failures = 0;

void run(int id, const char* title, const std::function<void(Outcome&)>& body)
{
    Outcome out;
    try {
        body(out);
    } catch (const std::exception& e) {
        out.require(false, std::string("unexpected error: ") + e.what());
    }
    if (!out.pass) ++failures;
    fmt::print("{} criterion {}: {}\n", out.pass ? "PASS" : "FAIL", id, title);
    for (const auto& n : out.notes) fmt::print("    {}\n", n);
    std::fflush(stdout);
}

template <typename F>
ErrorKind error_kind_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    throw std::runtime_error("expected an error, none was raised");
}

MultiGraph half_z2(const GridHandle& g)
{
    return {{ScalarField::sample(g, [](double x, double y) { return 0.5 * (x * x - y * y); }),
             ScalarField::sample(g, [](double x, double y) { return x * y; })}};
}

GridHandle disk_grid(int n, double r)
{
    return make_grid(GridSpec{n, n, -r, r, -r, r}, regions::disk(r));
}

MultiGraph example_multigraph(const std::string& name, int n)
{
    const auto& ex = catalog::find_example(name);
    const auto p = catalog::merged_params(ex, {});
    const auto grid = catalog::make_domain_grid(ex.domain(p), n);
    const auto ev = catalog::eval_example(name, p, grid);
    if (const auto* g = std::get_if<GraphData>(&ev)) return MultiGraph{{g->f}};
    return std::get<MultiGraph>(ev);
}

// ---------------------------------------------------------------------------

void identities(Outcome& out)
{
    const auto t0 = Clock::now();
    std::mt19937 rng(20261018);

    double bcl = 0, rel = 0, worst_delta = 0;
    for (double kappa : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
        std::uniform_real_distribution<double> u(-3, 3);
        std::vector<Eigen::Vector2d> pts;
        while (pts.size() < 1000) {
            const Eigen::Vector2d p(u(rng), u(rng));
            if (bcv::delta(kappa, p.x(), p.y()) > 1e-6) pts.push_back(p);
        }
        bcl = std::max(bcl, bcv::base_curvature_identity_residual<double>(kappa, pts));
        // per point, relative to the size 2/delta^2 of either side
        for (const auto& p : pts) {
            const double d = bcv::delta(kappa, p.x(), p.y());
            const double r = bcv::base_curvature_identity_residual<double>(kappa, std::span(&p, 1));
            if (r * d * d / 2 > rel) rel = r * d * d / 2;
            if (r > 1e-12 && (worst_delta == 0 || d > worst_delta)) worst_delta = d;
        }
    }
    out.require(bcl <= 1e-12, fmt::format("base curvature identity, 5 x 1000 points: {:.2e}", bcl));
    out.notes.push_back(fmt::format("relative to 2/delta^2: {:.2e}; residuals above 1e-12 only where delta <= {:.2e}", rel,
                                    worst_delta));

    double frames = 0;
    {
        std::uniform_real_distribution<double> u(-2, 2);
        for (double kappa : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
            for (auto sig : {bcv::Signature::kRiemannian, bcv::Signature::kLorentzian}) {
                const Eigen::Vector3d diag(1, 1, sig == bcv::Signature::kRiemannian ? 1 : -1);
                for (int k = 0; k < 1000;) {
                    const bcv::BcvPoint p{u(rng), u(rng), u(rng)};
                    if (bcv::delta(kappa, p.x, p.y) <= 1e-6) continue;
                    ++k;
                    const bcv::Frame fr = bcv::frames_and_metric(bcv::BcvParams{kappa, u(rng), sig}, p);
                    frames = std::max(frames, (fr.gram() - diag.asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff());
                }
            }
        }
    }
    out.require(frames <= 1e-12, fmt::format("frame orthonormality, 10000 frames: {:.2e}", frames));

    double lag = 0;
    const auto g = disk_grid(41, 0.9);
    std::uniform_real_distribution<double> c(-1, 1);
    for (int n = 1; n <= 5; ++n) {
        for (int trial = 0; trial < 4; ++trial) {
            MultiGraph mg;
            for (int k = 0; k < n; ++k) {
                const double a = 0.3 * c(rng) / n, b = 0.3 * c(rng) / n, p = c(rng), q = c(rng);
                mg.f.push_back(ScalarField::sample(g, [=](double x, double y) {
                    return a * std::sin(1.5 * x + p * y) + b * std::cos(q * x - 1.2 * y) + a * b * x * y;
                }));
            }
            const FirstFundamental ff = first_fundamental(mg, Signature::kRiemannian);
            lag = std::max(lag, lagrange_identity_residual(mg, ff, area_angle(ff)));
        }
    }
    out.require(lag <= 1e-12, fmt::format("Lagrange identity, n = 1..5: {:.2e}", lag));

    const double secs = seconds_since(t0);
    out.require(secs < 1.0, fmt::format("runtime {:.3f} s (limit 1 s)", secs));
}

std::vector<catalog::PairCheckResult> pair_results;

void pair_matrix(Outcome& out)
{
    const auto t0 = Clock::now();
    for (const auto& p : catalog::twin_pairs()) {
        const auto r = catalog::check_pair(p, 201);
        pair_results.push_back(r);
        auto ratio_ok = [](double e, double ratio) { return e <= 1e-11 || (ratio >= 3.2 && ratio <= 4.8); };
        const bool ok = r.forward_error <= r.tol && r.inverse_error <= r.tol && ratio_ok(r.forward_error, r.forward_ratio)
                        && ratio_ok(r.inverse_error, r.inverse_ratio);
        out.require(ok, fmt::format("{}: forward {:.2e} (x{:.2f}), inverse {:.2e} (x{:.2f}), tol {:.1e}", r.label,
                                    r.forward_error, r.forward_ratio, r.inverse_error, r.inverse_ratio, r.tol));
    }
    const double secs = seconds_since(t0);
    out.require(secs < 30.0, fmt::format("runtime {:.1f} s including refined grids (limit 30 s)", secs));
}

void involution(Outcome& out)
{
    if (pair_results.empty()) {
        for (const auto& p : catalog::twin_pairs()) pair_results.push_back(catalog::check_pair(p, 201));
    }
    for (const auto& r : pair_results) {
        out.require(r.involution_error <= r.involution_tol,
                    fmt::format("{}: {:.2e} (tol {:.1e})", r.label, r.involution_error, r.involution_tol));
    }
}

void codim_dualities(Outcome& out)
{
    const auto g = disk_grid(201, 0.9);
    const double h2 = g->h() * g->h();
    const MultiGraph mg = half_z2(g);
    const CodimTwinResult t = twin_transform_codim(mg);

    const FirstFundamental fh = first_fundamental(t.twin, Signature::kLorentzian);
    const SystemResidual sys = maximal_system_residual(t.twin, fh);
    const double maxsys = std::max(sys.nondivergence_report().max_abs, sys.divergence_report().max_abs);
    out.require(maxsys <= 20 * h2, fmt::format("maximal system of the twin: {:.2e} (tol {:.1e})", maxsys, 20 * h2));

    const DualityReport d = duality_checks(mg, t.twin);
    out.require(d.jacobian.max_abs <= 10 * h2, fmt::format("Jacobian preservation: {:.2e} (tol {:.1e})", d.jacobian.max_abs, 10 * h2));

    const FirstFundamental ff = first_fundamental(mg, Signature::kRiemannian);
    const ScalarField expected = ScalarField::sample(g, [](double x, double y) { return 1 - std::pow(x * x + y * y, 2); });
    const double angle = (fh.omega * ff.omega - expected).max_abs();
    out.require(angle <= 10 * h2, fmt::format("|omega^ omega - (1 - r^4)|: {:.2e} (tol {:.1e})", angle, 10 * h2));

    out.require(d.conformal.max_abs <= 20 * h2,
                fmt::format("conformal equivalence: {:.2e} (tol {:.1e})", d.conformal.max_abs, 20 * h2));
}

void conformal_chart(Outcome& out)
{
    const std::vector<std::string> minimal{"helicoid_R3",      "catenoid_R3", "skew_catenoid_R3", "scherk_doubly_R3",
                                           "scherk2_R3",       "scherk_singly_R3", "half_z_squared_R4"};
    const std::vector<std::string> convergence{"helicoid_R3", "skew_catenoid_R3", "scherk_doubly_R3", "scherk_singly_R3",
                                               "half_z_squared_R4"};

    struct Residuals {
        double jmin, null_f, null_g, twin, twin_literal;
    };
    auto measure = [](const std::string& name, int n) {
        const MultiGraph mg = example_multigraph(name, n);
        const ConformalChart chart = build_conformal_chart(mg, first_fundamental(mg, Signature::kRiemannian));
        const CodimTwinResult t = twin_transform_codim(mg);
        const MultiGraph reflected = reflect_heights(t.twin);
        const WeierstrassData wf = weierstrass_data(chart, mg, Signature::kRiemannian);
        const WeierstrassData wg = weierstrass_data(chart, t.twin, Signature::kLorentzian);
        const WeierstrassData wr = weierstrass_data(chart, reflected, Signature::kLorentzian);
        return Residuals{chart.J_psi.min_value(), nullity_residual(wf).max_abs, nullity_residual(wr).max_abs,
                         weierstrass_twin_residual(wf, wr).max_abs, weierstrass_twin_residual(wf, wg).max_abs};
    };

    for (const auto& name : minimal) {
        const double jmin = measure(name, 201).jmin;
        out.require(jmin > 2, fmt::format("{}: min J_psi = {:.4f}", name, jmin));
    }

    // exact (polynomial) inputs are resolved to rounding level and exempt from the ratio
    auto shrinks = [](double coarse, double fine) { return fine <= 1e-9 || coarse / fine >= 1.8; };
    for (const auto& name : convergence) {
        const Residuals a = measure(name, 201), b = measure(name, 401);
        const bool ok = shrinks(a.null_f, b.null_f) && shrinks(a.null_g, b.null_g) && shrinks(a.twin, b.twin);
        out.require(ok, fmt::format("{}: nullity {:.2e} -> {:.2e}, twin nullity {:.2e} -> {:.2e}, "
                                    "twin relation {:.2e} -> {:.2e} (literal twin orientation: {:.2e})",
                                    name, a.null_f, b.null_f, a.null_g, b.null_g, a.twin, b.twin, a.twin_literal));
    }
}

void ode_checks(Outcome& out)
{
    auto drift = [](RadialOdeSpec s) { return integrate_radial_ode(s).first_integral_drift(); };

    RadialOdeSpec e;
    e.law = RadialLaw::kEllipticDelaunay;
    e.tau = 0.5;
    e.mu = 1;
    e.t0 = 1;
    e.t1 = 3;
    const double de = drift(e);
    out.require(de <= 1e-8, fmt::format("elliptic Delaunay (tau 1/2, mu 1) drift: {:.2e}", de));

    auto hyperbolic = [&](double tau, double lambda, double rho0, const char* label) {
        for (double end : {0.5, -0.5}) {
            RadialOdeSpec h;
            h.law = RadialLaw::kHyperbolicDelaunay;
            h.tau = tau;
            h.lambda = lambda;
            h.t0 = 0;
            h.t1 = end;
            h.initial = rho0;
            const double d = drift(h);
            out.require(d <= 1e-8, fmt::format("{} drift towards y = {}: {:.2e}", label, end, d));
        }
    };
    hyperbolic(0.5, -0.5, 1.5, "hyperbolic Delaunay (tau 1/2, lambda -1/2)");
    hyperbolic(1.0, -4.0, 2.0, "semitrough (tau 1, lambda -4)");

    RadialOdeSpec c;
    c.law = RadialLaw::kCatenoidRadius;
    c.tau = 0;
    c.lambda = 1;
    c.t0 = 1;
    c.t1 = 3;
    const RadialSolution cs = integrate_radial_ode(c);
    double ac = 0;
    for (double t = 1; t <= 3; t += 1e-3) ac = std::max(ac, std::abs(cs.value(t) - std::acosh(t)));
    out.require(ac <= 1e-8, fmt::format("tau = 0 catenoid law vs arccosh on [1, 3]: {:.2e}", ac));

    RadialOdeSpec s;
    s.law = RadialLaw::kEllipticDelaunay;
    s.tau = 0;
    s.mu = -1;
    s.t0 = 1;
    s.t1 = 3;
    s.initial = std::asinh(1.0);
    const RadialSolution ss = integrate_radial_ode(s);
    double as = 0;
    for (double t = 1; t <= 3; t += 1e-3) as = std::max(as, std::abs(ss.value(t) - std::asinh(t)));
    out.require(as <= 1e-8, fmt::format("tau = 0 Delaunay law (mu = -1) vs arcsinh on [1, 3]: {:.2e}", as));
}

void spacelike_regions(Outcome& out)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mu(-2, 2), tau(-3, 3), unit(-1, 1);
    int mismatches = 0, unbounded = 0, checked = 0;
    for (int k = 0; k < 100; ++k) {
        const double m1 = mu(rng), m2 = mu(rng);
        double t = tau(rng);
        if (std::abs(t) < 1e-3) t = std::copysign(1e-3, t);
        const SpacelikeRegion r = affine_spacelike_region(m1, m2, t);
        if (r.kind != SpacelikeRegion::Kind::kDisk || !std::isfinite(r.radius)) ++unbounded;
        const double span = std::abs(r.cx) + std::abs(r.cy) + 2 * r.radius;
        for (int s = 0; s < 200; ++s) {
            const double x = span * unit(rng), y = span * unit(rng);
            const double q = 1 - std::pow(m1 + t * y, 2) - std::pow(m2 - t * x, 2);
            if (std::abs(q) < 1e-9) continue;
            ++checked;
            if ((q > 0) != r.contains(x, y)) ++mismatches;
        }
    }
    out.require(mismatches == 0, fmt::format("disk vs inequality: {} mismatches in {} samples", mismatches, checked));
    out.require(unbounded == 0, fmt::format("unbounded regions for |tau| >= 1e-3: {}", unbounded));

    // the plane q = x/2 in Nil3_1(1): spacelike on its disk, not on a box around it
    const SpacelikeRegion r = affine_spacelike_region(0.5, 0, 1);
    const double R = 0.98 * r.radius;
    const auto inside = make_grid(GridSpec{81, 81, r.cx - R, r.cx + R, r.cy - R, r.cy + R}, regions::disk(R, r.cx, r.cy),
                                  r.cx, r.cy);
    const CmcParams nil{0, 1, 0, -1};
    auto plane = [](const GridHandle& g) { return ScalarField::sample(g, [](double x, double) { return 0.5 * x; }); };
    bool inside_ok = true;
    try {
        make_graph_data(plane(inside), nil);
    } catch (const Error&) {
        inside_ok = false;
    }
    const auto wide = make_grid(GridSpec{81, 81, r.cx - 2, r.cx + 2, r.cy - 2, r.cy + 2}, regions::everything(), r.cx, r.cy);
    const ErrorKind k = error_kind_of([&] { make_graph_data(plane(wide), nil); });
    out.require(inside_ok && k == ErrorKind::kSpacelike, "graph check: spacelike inside the disk, rejected on a larger box");
}

void lam_identity(Outcome& out)
{
    const auto g = make_grid(GridSpec{201, 201, -1, 1, -1, 1}, regions::everything());
    const double tol = 10 * g->h() * g->h();
    const std::vector<std::pair<std::string, std::function<double(double, double)>>> fns{
        {"xy", [](double x, double y) { return x * y; }},
        {"cosh x", [](double x, double) { return std::cosh(x); }},
        {"x^2 + 3xy", [](double x, double y) { return x * x + 3 * x * y; }},
    };
    for (const auto& [label, fn] : fns) {
        const double e = catalog::hessian_zero_residuals(ScalarField::sample(g, fn)).identity_report().max_abs;
        out.require(e <= tol, fmt::format("{} on [-1, 1]^2: {:.2e} (tol {:.1e}, {:.1f} h^2)", label, e, tol, e / (tol / 10)));
    }
}

void negatives(Outcome& out, const std::string& cli, const fs::path& work)
{
    const auto box = make_grid(GridSpec{41, 41, -1, 1, -1, 1}, regions::everything());
    const ScalarField x2 = ScalarField::sample(box, [](double x, double) { return x * x; });
    const ErrorKind k1 = error_kind_of([&] { twin_transform(make_graph_data(x2, CmcParams{})); });
    out.require(k1 == ErrorKind::kNotAGradient, fmt::format("twin of z = x^2 in R3: {}", to_string(k1)));

    if (!cli.empty()) {
        fs::create_directories(work);
        const fs::path csv = work / "x_squared.csv";
        io::write_csv(csv.string(), {x2});
        const std::string cmd = fmt::format("\"{}\" twin --input \"{}\" --output \"{}\" > \"{}\" 2>&1", cli, csv.string(),
                                            (work / "x_squared_twin.csv").string(), (work / "x_squared_twin.json").string());
        const int status = std::system(cmd.c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        out.require(code == 4, fmt::format("CLI twin on z = x^2: exit {}", code));
    }

    const ErrorKind k2 = error_kind_of([&] { area_angle(half_z2(disk_grid(101, 1.1))); });
    out.require(k2 == ErrorKind::kNotAreaDecreasing, fmt::format("area angle of z^2/2 on r <= 1.1: {}", to_string(k2)));

    const GridSpec spec{61, 61, -3, 3, -3, 3};
    const auto ring = make_grid(spec, regions::annulus(1, 3), 2, 0);
    const bool simply = check_simply_connected(*ring);
    const ErrorKind k3 = error_kind_of([&] { integrate_potential(VectorField2{ScalarField(ring, 1.0), ScalarField(ring, 0.0)}); });
    out.require(!simply && k3 == ErrorKind::kTopology, fmt::format("annulus: simply connected = {}, potential: {}", simply, to_string(k3)));
}

} // namespace

int main(int argc, char** argv)
{
    const std::string cli = argc > 1 ? argv[1] : "";
    const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "twinsurf_acceptance";

    run(1, "algebraic identities to machine precision", identities);
    run(2, "closed-form twin pairs at 201 x 201 with second-order convergence", pair_matrix);
    run(3, "twin of twin returns the input", involution);
    run(4, "higher-codimension dualities on z^2/2", codim_dualities);
    run(5, "conformal chart and Weierstrass data", conformal_chart);
    run(6, "ODE first integrals and tau = 0 reductions", ode_checks);
    run(7, "affine spacelike regions in Lorentzian Heisenberg space", spacelike_regions);
    run(8, "Hessian-zero identity in divergence form", lam_identity);
    run(9, "negative cases", [&](Outcome& o) { negatives(o, cli, work); });

    fmt::print("{} of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
