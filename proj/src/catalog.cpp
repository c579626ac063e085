#include "twinsurf/catalog.hpp"

#include <chrono>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace twinsurf::catalog {

namespace {

constexpr double kPi = std::numbers::pi;

double param(const Params& p, const std::string& key)
{
    auto it = p.find(key);
    if (it == p.end()) throw Error(ErrorKind::kUnknownName, "missing example parameter '" + key + "'");
    return it->second;
}

Ambient bcv_ambient(const std::string& space, double kappa, double tau, double H, int eps)
{
    return {space, 1, eps == 1 ? Signature::kRiemannian : Signature::kLorentzian, {kappa, tau, H, eps}};
}

DomainSpec rect(double xmin, double xmax, double ymin, double ymax)
{
    DomainSpec d;
    d.kind = DomainKind::kRect;
    d.xmin = xmin;
    d.xmax = xmax;
    d.ymin = ymin;
    d.ymax = ymax;
    d.anchor_x = 0.5 * (xmin + xmax);
    d.anchor_y = 0.5 * (ymin + ymax);
    return d;
}

DomainSpec slit_annulus(double r0, double r1)
{
    DomainSpec d = rect(-r1, r1, -r1, r1);
    d.kind = DomainKind::kSlitAnnulus;
    d.r0 = r0;
    d.r1 = r1;
    d.anchor_x = 0.5 * (r0 + r1);
    d.anchor_y = 0;
    return d;
}

DomainSpec disk(double r)
{
    DomainSpec d = rect(-r, r, -r, r);
    d.kind = DomainKind::kDisk;
    d.r1 = r;
    return d;
}

template <typename Fn>
std::function<std::vector<HeightFn>(const Params&)> closed_form(Fn fn)
{
    return [fn](const Params& p) { return std::vector<HeightFn>{[fn, p](double x, double y) { return fn(p, x, y); }}; };
}

RadialSolution solve(const RadialOdeSpec& spec)
{
    return integrate_radial_ode(spec);
}

/// Integrates the hyperbolic law in both directions from y = 0.
std::shared_ptr<RadialSolution> hyperbolic_profile(double tau, double lambda, double rho0, double ymin, double ymax)
{
    RadialOdeSpec spec;
    spec.law = RadialLaw::kHyperbolicDelaunay;
    spec.tau = tau;
    spec.lambda = lambda;
    spec.t0 = 0;
    spec.initial = rho0;
    spec.h_ode = 1e-3;
    spec.t1 = ymax * (1 + 1e-9) + 1e-12;
    const RadialSolution up = solve(spec);
    spec.t1 = ymin * (1 + 1e-9) - 1e-12;
    const RadialSolution down = solve(spec);
    return std::make_shared<RadialSolution>(RadialSolution::join(up, down));
}

DomainSpec hyperbolic_domain(const Params&)
{
    return rect(-1, 1, -0.5, 0.5);
}

std::vector<SurfaceExample> build_registry()
{
    std::vector<SurfaceExample> r;
    auto none = [](const Params&) { return Params{}; };
    (void)none;

    r.push_back({"helicoid_R3", "helicoid z = arctan(y/x), minimal in R3", {},
                 [](const Params&) { return bcv_ambient("R3", 0, 0, 0, 1); },
                 [](const Params&) { return slit_annulus(1, 3); },
                 closed_form([](const Params&, double x, double y) { return std::atan2(y, x); }),
                 "lorentz_catenoid_L3"});
    r.push_back({"lorentz_catenoid_L3", "Lorentz catenoid z = arcsinh(r), maximal in L3", {},
                 [](const Params&) { return bcv_ambient("L3", 0, 0, 0, -1); },
                 [](const Params&) { return slit_annulus(1, 3); },
                 closed_form([](const Params&, double x, double y) { return std::asinh(std::hypot(x, y)); }),
                 "helicoid_R3"});
    r.push_back({"catenoid_R3", "catenoid z = arccosh(r), minimal in R3", {},
                 [](const Params&) { return bcv_ambient("R3", 0, 0, 0, 1); },
                 [](const Params&) { return slit_annulus(1.5, 3); },
                 closed_form([](const Params&, double x, double y) { return std::acosh(std::hypot(x, y)); }),
                 "helicoid_L3"});
    r.push_back({"helicoid_L3", "helicoid z = arctan(y/x), maximal in L3 for r > 1", {},
                 [](const Params&) { return bcv_ambient("L3", 0, 0, 0, -1); },
                 [](const Params&) { return slit_annulus(1.5, 3); },
                 closed_form([](const Params&, double x, double y) { return std::atan2(y, x); }),
                 "catenoid_R3"});
    r.push_back({"skew_catenoid_R3", "catenoid z = sqrt(cosh^2 y - x^2), minimal in R3", {},
                 [](const Params&) { return bcv_ambient("R3", 0, 0, 0, 1); },
                 [](const Params&) { return rect(-0.6, 0.6, -1.2, 1.2); },
                 closed_form([](const Params&, double x, double y) {
                     const double c = std::cosh(y);
                     return std::sqrt(c * c - x * x);
                 }),
                 "helicoid2_L3"});
    r.push_back({"helicoid2_L3", "helicoid of the second kind z = x tanh y, maximal in L3", {},
                 [](const Params&) { return bcv_ambient("L3", 0, 0, 0, -1); },
                 [](const Params&) { return rect(-0.6, 0.6, -1.2, 1.2); },
                 closed_form([](const Params&, double x, double y) { return x * std::tanh(y); }),
                 "skew_catenoid_R3"});
    r.push_back({"scherk_doubly_R3", "doubly periodic Scherk surface z = ln(cos y / cos x)", {},
                 [](const Params&) { return bcv_ambient("R3", 0, 0, 0, 1); },
                 [](const Params&) { return rect(-0.9, 0.9, -0.9, 0.9); },
                 closed_form([](const Params&, double x, double y) { return std::log(std::cos(y) / std::cos(x)); }),
                 "scherk_triply_L3"});
    r.push_back({"scherk_triply_L3", "triply periodic maximal surface z = arcsin(sin x sin y)", {},
                 [](const Params&) { return bcv_ambient("L3", 0, 0, 0, -1); },
                 [](const Params&) { return rect(-0.9, 0.9, -0.9, 0.9); },
                 closed_form([](const Params&, double x, double y) { return std::asin(std::sin(x) * std::sin(y)); }),
                 "scherk_doubly_R3"});
    r.push_back({"scherk2_R3", "Scherk surface cos z = e^x cos y, branch z = arccos(e^x cos y) in (0, pi)", {},
                 [](const Params&) { return bcv_ambient("R3", 0, 0, 0, 1); },
                 [](const Params&) { return rect(-1.8, -0.4, -0.7, 0.7); },
                 closed_form([](const Params&, double x, double y) { return std::acos(std::exp(x) * std::cos(y)); }),
                 "scherk2_L3"});
    r.push_back({"scherk2_L3", "singly periodic maximal surface sinh z = e^x cos y", {},
                 [](const Params&) { return bcv_ambient("L3", 0, 0, 0, -1); },
                 [](const Params&) { return rect(-1.8, -0.4, -0.7 - kPi / 2, 0.7 - kPi / 2); },
                 closed_form([](const Params&, double x, double y) { return std::asinh(std::exp(x) * std::cos(y)); }),
                 "scherk2_R3"});
    r.push_back({"scherk_singly_R3", "singly periodic Scherk surface z = arcsin(sinh x sinh y)", {},
                 [](const Params&) { return bcv_ambient("R3", 0, 0, 0, 1); },
                 [](const Params&) { return rect(-0.8, 0.8, -0.8, 0.8); },
                 closed_form([](const Params&, double x, double y) { return std::asin(std::sinh(x) * std::sinh(y)); }),
                 "scherk_singly_L3"});
    r.push_back({"scherk_singly_L3", "maximal surface z = ln(cosh y / cosh x)", {},
                 [](const Params&) { return bcv_ambient("L3", 0, 0, 0, -1); },
                 [](const Params&) { return rect(-0.8, 0.8, -0.8, 0.8); },
                 closed_form([](const Params&, double x, double y) { return std::log(std::cosh(y) / std::cosh(x)); }),
                 "scherk_singly_R3"});

    r.push_back({"nil_saddle", "saddle type minimal graph f^theta in Nil3(1/2)", {{"theta", 1.0}},
                 [](const Params&) { return bcv_ambient("Nil3(1/2)", 0, 0.5, 0, 1); },
                 [](const Params&) { return rect(-2, 2, -2, 2); },
                 closed_form([](const Params& p, double x, double y) {
                     const double th = param(p, "theta");
                     return 0.5 * x * y - std::sinh(th) / 2 * (std::asinh(y) + y * std::sqrt(1 + y * y));
                 }),
                 "hyperbolic_cylinder_L3"});
    r.push_back({"hyperbolic_cylinder_L3", "rotated hyperbolic cylinder g^theta, CMC 1/2 in L3", {{"theta", 1.0}},
                 [](const Params&) { return bcv_ambient("L3", 0, 0, 0.5, -1); },
                 [](const Params&) { return rect(-2, 2, -2, 2); },
                 closed_form([](const Params& p, double x, double y) {
                     const double th = param(p, "theta");
                     return std::sqrt(y * y + 1) / std::cosh(th) + std::tanh(th) * x;
                 }),
                 "nil_saddle"});

    r.push_back({"nil_helicoid", "helicoid z = mu arctan(y/x), minimal in Nil3(tau)", {{"mu", 1.0}, {"tau", 0.5}},
                 [](const Params& p) { return bcv_ambient("Nil3(tau)", 0, param(p, "tau"), 0, 1); },
                 [](const Params&) { return slit_annulus(1, 3); },
                 closed_form([](const Params& p, double x, double y) { return param(p, "mu") * std::atan2(y, x); }),
                 "elliptic_delaunay_L3"});
    r.push_back({"elliptic_delaunay_L3", "elliptic Delaunay graph z = rho(r), CMC tau in L3", {{"mu", 1.0}, {"tau", 0.5}},
                 [](const Params& p) { return bcv_ambient("L3", 0, 0, param(p, "tau"), -1); },
                 [](const Params&) { return slit_annulus(1, 3); },
                 [](const Params& p) {
                     RadialOdeSpec spec;
                     spec.law = RadialLaw::kEllipticDelaunay;
                     spec.tau = param(p, "tau");
                     spec.mu = param(p, "mu");
                     spec.t0 = 1;
                     spec.t1 = 3 * (1 + 1e-9);
                     auto sol = std::make_shared<RadialSolution>(solve(spec));
                     return std::vector<HeightFn>{[sol](double x, double y) { return sol->value(std::hypot(x, y)); }};
                 },
                 "nil_helicoid"});
    r.push_back({"nil_catenoid", "half catenoid z = lambda rho(r) over r >= lambda in Nil3(tau)", {{"lambda", 1.0}, {"tau", 0.5}},
                 [](const Params& p) { return bcv_ambient("Nil3(tau)", 0, param(p, "tau"), 0, 1); },
                 [](const Params& p) { return slit_annulus(1.3 * param(p, "lambda"), 3 * param(p, "lambda")); },
                 [](const Params& p) {
                     const double lam = param(p, "lambda");
                     RadialOdeSpec spec;
                     spec.law = RadialLaw::kCatenoidRadius;
                     spec.tau = param(p, "tau");
                     spec.lambda = lam;
                     spec.t0 = lam;
                     spec.t1 = 3 * lam * (1 + 1e-9);
                     spec.h_ode = 1e-3 * std::sqrt(lam);
                     auto sol = std::make_shared<RadialSolution>(solve(spec));
                     return std::vector<HeightFn>{[sol, lam](double x, double y) { return lam * sol->value(std::hypot(x, y)); }};
                 },
                 "helicoidal_L3"});
    r.push_back({"helicoidal_L3", "helicoidal surface z = lambda arctan(y/x) + tau h(r), CMC tau in L3",
                 {{"lambda", 1.0}, {"tau", 0.5}},
                 [](const Params& p) { return bcv_ambient("L3", 0, 0, param(p, "tau"), -1); },
                 [](const Params& p) { return slit_annulus(1.3 * param(p, "lambda"), 3 * param(p, "lambda")); },
                 [](const Params& p) {
                     const double lam = param(p, "lambda"), tau = param(p, "tau");
                     RadialOdeSpec spec;
                     spec.law = RadialLaw::kCatenoidHeight;
                     spec.tau = tau;
                     spec.lambda = lam;
                     spec.t0 = lam;
                     spec.t1 = 3 * lam * (1 + 1e-9);
                     spec.h_ode = 1e-3 * std::sqrt(lam);
                     auto sol = std::make_shared<RadialSolution>(solve(spec));
                     return std::vector<HeightFn>{[sol, lam, tau](double x, double y) {
                         return lam * std::atan2(y, x) + tau * sol->value(std::hypot(x, y));
                     }};
                 },
                 "nil_catenoid"});

    auto hyper_l3 = [](double lambda_of_tau_flag) {
        return [lambda_of_tau_flag](const Params& p) {
            const double tau = param(p, "tau");
            const double lambda = lambda_of_tau_flag ? -4 / tau : param(p, "lambda");
            const DomainSpec d = hyperbolic_domain(p);
            auto sol = hyperbolic_profile(tau, lambda, param(p, "rho0"), d.ymin, d.ymax);
            return std::vector<HeightFn>{[sol](double x, double y) {
                const double rho = sol->value(y);
                return std::sqrt(x * x + rho * rho);
            }};
        };
    };
    auto hyper_twin = [](double lambda_of_tau_flag) {
        return [lambda_of_tau_flag](const Params& p) {
            const double tau = param(p, "tau");
            const double lambda = lambda_of_tau_flag ? -4 / tau : param(p, "lambda");
            const DomainSpec d = hyperbolic_domain(p);
            auto sol = hyperbolic_profile(tau, lambda, param(p, "rho0"), d.ymin, d.ymax);
            return std::vector<HeightFn>{[sol, tau](double x, double y) { return (sol->aux(y) - tau * y) * x; }};
        };
    };
    r.push_back({"hyperbolic_delaunay_L3", "hyperbolic Delaunay graph z = sqrt(x^2 + rho(y)^2), CMC tau in L3",
                 {{"tau", 0.5}, {"lambda", -0.5}, {"rho0", 1.5}},
                 [](const Params& p) { return bcv_ambient("L3", 0, 0, param(p, "tau"), -1); }, hyperbolic_domain,
                 hyper_l3(0), "hyperbolic_delaunay_twin_nil"});
    r.push_back({"hyperbolic_delaunay_twin_nil", "twin z = (q(y) - tau y) x of the hyperbolic Delaunay graph, minimal in Nil3(tau)",
                 {{"tau", 0.5}, {"lambda", -0.5}, {"rho0", 1.5}},
                 [](const Params& p) { return bcv_ambient("Nil3(tau)", 0, param(p, "tau"), 0, 1); }, hyperbolic_domain,
                 hyper_twin(0), "hyperbolic_delaunay_L3"});
    r.push_back({"semitrough", "hyperbolic Delaunay graph with lambda = -4/tau", {{"tau", 1.0}, {"rho0", 2.0}},
                 [](const Params& p) { return bcv_ambient("L3", 0, 0, param(p, "tau"), -1); }, hyperbolic_domain,
                 hyper_l3(1), "semitrough_twin_nil"});
    r.push_back({"semitrough_twin_nil", "twin of the semitrough, minimal in Nil3(tau)", {{"tau", 1.0}, {"rho0", 2.0}},
                 [](const Params& p) { return bcv_ambient("Nil3(tau)", 0, param(p, "tau"), 0, 1); }, hyperbolic_domain,
                 hyper_twin(1), "semitrough"});

    r.push_back({"gauss_lift_semitrough",
                 "z = -arcsinh((1 - r^2)/(2x)) in H2 x R, stored as half height in E3(-4, 0)", {},
                 [](const Params&) { return bcv_ambient("E3(-4,0)", -4, 0, 0, 1); },
                 [](const Params&) { return rect(0.2, 0.7, -0.5, 0.5); },
                 closed_form([](const Params&, double x, double y) {
                     return -0.5 * std::asinh((1 - x * x - y * y) / (2 * x));
                 }),
                 std::nullopt});

    r.push_back({"half_z_squared_R4", "holomorphic graph (x, y, Re z^2/2, Im z^2/2), minimal in R4", {},
                 [](const Params&) { return Ambient{"R4", 2, Signature::kRiemannian, {}}; },
                 [](const Params&) { return disk(0.9); },
                 [](const Params&) {
                     return std::vector<HeightFn>{[](double x, double y) { return 0.5 * (x * x - y * y); },
                                                  [](double x, double y) { return x * y; }};
                 },
                 "half_z_squared_twin_L4"});
    r.push_back({"half_z_squared_twin_L4", "maximal twin (x, y, xy, (y^2 - x^2)/2) in R4_2", {},
                 [](const Params&) { return Ambient{"R4_2", 2, Signature::kLorentzian, {}}; },
                 [](const Params&) { return disk(0.9); },
                 [](const Params&) {
                     return std::vector<HeightFn>{[](double x, double y) { return x * y; },
                                                  [](double x, double y) { return 0.5 * (y * y - x * x); }};
                 },
                 "half_z_squared_R4"});
    return r;
}

std::vector<TwinPair> build_pairs()
{
    return {
        {"helicoid_R3", "lorentz_catenoid_L3", -1, 0, 0, {}, "helicoid_R3 <-> lorentz_catenoid_L3"},
        {"catenoid_R3", "helicoid_L3", 1, 0, 0, {}, "catenoid_R3 <-> helicoid_L3"},
        {"skew_catenoid_R3", "helicoid2_L3", -1, 0, 0, {}, "skew_catenoid_R3 <-> helicoid2_L3"},
        {"scherk_doubly_R3", "scherk_triply_L3", 1, 0, 0, {}, "scherk_doubly_R3 <-> scherk_triply_L3"},
        {"scherk2_R3", "scherk2_L3", -1, 0, -kPi / 2, {}, "scherk2_R3 <-> scherk2_L3"},
        {"scherk_singly_R3", "scherk_singly_L3", 1, 0, 0, {}, "scherk_singly_R3 <-> scherk_singly_L3"},
        {"nil_saddle", "hyperbolic_cylinder_L3", 1, 0, 0, {{"theta", 0.0}}, "nil_saddle <-> hyperbolic_cylinder_L3 (theta=0)"},
        {"nil_saddle", "hyperbolic_cylinder_L3", 1, 0, 0, {{"theta", 1.0}}, "nil_saddle <-> hyperbolic_cylinder_L3 (theta=1)"},
        {"nil_helicoid", "elliptic_delaunay_L3", 1, 0, 0, {{"tau", 0.5}, {"mu", 1.0}}, "nil_helicoid <-> elliptic_delaunay_L3"},
        {"nil_catenoid", "helicoidal_L3", 1, 0, 0, {}, "nil_catenoid <-> helicoidal_L3"},
        {"hyperbolic_delaunay_twin_nil", "hyperbolic_delaunay_L3", 1, 0, 0, {}, "hyperbolic_delaunay_twin_nil <-> hyperbolic_delaunay_L3"},
        {"semitrough_twin_nil", "semitrough", 1, 0, 0, {}, "semitrough_twin_nil <-> semitrough"},
        {"half_z_squared_R4", "half_z_squared_twin_L4", 1, 0, 0, {}, "half_z_squared_R4 <-> half_z_squared_twin_L4"},
    };
}

struct Sampled {
    std::vector<ScalarField> heights;
    Ambient ambient;
};

/// Anchored max error between a computed twin and orientation * expected(x + dx, y + dy).
double anchored_error(const std::vector<ScalarField>& computed, const std::vector<HeightFn>& expected, double s,
                      double dx, double dy)
{
    double worst = 0;
    for (std::size_t k = 0; k < computed.size(); ++k) {
        const auto grid = computed[k].grid_ptr();
        ScalarField e = ScalarField::sample(grid, [&](double x, double y) { return s * expected[k](x + dx, y + dy); });
        e -= e.at(grid->anchor());
        worst = std::max(worst, (computed[k] - e).max_abs());
    }
    return worst;
}

std::vector<ScalarField> twin_of(const std::vector<ScalarField>& heights, const Ambient& amb)
{
    if (amb.codim == 1) {
        return {any_twin_transform(make_graph_data(heights.front(), amb.cmc)).g};
    }
    return twin_transform_codim(MultiGraph{heights}, amb.signature).twin.f;
}

double involution_of(const std::vector<ScalarField>& heights, const Ambient& amb)
{
    if (amb.codim == 1) return involutivity_check(make_graph_data(heights.front(), amb.cmc)).max_abs;
    return involutivity_check_codim(MultiGraph{heights}, amb.signature).max_abs;
}

std::vector<ScalarField> sample_with(const std::vector<HeightFn>& fns, const GridHandle& grid)
{
    std::vector<ScalarField> out;
    for (const auto& fn : fns) out.push_back(ScalarField::sample(grid, fn));
    return out;
}

} // namespace

DomainSpec DomainSpec::shifted(double dx, double dy) const
{
    DomainSpec d = *this;
    if (dx == 0 && dy == 0) return d;
    if (kind != DomainKind::kRect) throw Error(ErrorKind::kDomain, "only rectangular domains can be shifted");
    d.xmin += dx;
    d.xmax += dx;
    d.ymin += dy;
    d.ymax += dy;
    d.anchor_x += dx;
    d.anchor_y += dy;
    return d;
}

GridHandle make_domain_grid(const DomainSpec& d, int n)
{
    return make_domain_grid(d, n, n);
}

GridHandle make_domain_grid(const DomainSpec& d, int nx, int ny)
{
    const GridSpec spec{nx, ny, d.xmin, d.xmax, d.ymin, d.ymax};
    Region region = regions::everything();
    switch (d.kind) {
    case DomainKind::kRect: break;
    case DomainKind::kDisk: region = regions::disk(d.r1); break;
    case DomainKind::kSlitAnnulus: region = regions::slit_annulus(d.r0, d.r1, 0.5 * spec.hy()); break;
    }
    return make_grid(spec, region, d.anchor_x, d.anchor_y);
}

const std::vector<SurfaceExample>& list_examples()
{
    static const std::vector<SurfaceExample> registry = build_registry();
    return registry;
}

const SurfaceExample& find_example(const std::string& name)
{
    for (const auto& ex : list_examples()) {
        if (ex.name == name) return ex;
    }
    throw Error(ErrorKind::kUnknownName, "unknown example '" + name + "'");
}

const std::vector<TwinPair>& twin_pairs()
{
    static const std::vector<TwinPair> pairs = build_pairs();
    return pairs;
}

std::vector<TwinPair> pairs_for(const std::string& name)
{
    find_example(name);
    std::vector<TwinPair> out;
    for (const auto& p : twin_pairs()) {
        if (p.source == name || p.target == name) out.push_back(p);
    }
    return out;
}

Params merged_params(const SurfaceExample& ex, const Params& overrides)
{
    Params p = ex.defaults;
    for (const auto& [k, v] : overrides) {
        if (p.count(k)) p[k] = v;
    }
    return p;
}

std::vector<ScalarField> sample_heights(const SurfaceExample& ex, const Params& params, const GridHandle& grid)
{
    auto out = sample_with(ex.heights(merged_params(ex, params)), grid);
    for (const auto& f : out) {
        if (!f.all_finite()) throw Error(ErrorKind::kDomain, "example '" + ex.name + "' is not finite on the grid");
    }
    return out;
}

Evaluated eval_example(const std::string& name, const Params& params, const GridHandle& grid)
{
    const SurfaceExample& ex = find_example(name);
    const Params p = merged_params(ex, params);
    const Ambient amb = ex.ambient(p);
    auto heights = sample_heights(ex, p, grid);
    if (amb.codim == 1) return make_graph_data(std::move(heights.front()), amb.cmc);
    return MultiGraph{std::move(heights)};
}

ResidualReport example_residual(const std::string& name, const Params& params, int n)
{
    const SurfaceExample& ex = find_example(name);
    const Params p = merged_params(ex, params);
    const Ambient amb = ex.ambient(p);
    const GridHandle grid = make_domain_grid(ex.domain(p), n);
    const Evaluated ev = eval_example(name, p, grid);
    if (const auto* gd = std::get_if<GraphData>(&ev)) return core_report(cmc_residual(*gd));
    const auto& mg = std::get<MultiGraph>(ev);
    const FirstFundamental ff = first_fundamental(mg, amb.signature);
    const SystemResidual sys = amb.signature == Signature::kRiemannian ? minimal_system_residual(mg, ff)
                                                                       : maximal_system_residual(mg, ff);
    return sys.nondivergence_report();
}

PairCheckResult check_pair(const TwinPair& pair, int n)
{
    const auto start = std::chrono::steady_clock::now();
    const SurfaceExample& src = find_example(pair.source);
    const SurfaceExample& tgt = find_example(pair.target);
    const Params ps = merged_params(src, pair.params), pt = merged_params(tgt, pair.params);
    const Ambient as = src.ambient(ps), at = tgt.ambient(pt);
    const std::vector<HeightFn> fs = src.heights(ps), ft = tgt.heights(pt);
    const DomainSpec ds = src.domain(ps);
    const DomainSpec dt = ds.shifted(pair.shift_x, pair.shift_y);

    auto errors = [&](int nodes, double* fwd, double* inv, double* invol) {
        const GridHandle gs = make_domain_grid(ds, nodes);
        const GridHandle gt = make_domain_grid(dt, nodes);
        const auto hs = sample_with(fs, gs);
        const auto ht = sample_with(ft, gt);
        *fwd = anchored_error(twin_of(hs, as), ft, pair.orientation, pair.shift_x, pair.shift_y);
        *inv = anchored_error(twin_of(ht, at), fs, pair.orientation, -pair.shift_x, -pair.shift_y);
        if (invol) *invol = std::max(involution_of(hs, as), involution_of(ht, at));
        return gs->h();
    };

    PairCheckResult r;
    r.label = pair.label.empty() ? pair.source + " <-> " + pair.target : pair.label;
    r.n = n;
    r.h = errors(n, &r.forward_error, &r.inverse_error, &r.involution_error);
    errors(2 * n - 1, &r.forward_error_refined, &r.inverse_error_refined, nullptr);
    r.tol = 10 * r.h * r.h;
    r.involution_tol = 20 * r.h * r.h;
    r.forward_ratio = r.forward_error / r.forward_error_refined;
    r.inverse_ratio = r.inverse_error / r.inverse_error_refined;
    auto ratio_ok = [](double err, double ratio) { return err <= 1e-11 || (ratio >= 3.2 && ratio <= 4.8); };
    r.pass = r.forward_error <= r.tol && r.inverse_error <= r.tol && ratio_ok(r.forward_error, r.forward_ratio)
             && ratio_ok(r.inverse_error, r.inverse_ratio) && r.involution_error <= r.involution_tol;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ---------------------------------------------------------------------------

ResidualReport HessianZeroResiduals::identity_report() const
{
    return core_report(hessian_form - lam_divergence_form);
}

namespace {

struct LamFlux {
    ScalarField hessian;
    ScalarField P;
    ScalarField Q;
};

LamFlux lam_flux(const ScalarField& f)
{
    const ScalarField fx = dx(f), fy = dy(f), fxx = dxx(f), fyy = dyy(f), fxy = dxy(f);
    const ScalarField w = 1.0 + square(fx) + square(fy);
    return {(fxx * fyy - square(fxy)) / square(w), (fyy * fx - fxy * fy) / (2.0 * w), (fxx * fy - fxy * fx) / (2.0 * w)};
}

} // namespace

HessianZeroResiduals hessian_zero_residuals(const ScalarField& f)
{
    LamFlux flux = lam_flux(f);
    return {std::move(flux.hessian), divergence(VectorField2{flux.P, flux.Q})};
}

Potential hessian_zero_potential(const ScalarField& f, const PotentialOptions& opts)
{
    const LamFlux flux = lam_flux(f);
    try {
        return integrate_potential(VectorField2{-flux.Q, flux.P}, opts);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNotAGradient) throw;
        throw Error(ErrorKind::kNotAGradient, std::string("input is not flat: ") + e.what(), e.nodes(), e.value());
    }
}

// ---------------------------------------------------------------------------

ChartFn nil_saddle_chart(double theta)
{
    const double c = std::cosh(theta), s = std::sinh(theta);
    return [c, s](double u, double v) {
        return Eigen::Vector3d(c * u + s * std::cosh(v), std::sinh(v), c / 2 * u * std::sinh(v) - s / 2 * v);
    };
}

ChartFn nil_catenoid_chart(double lambda, double tau, double u_max)
{
    RadialOdeSpec wspec;
    wspec.law = RadialLaw::kCatenoidChart;
    wspec.tau = tau;
    wspec.lambda = lambda;
    wspec.t0 = 0;
    wspec.t1 = u_max * (1 + 1e-9) + 1e-12;
    wspec.h_ode = 1e-4;
    auto w = std::make_shared<RadialSolution>(integrate_radial_ode(wspec));

    RadialOdeSpec rspec;
    rspec.law = RadialLaw::kCatenoidRadius;
    rspec.tau = tau;
    rspec.lambda = lambda;
    rspec.t0 = lambda;
    rspec.t1 = lambda * std::cosh(w->value(u_max)) * (1 + 1e-9);
    rspec.h_ode = 1e-4;
    auto rho = std::make_shared<RadialSolution>(integrate_radial_ode(rspec));

    return [w, rho, lambda, tau](double u, double theta) {
        const double r = lambda * std::cosh(w->value(u));
        const double phase = theta + tau * lambda * u;
        return Eigen::Vector3d(r * std::cos(phase), r * std::sin(phase), lambda * rho->value(r));
    };
}

ChartMetricReport chart_metric_residual(const ChartFn& chart, const bcv::BcvParams& ambient, const GridSpec& uv,
                                        const std::function<double(double, double)>& expected_factor)
{
    const GridHandle grid = make_grid(uv, regions::everything());
    std::array<ScalarField, 3> X;
    for (int c = 0; c < 3; ++c) X[c] = ScalarField::sample(grid, [&](double u, double v) { return chart(u, v)[c]; });
    std::array<ScalarField, 3> Xu, Xv;
    for (int c = 0; c < 3; ++c) {
        Xu[c] = dx(X[c]);
        Xv[c] = dy(X[c]);
    }
    ScalarField conf(grid), fac(grid, 0.0);
    conf.for_each_node([&](int i, int j) {
        const bcv::Frame fr = bcv::frames_and_metric<double>(ambient, {X[0](i, j), X[1](i, j), X[2](i, j)});
        const Eigen::Vector3d a(Xu[0](i, j), Xu[1](i, j), Xu[2](i, j));
        const Eigen::Vector3d b(Xv[0](i, j), Xv[1](i, j), Xv[2](i, j));
        const double E = a.dot(fr.metric * a), F = a.dot(fr.metric * b), G = b.dot(fr.metric * b);
        conf(i, j) = std::max(std::abs(E - G), std::abs(F)) / E;
        if (expected_factor) {
            const double lam = expected_factor(grid->x(i), grid->y(j));
            fac(i, j) = std::max(std::abs(E - lam), std::abs(G - lam));
        }
    });
    return {report(conf), report(fac)};
}

// ---------------------------------------------------------------------------

std::string export_mesh(const std::vector<ScalarField>& fields, int component)
{
    if (fields.empty()) throw Error(ErrorKind::kDomain, "nothing to export");
    if (component < 0 || component >= static_cast<int>(fields.size())) throw Error(ErrorKind::kDomain, "mesh component out of range");
    const ScalarField& f = fields[component];
    const Grid2D& g = f.grid();
    Eigen::ArrayXXi index = Eigen::ArrayXXi::Zero(g.nx(), g.ny());
    std::string out;
    char buf[128];
    int next = 1;
    f.for_each_node([&](int i, int j) {
        index(i, j) = next++;
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", g.x(i), g.y(j), f(i, j));
        out += buf;
    });
    for (int j = 0; j + 1 < g.ny(); ++j) {
        for (int i = 0; i + 1 < g.nx(); ++i) {
            if (!(g.inside(i, j) && g.inside(i + 1, j) && g.inside(i, j + 1) && g.inside(i + 1, j + 1))) continue;
            const int a = index(i, j), b = index(i + 1, j), c = index(i, j + 1), d = index(i + 1, j + 1);
            std::snprintf(buf, sizeof buf, "f %d %d %d\nf %d %d %d\n", a, b, d, a, d, c);
            out += buf;
        }
    }
    return out;
}

} // namespace twinsurf::catalog
