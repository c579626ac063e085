#include "twinsurf/twin1.hpp"

#include <sstream>

namespace twinsurf {

namespace {

std::vector<NodeIndex> failing_nodes(const ScalarField& f, double threshold)
{
    std::vector<NodeIndex> out;
    f.for_each_node([&](int i, int j) {
        if (!(f(i, j) > threshold)) out.push_back({i, j});
    });
    return out;
}

void check_epsilon(const CmcParams& p)
{
    if (p.epsilon != 1 && p.epsilon != -1) throw Error(ErrorKind::kDomain, "epsilon must be +1 or -1");
}

TwinResult transform(const GraphData& data, const TwinOptions& opts)
{
    const CmcParams& p = data.params;
    const double eps = p.epsilon;
    const auto grid = data.f.grid_ptr();
    const ScalarField x = ScalarField::sample(grid, [](double x, double) { return x; });
    const ScalarField y = ScalarField::sample(grid, [](double, double y) { return y; });

    // W = eps * (-beta/omega + H y/delta, alpha/omega - H x/delta)
    VectorField2 w{eps * (-(data.beta / data.omega) + p.H * y / data.delta),
                   eps * (data.alpha / data.omega - p.H * x / data.delta)};
    Potential pot = integrate_potential(w, opts.potential);

    TwinResult out;
    out.params = {p.kappa, -eps * p.H, eps * p.tau, -p.epsilon};
    out.curl_report = pot.curl;
    out.path_discrepancy = pot.path_discrepancy;
    out.g = std::move(pot.phi);
    out.gradient = std::move(w);

    GraphData twin;
    try {
        twin = make_graph_data(out.g, out.params, out.gradient);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::kSpacelike) throw;
        throw Error(ErrorKind::kLightlike, std::string("constructed twin is not spacelike: ") + e.what(), e.nodes(), e.value());
    }
    ScalarField margin = twin.omega.map([](double o) { return o * o; });
    out.spacelike_margin = margin.min_value();
    if (out.params.epsilon == -1 && !(out.spacelike_margin >= opts.lightlike_tol)) {
        std::ostringstream os;
        os << "constructed twin is nearly lightlike: min(1 - delta^2 |grad|^2) = " << out.spacelike_margin;
        throw Error(ErrorKind::kLightlike, os.str(), failing_nodes(margin, opts.lightlike_tol), out.spacelike_margin);
    }
    out.dual_pde_report = core_report(cmc_residual(twin));
    return out;
}

} // namespace

GraphData make_graph_data(ScalarField f, const CmcParams& params)
{
    const VectorField2 grad = gradient(f);
    return make_graph_data(std::move(f), params, grad);
}

GraphData make_graph_data(ScalarField f, const CmcParams& params, const VectorField2& grad)
{
    check_epsilon(params);
    const auto grid = f.grid_ptr();
    if (!same_grid(grid, grad.v1.grid_ptr()) || !same_grid(grid, grad.v2.grid_ptr())) {
        throw Error(ErrorKind::kGridMismatch, "gradient lives on a different grid");
    }
    GraphData d;
    d.params = params;
    d.delta = ScalarField::sample(grid, [k = params.kappa](double x, double y) { return bcv::delta(k, x, y); });
    if (!(d.delta.min_value() > 0)) {
        throw Error(ErrorKind::kDomain, "delta_kappa is not positive on the whole mask", failing_nodes(d.delta, 0.0));
    }
    const ScalarField x = ScalarField::sample(grid, [](double x, double) { return x; });
    const ScalarField y = ScalarField::sample(grid, [](double, double y) { return y; });
    d.alpha = grad.v1 + params.tau * y / d.delta;
    d.beta = grad.v2 - params.tau * x / d.delta;
    ScalarField omega2 = 1.0 + double(params.epsilon) * square(d.delta) * (square(d.alpha) + square(d.beta));
    if (params.epsilon == -1 && !(omega2.min_value() > 0)) {
        throw Error(ErrorKind::kSpacelike, "graph violates the spacelike condition", failing_nodes(omega2, 0.0),
                    omega2.min_value());
    }
    d.omega = sqrt(omega2);
    d.f = std::move(f);
    return d;
}

ScalarField cmc_residual(const GraphData& data)
{
    return divergence(VectorField2{data.alpha / data.omega, data.beta / data.omega})
           - 2.0 * data.params.H / square(data.delta);
}

TwinResult twin_transform(const GraphData& data, const TwinOptions& opts)
{
    if (data.params.epsilon != 1) throw Error(ErrorKind::kDomain, "twin_transform expects a Riemannian graph");
    return transform(data, opts);
}

TwinResult inverse_twin_transform(const GraphData& data, const TwinOptions& opts)
{
    if (data.params.epsilon != -1) throw Error(ErrorKind::kDomain, "inverse_twin_transform expects a spacelike graph");
    return transform(data, opts);
}

TwinResult any_twin_transform(const GraphData& data, const TwinOptions& opts)
{
    return data.params.epsilon == 1 ? twin_transform(data, opts) : inverse_twin_transform(data, opts);
}

ResidualReport involutivity_check(const GraphData& data, const TwinOptions& opts)
{
    const TwinResult first = any_twin_transform(data, opts);
    const TwinResult second = any_twin_transform(make_graph_data(first.g, first.params, first.gradient), opts);
    const double base = data.f.at(data.f.grid().anchor());
    return report(second.g - (data.f - base));
}

InducedMetric induced_metric(const GraphData& d)
{
    const double s = d.params.epsilon;
    const ScalarField base = 1.0 / square(d.delta);
    return {base + s * square(d.alpha), s * d.alpha * d.beta, base + s * square(d.beta)};
}

ResidualReport conformal_factor_check(const GraphData& a, const GraphData& b)
{
    if (a.params.epsilon == b.params.epsilon) {
        throw Error(ErrorKind::kDomain, "conformal_factor_check needs one Riemannian and one spacelike graph");
    }
    const GraphData& riem = a.params.epsilon == 1 ? a : b;
    const GraphData& lor = a.params.epsilon == 1 ? b : a;
    const InducedMetric I = induced_metric(riem);
    const InducedMetric Is = induced_metric(lor);
    const ScalarField u2 = 1.0 / square(riem.omega);

    ScalarField worst(riem.f.grid_ptr());
    const ScalarField dE = Is.E - u2 * I.E;
    const ScalarField dF = Is.F - u2 * I.F;
    const ScalarField dG = Is.G - u2 * I.G;
    const ScalarField dw = square(lor.omega) - u2;
    worst.for_each_node([&](int i, int j) {
        worst(i, j) = std::max({std::abs(dE(i, j)), std::abs(dF(i, j)), std::abs(dG(i, j)), std::abs(dw(i, j))});
    });
    return report(worst);
}

bool SpacelikeRegion::contains(double x, double y) const
{
    switch (kind) {
    case Kind::kEntire: return true;
    case Kind::kEmpty: return false;
    case Kind::kDisk: return std::hypot(x - cx, y - cy) < radius;
    }
    return false;
}

SpacelikeRegion affine_spacelike_region(double mu1, double mu2, double tau)
{
    SpacelikeRegion r;
    if (tau != 0) {
        r.kind = SpacelikeRegion::Kind::kDisk;
        r.cx = mu2 / tau;
        r.cy = -mu1 / tau;
        r.radius = 1.0 / std::abs(tau);
    } else {
        r.kind = mu1 * mu1 + mu2 * mu2 < 1 ? SpacelikeRegion::Kind::kEntire : SpacelikeRegion::Kind::kEmpty;
    }
    return r;
}

} // namespace twinsurf
