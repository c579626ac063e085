#include "twinsurf/twin2.hpp"

#include <sstream>

namespace twinsurf {

namespace {

std::vector<NodeIndex> nodes_where(const ScalarField& f, auto&& pred)
{
    std::vector<NodeIndex> out;
    f.for_each_node([&](int i, int j) {
        if (pred(f(i, j))) out.push_back({i, j});
    });
    return out;
}

struct Jacobians {
    std::vector<std::vector<ScalarField>> J;
    ScalarField normJ;
};

Jacobians jacobians(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b)
{
    const int n = static_cast<int>(a.size());
    Jacobians out;
    out.J.assign(n, std::vector<ScalarField>(n));
    out.normJ = ScalarField(a.front().grid_ptr());
    ScalarField sum(a.front().grid_ptr());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            out.J[i][j] = a[i] * b[j] - a[j] * b[i];
            sum += square(out.J[i][j]);
        }
    }
    out.normJ = sqrt(sum);
    return out;
}

NodeGradients gather(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b, int i, int j)
{
    NodeGradients ab(2, static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) {
        ab(0, k) = a[k](i, j);
        ab(1, k) = b[k](i, j);
    }
    return ab;
}

SystemResidual system_residual(const MultiGraph& mg, const FirstFundamental& ff)
{
    SystemResidual out;
    for (int k = 0; k < mg.n(); ++k) {
        const ScalarField& f = mg.f[k];
        out.nondivergence.push_back(ff.G * dxx(f) - 2.0 * ff.F * dxy(f) + ff.E * dyy(f));
        const ScalarField& a = ff.alpha[k];
        const ScalarField& b = ff.beta[k];
        out.divergence.push_back(divergence(VectorField2{(ff.G * a - ff.F * b) / ff.omega, (ff.E * b - ff.F * a) / ff.omega}));
    }
    return out;
}

} // namespace

void validate(const MultiGraph& mg, int max_codim)
{
    if (mg.f.empty()) throw Error(ErrorKind::kDomain, "multigraph has no height fields");
    if (mg.n() > max_codim) {
        std::ostringstream os;
        os << "codimension " << mg.n() << " exceeds the cap " << max_codim;
        throw Error(ErrorKind::kDomain, os.str());
    }
    for (const auto& f : mg.f) {
        if (!same_grid(f.grid_ptr(), mg.grid_ptr())) throw Error(ErrorKind::kGridMismatch, "multigraph fields live on different grids");
    }
}

FirstFundamental first_fundamental(const MultiGraph& mg, Signature signature)
{
    validate(mg);
    std::vector<VectorField2> grads;
    for (const auto& f : mg.f) grads.push_back(gradient(f));
    return first_fundamental(grads, signature);
}

FirstFundamental first_fundamental(const std::vector<VectorField2>& gradients, Signature signature)
{
    if (gradients.empty()) throw Error(ErrorKind::kDomain, "no gradients supplied");
    const double s = signature == Signature::kRiemannian ? 1.0 : -1.0;
    const auto grid = gradients.front().v1.grid_ptr();
    FirstFundamental ff;
    ff.signature = signature;
    ff.E = ScalarField(grid, 1.0);
    ff.F = ScalarField(grid, 0.0);
    ff.G = ScalarField(grid, 1.0);
    for (const auto& g : gradients) {
        if (!same_grid(grid, g.v1.grid_ptr()) || !same_grid(grid, g.v2.grid_ptr())) {
            throw Error(ErrorKind::kGridMismatch, "gradients live on different grids");
        }
        ff.alpha.push_back(g.v1);
        ff.beta.push_back(g.v2);
        const ScalarField& a = ff.alpha.back();
        const ScalarField& b = ff.beta.back();
        ff.E += s * square(a);
        ff.F += s * a * b;
        ff.G += s * square(b);
    }
    const ScalarField det = ff.E * ff.G - square(ff.F);
    if (signature == Signature::kLorentzian && !(det.min_value() > 0)) {
        throw Error(ErrorKind::kSpacelike, "multigraph violates the spacelike condition",
                    nodes_where(det, [](double v) { return !(v > 0); }), det.min_value());
    }
    ff.omega = sqrt(det);
    return ff;
}

AreaAngle area_angle(const FirstFundamental& ff, double area_tol)
{
    Jacobians jac = jacobians(ff.alpha, ff.beta);
    const double limit = 1.0 - area_tol;
    auto bad = nodes_where(jac.normJ, [limit](double v) { return !(v < limit); });
    if (!bad.empty()) {
        std::ostringstream os;
        os << "map is not area decreasing: max |J| = " << jac.normJ.max_abs() << " at " << bad.size() << " nodes";
        throw Error(ErrorKind::kNotAreaDecreasing, os.str(), std::move(bad), jac.normJ.max_abs());
    }
    AreaAngle out;
    out.theta = jac.normJ.map([](double v) { return std::acos(v); });
    out.J = std::move(jac.J);
    out.normJ = std::move(jac.normJ);
    return out;
}

AreaAngle area_angle(const MultiGraph& mg, double area_tol)
{
    return area_angle(first_fundamental(mg, Signature::kRiemannian), area_tol);
}

double lagrange_identity_residual(const MultiGraph& mg, const FirstFundamental& ff, const AreaAngle& aa)
{
    ScalarField rhs(mg.grid_ptr(), 1.0);
    for (int k = 0; k < mg.n(); ++k) rhs += square(ff.alpha[k]) + square(ff.beta[k]);
    for (int i = 0; i < mg.n(); ++i)
        for (int j = i + 1; j < mg.n(); ++j) rhs += square(aa.J[i][j]);
    return (square(ff.omega) - rhs).max_abs();
}

ResidualReport SystemResidual::nondivergence_report() const
{
    return core_report(pointwise_max_abs(nondivergence));
}

ResidualReport SystemResidual::divergence_report() const
{
    return core_report(pointwise_max_abs(divergence));
}

SystemResidual minimal_system_residual(const MultiGraph& mg)
{
    return minimal_system_residual(mg, first_fundamental(mg, Signature::kRiemannian));
}

SystemResidual minimal_system_residual(const MultiGraph& mg, const FirstFundamental& ff)
{
    if (ff.signature != Signature::kRiemannian) throw Error(ErrorKind::kDomain, "minimal system needs a Riemannian first fundamental form");
    return system_residual(mg, ff);
}

SystemResidual maximal_system_residual(const MultiGraph& mg, const FirstFundamental& ff)
{
    if (ff.signature != Signature::kLorentzian) throw Error(ErrorKind::kDomain, "maximal system needs a Lorentzian first fundamental form");
    return system_residual(mg, ff);
}

ResidualReport mss2_identities_residual(const FirstFundamental& ff)
{
    const ScalarField e = ff.E / ff.omega, f = ff.F / ff.omega, g = ff.G / ff.omega;
    return core_report(pointwise_max_abs<double>({dx(g) - dy(f), dx(f) - dy(e)}));
}

NodeGradients forward_twin_relation(const NodeGradients& ab)
{
    const auto a = ab.row(0), b = ab.row(1);
    const double E = 1 + a.squaredNorm(), F = a.dot(b), G = 1 + b.squaredNorm();
    const double w = std::sqrt(E * G - F * F);
    NodeGradients out(2, ab.cols());
    out.row(0) = (-E * b + F * a) / w;
    out.row(1) = (G * a - F * b) / w;
    return out;
}

NodeGradients inverse_twin_relation(const NodeGradients& ab)
{
    const auto a = ab.row(0), b = ab.row(1);
    const double E = 1 - a.squaredNorm(), F = -a.dot(b), G = 1 - b.squaredNorm();
    const double w = std::sqrt(E * G - F * F);
    NodeGradients out(2, ab.cols());
    out.row(0) = (E * b - F * a) / w;
    out.row(1) = (-G * a + F * b) / w;
    return out;
}

DualityReport duality_checks(const MultiGraph& minimal, const MultiGraph& maximal)
{
    if (minimal.n() != maximal.n()) throw Error(ErrorKind::kDomain, "twin pair has different codimensions");
    if (!same_grid(minimal.grid_ptr(), maximal.grid_ptr())) throw Error(ErrorKind::kGridMismatch, "twin pair lives on different grids");
    const FirstFundamental ff = first_fundamental(minimal, Signature::kRiemannian);
    const FirstFundamental fh = first_fundamental(maximal, Signature::kLorentzian);
    const Jacobians jf = jacobians(ff.alpha, ff.beta);
    const Jacobians jg = jacobians(fh.alpha, fh.beta);
    const auto grid = minimal.grid_ptr();
    const int n = minimal.n();

    DualityReport r;
    std::vector<ScalarField> jdiff{ScalarField(grid, 0.0)};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) jdiff.push_back(jf.J[i][j] - jg.J[i][j]);
    r.jacobian = report(pointwise_max_abs(jdiff));

    const ScalarField sin2 = 1.0 - square(jf.normJ);
    r.angle = report(fh.omega * ff.omega - sin2);
    const ScalarField ratio = ff.omega / fh.omega;
    r.conformal = report(pointwise_max_abs<double>({ff.E - ratio * fh.E, ff.F - ratio * fh.F, ff.G - ratio * fh.G}));
    r.step_b1 = report(pointwise_max_abs<double>(
        {fh.E / fh.omega - ff.E / ff.omega, fh.F / fh.omega - ff.F / ff.omega, fh.G / fh.omega - ff.G / ff.omega}));
    r.step_a3 = report(fh.omega - sin2 / ff.omega);
    const auto acos_field = [](const ScalarField& v) { return v.map([](double x) { return std::acos(std::min(x, 1.0)); }); };
    r.area_angle = report(acos_field(jf.normJ) - acos_field(jg.normJ));
    return r;
}

CodimTwinResult twin_transform_codim(const MultiGraph& mg, Signature source, const CodimTwinOptions& opts)
{
    return twin_transform_codim(mg, first_fundamental(mg, source), opts);
}

CodimTwinResult twin_transform_codim(const MultiGraph& mg, const FirstFundamental& ff, const CodimTwinOptions& opts)
{
    validate(mg);
    const Signature source = ff.signature;
    area_angle(ff, opts.area_tol);
    const auto grid = mg.grid_ptr();
    const int n = mg.n();
    const bool forward = source == Signature::kRiemannian;

    std::vector<VectorField2> w(n, VectorField2{ScalarField(grid), ScalarField(grid)});
    ff.E.for_each_node([&](int i, int j) {
        const NodeGradients ab = gather(ff.alpha, ff.beta, i, j);
        const NodeGradients t = forward ? forward_twin_relation(ab) : inverse_twin_relation(ab);
        for (int k = 0; k < n; ++k) {
            w[k].v1(i, j) = t(0, k);
            w[k].v2(i, j) = t(1, k);
        }
    });

    CodimTwinResult out;
    out.signature = forward ? Signature::kLorentzian : Signature::kRiemannian;
    for (int k = 0; k < n; ++k) {
        Potential p = integrate_potential(w[k], opts.potential);
        out.curl.push_back(p.curl);
        out.path_discrepancy = std::max(out.path_discrepancy, p.path_discrepancy);
        out.twin.f.push_back(std::move(p.phi));
    }
    out.gradients = std::move(w);

    FirstFundamental ft;
    try {
        ft = first_fundamental(out.gradients, out.signature);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::kSpacelike) throw;
        throw Error(ErrorKind::kLightlike, std::string("constructed twin is not spacelike: ") + e.what(), e.nodes(), e.value());
    }
    out.spacelike_margin = square(ft.omega).min_value();
    if (forward && !(out.spacelike_margin >= opts.lightlike_tol)) {
        throw Error(ErrorKind::kLightlike, "constructed twin is nearly lightlike", {}, out.spacelike_margin);
    }
    const SystemResidual sys = forward ? maximal_system_residual(out.twin, ft) : minimal_system_residual(out.twin, ft);
    out.dual_system = sys.nondivergence_report();
    return out;
}

ResidualReport involutivity_check_codim(const MultiGraph& mg, Signature source, const CodimTwinOptions& opts)
{
    const CodimTwinResult first = twin_transform_codim(mg, source, opts);
    const CodimTwinResult second = twin_transform_codim(first.twin, first_fundamental(first.gradients, first.signature), opts);
    const NodeIndex a = mg.grid().anchor();
    std::vector<ScalarField> diff;
    for (int k = 0; k < mg.n(); ++k) diff.push_back(second.twin.f[k] - (mg.f[k] - mg.f[k].at(a)));
    return report(pointwise_max_abs(diff));
}

MultiGraph reflect_heights(const MultiGraph& mg)
{
    MultiGraph out;
    for (const auto& f : mg.f) out.f.push_back(-f);
    return out;
}

} // namespace twinsurf
