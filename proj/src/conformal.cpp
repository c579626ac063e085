#include "twinsurf/conformal.hpp"

#include <Eigen/LU>

#include <array>
#include <sstream>

namespace twinsurf {

namespace {

struct Weights {
    std::array<double, 4> w;
    std::array<double, 4> dw;
};

Weights catmull_rom(double t)
{
    const double t2 = t * t, t3 = t2 * t;
    return {{(-t3 + 2 * t2 - t) / 2, (3 * t3 - 5 * t2 + 2) / 2, (-3 * t3 + 4 * t2 + t) / 2, (t3 - t2) / 2},
            {(-3 * t2 + 4 * t - 1) / 2, (9 * t2 - 10 * t) / 2, (-9 * t2 + 8 * t + 1) / 2, (3 * t2 - 2 * t) / 2}};
}

/// Cell index and local coordinate along one axis, or false when outside the grid.
bool locate(double u, int n, int& cell, double& t)
{
    if (!(u >= -1e-12) || !(u <= n - 1 + 1e-12)) return false;
    cell = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
    t = u - cell;
    return true;
}

/// Inverse of the bilinear map of a cell with corner images p[0..3] = P00, P10, P01, P11.
std::optional<Eigen::Vector2d> invert_bilinear(const std::array<Eigen::Vector2d, 4>& p, const Eigen::Vector2d& target)
{
    Eigen::Vector2d st(0.5, 0.5);
    for (int it = 0; it < 20; ++it) {
        const double s = st[0], t = st[1];
        const Eigen::Vector2d val = (1 - s) * (1 - t) * p[0] + s * (1 - t) * p[1] + (1 - s) * t * p[2] + s * t * p[3];
        const Eigen::Vector2d r = val - target;
        Eigen::Matrix2d J;
        J.col(0) = (1 - t) * (p[1] - p[0]) + t * (p[3] - p[2]);
        J.col(1) = (1 - s) * (p[2] - p[0]) + s * (p[3] - p[1]);
        if (r.lpNorm<Eigen::Infinity>() < 1e-13) break;
        const double det = J.determinant();
        if (det == 0) return std::nullopt;
        st -= J.inverse() * r;
        if (!st.allFinite()) return std::nullopt;
    }
    const double tol = 1e-9;
    if (st[0] < -tol || st[0] > 1 + tol || st[1] < -tol || st[1] > 1 + tol) return std::nullopt;
    return st;
}

ScalarField resample(const MaskedCubic& interp, const ConformalChart& chart)
{
    ScalarField out(chart.xi_grid);
    out.for_each_node([&](int i, int j) {
        const auto s = interp(chart.x_of_xi(i, j), chart.y_of_xi(i, j));
        if (!s) throw Error(ErrorKind::kDomain, "resampling point lost its interpolation support", {{i, j}});
        out(i, j) = s->value;
    });
    return out;
}

std::vector<ScalarField> ambient_coordinates(const ConformalChart& chart, const MultiGraph& mg)
{
    std::vector<ScalarField> X{chart.x_of_xi, chart.y_of_xi};
    for (auto& h : resample_heights(chart, mg)) X.push_back(std::move(h));
    return X;
}

double slot_sign(Signature s, std::size_t k)
{
    return s == Signature::kLorentzian && k >= 2 ? -1.0 : 1.0;
}

} // namespace

std::optional<CubicSample> MaskedCubic::operator()(double x, double y) const
{
    const Grid2D& g = field_.grid();
    int ci, cj;
    double tx, ty;
    if (!locate((x - g.x0()) / g.hx(), g.nx(), ci, tx) || !locate((y - g.y0()) / g.hy(), g.ny(), cj, ty)) return std::nullopt;
    for (int b = -1; b <= 2; ++b)
        for (int a = -1; a <= 2; ++a)
            if (!g.inside(ci + a, cj + b)) return std::nullopt;
    const Weights wx = catmull_rom(tx), wy = catmull_rom(ty);
    CubicSample s;
    for (int b = 0; b < 4; ++b) {
        for (int a = 0; a < 4; ++a) {
            const double v = field_(ci - 1 + a, cj - 1 + b);
            s.value += wx.w[a] * wy.w[b] * v;
            s.dx += wx.dw[a] * wy.w[b] * v;
            s.dy += wx.w[a] * wy.dw[b] * v;
        }
    }
    s.dx /= g.hx();
    s.dy /= g.hy();
    return s;
}

ConformalChart build_conformal_chart(const MultiGraph& mg, const FirstFundamental& ff, const ConformalOptions& opts)
{
    const auto grid = mg.grid_ptr();
    const Grid2D& g = *grid;
    const ScalarField e = ff.E / ff.omega, f = ff.F / ff.omega, gg = ff.G / ff.omega;

    ConformalChart chart;
    chart.J_psi = (1.0 + e) * (1.0 + gg) - square(f);
    if (!(chart.J_psi.min_value() > 2)) {
        std::ostringstream os;
        os << "Jacobian of Psi drops to " << chart.J_psi.min_value() << " (must exceed 2)";
        throw Error(ErrorKind::kDomain, os.str(), {}, chart.J_psi.min_value());
    }

    Potential pm = integrate_potential(VectorField2{e, f}, opts.potential);
    Potential pn = integrate_potential(VectorField2{f, gg}, opts.potential);
    chart.curl = pm.curl.max_abs >= pn.curl.max_abs ? pm.curl : pn.curl;
    chart.M = std::move(pm.phi);
    chart.N = std::move(pn.phi);
    chart.xi1 = ScalarField::sample(grid, [](double x, double) { return x; }) + chart.M;
    chart.xi2 = ScalarField::sample(grid, [](double, double y) { return y; }) + chart.N;

    // Smallest singular value of DPsi = I + [e f; f g] bounds the image spacing from below.
    const ScalarField lam_min = 1.0 + ((e + gg) - sqrt(square(e - gg) + 4.0 * square(f))) / 2.0;
    const double hxi = std::min(g.hx(), g.hy()) * lam_min.min_value();
    double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1, lo2 = lo1, hi2 = -lo1;
    chart.xi1.for_each_node([&](int i, int j) {
        lo1 = std::min(lo1, chart.xi1(i, j));
        hi1 = std::max(hi1, chart.xi1(i, j));
        lo2 = std::min(lo2, chart.xi2(i, j));
        hi2 = std::max(hi2, chart.xi2(i, j));
    });
    const int nx = std::max(3, static_cast<int>(std::floor((hi1 - lo1) / hxi)) + 1);
    const int ny = std::max(3, static_cast<int>(std::floor((hi2 - lo2) / hxi)) + 1);

    // Bilinear cell inversion seeds Newton on the bicubic interpolant of Psi.
    Eigen::ArrayXXd gx = Eigen::ArrayXXd::Constant(nx, ny, std::numeric_limits<double>::quiet_NaN());
    Eigen::ArrayXXd gy = gx;
    for (int j = 0; j + 1 < g.ny(); ++j) {
        for (int i = 0; i + 1 < g.nx(); ++i) {
            if (!(g.inside(i, j) && g.inside(i + 1, j) && g.inside(i, j + 1) && g.inside(i + 1, j + 1))) continue;
            const std::array<Eigen::Vector2d, 4> p{Eigen::Vector2d(chart.xi1(i, j), chart.xi2(i, j)),
                                                   Eigen::Vector2d(chart.xi1(i + 1, j), chart.xi2(i + 1, j)),
                                                   Eigen::Vector2d(chart.xi1(i, j + 1), chart.xi2(i, j + 1)),
                                                   Eigen::Vector2d(chart.xi1(i + 1, j + 1), chart.xi2(i + 1, j + 1))};
            double b1 = p[0][0], B1 = p[0][0], b2 = p[0][1], B2 = p[0][1];
            for (const auto& q : p) {
                b1 = std::min(b1, q[0]);
                B1 = std::max(B1, q[0]);
                b2 = std::min(b2, q[1]);
                B2 = std::max(B2, q[1]);
            }
            const int a0 = std::max(0, static_cast<int>(std::ceil((b1 - lo1) / hxi)));
            const int a1 = std::min(nx - 1, static_cast<int>(std::floor((B1 - lo1) / hxi)));
            const int c0 = std::max(0, static_cast<int>(std::ceil((b2 - lo2) / hxi)));
            const int c1 = std::min(ny - 1, static_cast<int>(std::floor((B2 - lo2) / hxi)));
            for (int c = c0; c <= c1; ++c) {
                for (int a = a0; a <= a1; ++a) {
                    if (!std::isnan(gx(a, c))) continue;
                    const auto st = invert_bilinear(p, {lo1 + hxi * a, lo2 + hxi * c});
                    if (!st) continue;
                    gx(a, c) = g.x(i) + (*st)[0] * g.hx();
                    gy(a, c) = g.y(j) + (*st)[1] * g.hy();
                }
            }
        }
    }

    const MaskedCubic psi1(chart.xi1), psi2(chart.xi2);
    Mask mask = Mask::Constant(nx, ny, false);
    Eigen::ArrayXXd xs = Eigen::ArrayXXd::Zero(nx, ny), ys = xs;
    for (int c = 0; c < ny; ++c) {
        for (int a = 0; a < nx; ++a) {
            if (std::isnan(gx(a, c))) continue;
            const Eigen::Vector2d target(lo1 + hxi * a, lo2 + hxi * c);
            Eigen::Vector2d p(gx(a, c), gy(a, c));
            bool ok = false;
            for (int it = 0; it < opts.newton_max_iter; ++it) {
                const auto s1 = psi1(p[0], p[1]);
                const auto s2 = psi2(p[0], p[1]);
                if (!s1 || !s2) break;
                const Eigen::Vector2d r(s1->value - target[0], s2->value - target[1]);
                if (r.lpNorm<Eigen::Infinity>() <= opts.newton_tol) {
                    ok = true;
                    break;
                }
                Eigen::Matrix2d J;
                J << s1->dx, s1->dy, s2->dx, s2->dy;
                p -= J.inverse() * r;
                if (!p.allFinite()) break;
            }
            if (ok) {
                mask(a, c) = true;
                xs(a, c) = p[0];
                ys(a, c) = p[1];
            } else {
                ++chart.dropped_nodes;
            }
        }
    }
    const int before = static_cast<int>(mask.count());
    prune_for_stencils(mask);
    chart.dropped_nodes += before - static_cast<int>(mask.count());
    if (!mask.any()) throw Error(ErrorKind::kDomain, "conformal chart could not invert Psi at any xi-node");

    const NodeIndex src_anchor = g.anchor();
    const double ax = chart.xi1.at(src_anchor), ay = chart.xi2.at(src_anchor);
    NodeIndex anchor{-1, -1};
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < ny; ++c) {
        for (int a = 0; a < nx; ++a) {
            if (!mask(a, c)) continue;
            const double d = std::hypot(lo1 + hxi * a - ax, lo2 + hxi * c - ay);
            if (d < best) {
                best = d;
                anchor = {a, c};
            }
        }
    }
    chart.xi_grid = std::make_shared<const Grid2D>(nx, ny, lo1, lo2, hxi, hxi, std::move(mask), anchor);
    chart.x_of_xi = ScalarField(chart.xi_grid, xs);
    chart.y_of_xi = ScalarField(chart.xi_grid, ys);
    chart.conformal_factor = resample(MaskedCubic(ff.omega / chart.J_psi), chart);
    return chart;
}

std::vector<ScalarField> resample_heights(const ConformalChart& chart, const MultiGraph& mg)
{
    if (!same_grid(mg.grid_ptr(), chart.M.grid_ptr())) throw Error(ErrorKind::kGridMismatch, "multigraph and chart live on different grids");
    std::vector<ScalarField> out;
    for (const auto& f : mg.f) out.push_back(resample(MaskedCubic(f), chart));
    return out;
}

ResidualReport conformality_residual(const ConformalChart& chart, const MultiGraph& mg, Signature signature)
{
    const FirstFundamental ff = first_fundamental(mg, signature);
    const ScalarField lambda = resample(MaskedCubic(ff.omega / chart.J_psi), chart);
    const auto X = ambient_coordinates(chart, mg);
    ScalarField E(chart.xi_grid, 0.0), F(chart.xi_grid, 0.0), G(chart.xi_grid, 0.0);
    for (std::size_t k = 0; k < X.size(); ++k) {
        const double s = slot_sign(signature, k);
        const ScalarField d1 = dx(X[k]), d2 = dy(X[k]);
        E += s * square(d1);
        F += s * d1 * d2;
        G += s * square(d2);
    }
    return report(pointwise_max_abs<double>({(E - G) / lambda, F / lambda, (E - lambda) / lambda}));
}

WeierstrassData weierstrass_data(const ConformalChart& chart, const MultiGraph& mg, Signature signature)
{
    WeierstrassData w;
    w.grid = chart.xi_grid;
    w.signature = signature;
    for (const auto& X : ambient_coordinates(chart, mg)) {
        w.re.push_back(dx(X));
        w.im.push_back(-dy(X));
    }
    return w;
}

ResidualReport nullity_residual(const WeierstrassData& w)
{
    ScalarField sre(w.grid, 0.0), sim(w.grid, 0.0), norm(w.grid, 0.0);
    for (std::size_t k = 0; k < w.re.size(); ++k) {
        const double s = slot_sign(w.signature, k);
        sre += s * (square(w.re[k]) - square(w.im[k]));
        sim += 2.0 * s * w.re[k] * w.im[k];
        norm += square(w.re[k]) + square(w.im[k]);
    }
    return report(sqrt(square(sre) + square(sim)) / norm);
}

ResidualReport weierstrass_twin_residual(const WeierstrassData& wf, const WeierstrassData& wg)
{
    if (!same_grid(wf.grid, wg.grid)) throw Error(ErrorKind::kGridMismatch, "Weierstrass data live on different xi-grids");
    if (wf.re.size() != wg.re.size()) throw Error(ErrorKind::kDomain, "Weierstrass data have different lengths");
    std::vector<ScalarField> diffs;
    for (std::size_t k = 0; k < wf.re.size(); ++k) {
        if (k < 2) {
            diffs.push_back(sqrt(square(wf.re[k] - wg.re[k]) + square(wf.im[k] - wg.im[k])));
        } else {
            // phi + i phi^ = (re - im^) + i (im + re^)
            diffs.push_back(sqrt(square(wf.re[k] - wg.im[k]) + square(wf.im[k] + wg.re[k])));
        }
    }
    return report(pointwise_max_abs(diffs));
}

} // namespace twinsurf
