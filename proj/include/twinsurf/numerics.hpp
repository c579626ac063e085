#pragma once

// Discrete calculus on masked grids: second-order derivative stencils, divergence and curl,
// and reconstruction of a potential from a curl-free field by path integration.

#include "twinsurf/grid.hpp"

#include <cmath>
#include <deque>
#include <optional>
#include <sstream>
#include <vector>

namespace twinsurf {

struct ResidualReport {
    double max_abs = 0;
    double mean_abs = 0;
    double l2 = 0;
    double h = 0;
    int node_count = 0;
};

/// Combines reports as if their node sets were disjoint.
inline ResidualReport merge(const ResidualReport& a, const ResidualReport& b)
{
    ResidualReport out;
    out.node_count = a.node_count + b.node_count;
    out.max_abs = std::max(a.max_abs, b.max_abs);
    out.mean_abs = out.node_count == 0 ? 0 : (a.mean_abs * a.node_count + b.mean_abs * b.node_count) / out.node_count;
    out.l2 = std::hypot(a.l2, b.l2);
    out.h = std::max(a.h, b.h);
    return out;
}

template <typename Scalar>
ResidualReport report(const BasicScalarField<Scalar>& f, const Mask& subset)
{
    const auto& g = f.grid();
    ResidualReport r;
    r.h = double(g.h());
    double sum = 0, sum_sq = 0;
    f.for_each_node([&](int i, int j) {
        if (!subset(i, j)) return;
        const double v = std::abs(double(f(i, j)));
        r.max_abs = std::max(r.max_abs, std::isfinite(v) ? v : std::numeric_limits<double>::infinity());
        sum += v;
        sum_sq += v * v;
        ++r.node_count;
    });
    r.mean_abs = r.node_count ? sum / r.node_count : 0.0;
    r.l2 = std::sqrt(sum_sq * double(g.hx()) * double(g.hy()));
    return r;
}

template <typename Scalar>
ResidualReport report(const BasicScalarField<Scalar>& f)
{
    return report(f, f.grid().mask());
}

/// Nodes whose 4-neighbourhood lies in the mask, eroded `depth` times. Depth 2 is the set
/// where a derivative of a derivative only ever sees central differences.
template <typename Scalar>
Mask interior_core(const BasicGrid<Scalar>& grid, int depth = 2)
{
    Mask cur = grid.mask();
    for (int d = 0; d < depth; ++d) {
        Mask next = cur;
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) {
                if (!cur(i, j)) continue;
                auto at = [&](int a, int b) { return grid.in_bounds(a, b) && cur(a, b); };
                next(i, j) = at(i - 1, j) && at(i + 1, j) && at(i, j - 1) && at(i, j + 1);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

/// Report restricted to the depth-2 interior core, falling back to the whole mask when the
/// core is empty.
template <typename Scalar>
ResidualReport core_report(const BasicScalarField<Scalar>& f)
{
    Mask core = interior_core(f.grid(), 2);
    if (!core.any()) return report(f);
    return report(f, core);
}

/// Pointwise max of |f_k| over a list of fields on one grid.
template <typename Scalar>
BasicScalarField<Scalar> pointwise_max_abs(const std::vector<BasicScalarField<Scalar>>& fields)
{
    if (fields.empty()) throw Error(ErrorKind::kDomain, "pointwise_max_abs needs at least one field");
    BasicScalarField<Scalar> out(fields.front().grid_ptr());
    for (const auto& f : fields) {
        if (!same_grid(f.grid_ptr(), out.grid_ptr())) throw Error(ErrorKind::kGridMismatch, "fields live on different grids");
        out.for_each_node([&](int i, int j) { out(i, j) = std::max(out(i, j), std::abs(f(i, j))); });
    }
    return out;
}

namespace detail {

inline std::string node_message(const char* what, NodeIndex n)
{
    std::ostringstream os;
    os << what << " at node (" << n.i << ", " << n.j << ")";
    return os.str();
}

/// First derivative along one axis; (di, dj) is the unit step, `step` the spacing.
template <typename Scalar>
BasicScalarField<Scalar> first_derivative(const BasicScalarField<Scalar>& f, int di, int dj, Scalar step)
{
    const auto& g = f.grid();
    BasicScalarField<Scalar> out(f.grid_ptr());
    f.for_each_node([&](int i, int j) {
        const bool m1 = g.inside(i - di, j - dj);
        const bool p1 = g.inside(i + di, j + dj);
        if (m1 && p1) {
            out(i, j) = (f(i + di, j + dj) - f(i - di, j - dj)) / (2 * step);
        } else if (p1 && g.inside(i + 2 * di, j + 2 * dj)) {
            out(i, j) = (-3 * f(i, j) + 4 * f(i + di, j + dj) - f(i + 2 * di, j + 2 * dj)) / (2 * step);
        } else if (m1 && g.inside(i - 2 * di, j - 2 * dj)) {
            out(i, j) = (3 * f(i, j) - 4 * f(i - di, j - dj) + f(i - 2 * di, j - 2 * dj)) / (2 * step);
        } else {
            throw Error(ErrorKind::kStencil, node_message("fewer than 3 collinear masked nodes", {i, j}), {{i, j}});
        }
    });
    return out;
}

/// Second derivative along one axis with the compact three-point stencil, four-point
/// one-sided stencils near the mask edge, and `fallback` where neither fits.
template <typename Scalar>
BasicScalarField<Scalar> second_derivative(const BasicScalarField<Scalar>& f, int di, int dj, Scalar step,
                                           const BasicScalarField<Scalar>& fallback)
{
    const auto& g = f.grid();
    BasicScalarField<Scalar> out(f.grid_ptr());
    const Scalar h2 = step * step;
    f.for_each_node([&](int i, int j) {
        auto in = [&](int k) { return g.inside(i + k * di, j + k * dj); };
        auto v = [&](int k) { return f(i + k * di, j + k * dj); };
        if (in(-1) && in(1)) {
            out(i, j) = (v(1) - 2 * v(0) + v(-1)) / h2;
        } else if (in(1) && in(2) && in(3)) {
            out(i, j) = (2 * v(0) - 5 * v(1) + 4 * v(2) - v(3)) / h2;
        } else if (in(-1) && in(-2) && in(-3)) {
            out(i, j) = (2 * v(0) - 5 * v(-1) + 4 * v(-2) - v(-3)) / h2;
        } else {
            out(i, j) = fallback(i, j);
        }
    });
    return out;
}

} // namespace detail

template <typename Scalar>
BasicScalarField<Scalar> dx(const BasicScalarField<Scalar>& f)
{
    return detail::first_derivative(f, 1, 0, f.grid().hx());
}

template <typename Scalar>
BasicScalarField<Scalar> dy(const BasicScalarField<Scalar>& f)
{
    return detail::first_derivative(f, 0, 1, f.grid().hy());
}

template <typename Scalar>
BasicScalarField<Scalar> dxx(const BasicScalarField<Scalar>& f)
{
    return detail::second_derivative(f, 1, 0, f.grid().hx(), dx(dx(f)));
}

template <typename Scalar>
BasicScalarField<Scalar> dyy(const BasicScalarField<Scalar>& f)
{
    return detail::second_derivative(f, 0, 1, f.grid().hy(), dy(dy(f)));
}

/// Mixed derivative: the four-corner cross stencil where all diagonal neighbours are masked,
/// otherwise dy(dx f).
template <typename Scalar>
BasicScalarField<Scalar> dxy(const BasicScalarField<Scalar>& f)
{
    const auto& g = f.grid();
    const BasicScalarField<Scalar> composed = dy(dx(f));
    BasicScalarField<Scalar> out(f.grid_ptr());
    const Scalar denom = 4 * g.hx() * g.hy();
    f.for_each_node([&](int i, int j) {
        if (g.inside(i + 1, j + 1) && g.inside(i + 1, j - 1) && g.inside(i - 1, j + 1) && g.inside(i - 1, j - 1)) {
            out(i, j) = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / denom;
        } else {
            out(i, j) = composed(i, j);
        }
    });
    return out;
}

/// Central differences in the interior, second-order one-sided stencils at the mask edge.
template <typename Scalar>
BasicVectorField2<Scalar> gradient(const BasicScalarField<Scalar>& f)
{
    return {dx(f), dy(f)};
}

template <typename Scalar>
BasicScalarField<Scalar> divergence(const BasicVectorField2<Scalar>& v)
{
    return dx(v.v1) + dy(v.v2);
}

/// dv2/dx - dv1/dy; vanishes (to stencil accuracy) exactly when v is locally a gradient.
template <typename Scalar>
BasicScalarField<Scalar> curl_residual(const BasicVectorField2<Scalar>& v)
{
    return dx(v.v2) - dy(v.v1);
}

/// True iff the masked nodes are 4-connected and the complex of masked nodes, edges between
/// adjacent masked nodes, and cells with four masked corners has Euler characteristic 1.
template <typename Scalar>
bool check_simply_connected(const BasicGrid<Scalar>& grid)
{
    const Mask& m = grid.mask();
    long vertices = m.count();
    if (vertices == 0) return false;
    NodeIndex seed{-1, -1};
    long edges = 0, faces = 0;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            if (!m(i, j)) continue;
            if (seed.i < 0) seed = {i, j};
            const bool right = grid.inside(i + 1, j);
            const bool up = grid.inside(i, j + 1);
            edges += right + up;
            if (right && up && grid.inside(i + 1, j + 1)) ++faces;
        }
    }
    if (connected_component(m, seed).count() != vertices) return false;
    return vertices - edges + faces == 1;
}

/// Trapezoid integral of v from (i0, j0) to (i1, j1) inside a fully masked block, either
/// along the starting row first or along the starting column first.
template <typename Scalar>
Scalar block_path_integral(const BasicVectorField2<Scalar>& v, NodeIndex from, NodeIndex to, bool row_first)
{
    const auto& g = v.grid();
    Scalar sum = 0;
    auto walk_x = [&](int j, int ia, int ib) {
        const int s = ib >= ia ? 1 : -1;
        for (int i = ia; i != ib; i += s) sum += Scalar(s) * g.hx() * (v.v1(i, j) + v.v1(i + s, j)) / 2;
    };
    auto walk_y = [&](int i, int ja, int jb) {
        const int s = jb >= ja ? 1 : -1;
        for (int j = ja; j != jb; j += s) sum += Scalar(s) * g.hy() * (v.v2(i, j) + v.v2(i, j + s)) / 2;
    };
    if (row_first) {
        walk_x(from.j, from.i, to.i);
        walk_y(to.i, from.j, to.j);
    } else {
        walk_y(from.i, from.j, to.j);
        walk_x(to.j, from.i, to.i);
    }
    return sum;
}

/// |row-first - column-first| across a rectangular block of masked nodes.
template <typename Scalar>
Scalar path_discrepancy(const BasicVectorField2<Scalar>& v, NodeIndex lo, NodeIndex hi)
{
    const auto& g = v.grid();
    for (int j = lo.j; j <= hi.j; ++j) {
        for (int i = lo.i; i <= hi.i; ++i) {
            if (!g.inside(i, j)) throw Error(ErrorKind::kDomain, "path-discrepancy block leaves the mask", {{i, j}});
        }
    }
    return std::abs(block_path_integral(v, lo, hi, true) - block_path_integral(v, lo, hi, false));
}

/// Largest path discrepancy over a tiling of the grid by fully masked blocks.
template <typename Scalar>
Scalar max_path_discrepancy(const BasicVectorField2<Scalar>& v, int block = 16)
{
    const auto& g = v.grid();
    Scalar worst = 0;
    for (int j0 = 0; j0 + block < g.ny(); j0 += block) {
        for (int i0 = 0; i0 + block < g.nx(); i0 += block) {
            bool full = true;
            for (int j = j0; j <= j0 + block && full; ++j)
                for (int i = i0; i <= i0 + block && full; ++i) full = g.inside(i, j);
            if (!full) continue;
            worst = std::max(worst, path_discrepancy(v, {i0, j0}, {i0 + block, j0 + block}));
        }
    }
    return worst;
}

struct PotentialOptions {
    /// Curl tolerance; empty means 10 h^2 (1 + max |V|).
    std::optional<double> curl_tol;
    bool check_curl = true;
    int discrepancy_block = 16;
};

template <typename Scalar>
struct BasicPotential {
    BasicScalarField<Scalar> phi;
    ResidualReport curl;
    Scalar path_discrepancy = 0;
};

using Potential = BasicPotential<double>;

template <typename Scalar>
double default_curl_tol(const BasicVectorField2<Scalar>& v)
{
    const double h = double(v.grid().h());
    return 10.0 * h * h * (1.0 + double(v.max_norm()));
}

/// Reconstructs phi with grad(phi) ~ v and phi(anchor) = 0.
///
/// Integration runs over a breadth-first spanning tree rooted at the anchor. Among the
/// neighbours one step closer to the anchor the parent is taken in y when possible, so on
/// rectangles every path runs along the anchor row and then up its column. Each tree edge
/// contributes a trapezoid step.
template <typename Scalar>
BasicPotential<Scalar> integrate_potential(const BasicVectorField2<Scalar>& v, const PotentialOptions& opts = {})
{
    const auto& g = v.grid();
    if (!check_simply_connected(g)) {
        throw Error(ErrorKind::kTopology, "integration domain is not simply connected");
    }
    BasicPotential<Scalar> out;
    out.curl = core_report(curl_residual(v));
    if (opts.check_curl) {
        const double tol = opts.curl_tol ? *opts.curl_tol : default_curl_tol(v);
        if (!(out.curl.max_abs <= tol)) {
            std::ostringstream os;
            os << "curl test failed: max |curl| = " << out.curl.max_abs << " > " << tol;
            throw Error(ErrorKind::kNotAGradient, os.str(), {}, out.curl.max_abs);
        }
    }

    const int nx = g.nx(), ny = g.ny();
    Eigen::ArrayXXi dist = Eigen::ArrayXXi::Constant(nx, ny, -1);
    std::vector<NodeIndex> order;
    order.reserve(g.node_count());
    const NodeIndex a = g.anchor();
    dist(a.i, a.j) = 0;
    std::deque<NodeIndex> queue{a};
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const NodeIndex n = queue.front();
        queue.pop_front();
        order.push_back(n);
        for (int k = 0; k < 4; ++k) {
            const int i = n.i + di[k], j = n.j + dj[k];
            if (!g.inside(i, j) || dist(i, j) >= 0) continue;
            dist(i, j) = dist(n.i, n.j) + 1;
            queue.push_back({i, j});
        }
    }

    out.phi = BasicScalarField<Scalar>(v.grid_ptr());
    out.phi(a.i, a.j) = 0;
    // vertical neighbours first
    const int pi[4] = {0, 0, 1, -1};
    const int pj[4] = {1, -1, 0, 0};
    for (std::size_t n = 1; n < order.size(); ++n) {
        const NodeIndex c = order[n];
        for (int k = 0; k < 4; ++k) {
            const int i = c.i + pi[k], j = c.j + pj[k];
            if (!g.inside(i, j) || dist(i, j) != dist(c.i, c.j) - 1) continue;
            Scalar step;
            if (pi[k] == 0) {
                step = Scalar(-pj[k]) * g.hy() * (v.v2(i, j) + v.v2(c.i, c.j)) / 2;
            } else {
                step = Scalar(-pi[k]) * g.hx() * (v.v1(i, j) + v.v1(c.i, c.j)) / 2;
            }
            out.phi(c.i, c.j) = out.phi(i, j) + step;
            break;
        }
    }
    out.path_discrepancy = max_path_discrepancy(v, opts.discrepancy_block);
    return out;
}

} // namespace twinsurf
