#pragma once

#include "twinsurf/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <string>

namespace twinsurf {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Masked node-centred rectangular grid. Arrays are indexed (i, j) with i along x and
/// j along y; storage is column-major so the linear order is x-fastest (row-major in y).
template <typename Scalar>
class BasicGrid {
public:
    BasicGrid(int nx, int ny, Scalar x0, Scalar y0, Scalar hx, Scalar hy, Mask mask, NodeIndex anchor)
        : nx_(nx), ny_(ny), x0_(x0), y0_(y0), hx_(hx), hy_(hy), mask_(std::move(mask)), anchor_(anchor)
    {
        if (nx < 2 || ny < 2) {
            throw Error(ErrorKind::kDomain, "grid needs at least 2x2 nodes");
        }
        if (!(hx > 0) || !(hy > 0)) {
            throw Error(ErrorKind::kDomain, "grid spacings must be positive");
        }
        if (mask_.rows() != nx || mask_.cols() != ny) {
            throw Error(ErrorKind::kDomain, "mask shape does not match grid");
        }
        if (!inside(anchor.i, anchor.j)) {
            throw Error(ErrorKind::kDomain, "anchor is not a masked node", {anchor});
        }
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    Scalar x0() const { return x0_; }
    Scalar y0() const { return y0_; }
    Scalar hx() const { return hx_; }
    Scalar hy() const { return hy_; }
    Scalar h() const { return std::max(hx_, hy_); }
    Scalar x(int i) const { return x0_ + hx_ * Scalar(i); }
    Scalar y(int j) const { return y0_ + hy_ * Scalar(j); }
    const Mask& mask() const { return mask_; }
    NodeIndex anchor() const { return anchor_; }

    bool in_bounds(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }
    bool inside(int i, int j) const { return in_bounds(i, j) && mask_(i, j); }
    int node_count() const { return static_cast<int>(mask_.count()); }

    /// Masked node closest to (x, y).
    NodeIndex nearest_node(Scalar x, Scalar y) const
    {
        NodeIndex best{-1, -1};
        Scalar best_d = std::numeric_limits<Scalar>::infinity();
        for (int j = 0; j < ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                if (!mask_(i, j)) continue;
                const Scalar d = (this->x(i) - x) * (this->x(i) - x) + (this->y(j) - y) * (this->y(j) - y);
                if (d < best_d) {
                    best_d = d;
                    best = {i, j};
                }
            }
        }
        if (best.i < 0) throw Error(ErrorKind::kDomain, "grid mask is empty");
        return best;
    }

    BasicGrid with_anchor(NodeIndex anchor) const { return BasicGrid(nx_, ny_, x0_, y0_, hx_, hy_, mask_, anchor); }

    BasicGrid with_mask(Mask mask, NodeIndex anchor) const
    {
        return BasicGrid(nx_, ny_, x0_, y0_, hx_, hy_, std::move(mask), anchor);
    }

    friend bool operator==(const BasicGrid& a, const BasicGrid& b)
    {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.x0_ == b.x0_ && a.y0_ == b.y0_ && a.hx_ == b.hx_
               && a.hy_ == b.hy_ && (a.mask_ == b.mask_).all();
    }

private:
    int nx_;
    int ny_;
    Scalar x0_;
    Scalar y0_;
    Scalar hx_;
    Scalar hy_;
    Mask mask_;
    NodeIndex anchor_;
};

template <typename Scalar>
using GridPtr = std::shared_ptr<const BasicGrid<Scalar>>;

template <typename Scalar>
bool same_grid(const GridPtr<Scalar>& a, const GridPtr<Scalar>& b)
{
    return a == b || (a && b && *a == *b);
}

/// Real values on the masked nodes of a grid; off-mask entries hold NaN.
template <typename Scalar>
class BasicScalarField {
public:
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    BasicScalarField() = default;

    explicit BasicScalarField(GridPtr<Scalar> grid, Scalar fill = Scalar(0))
        : grid_(std::move(grid)), values_(Array::Constant(grid_->nx(), grid_->ny(), fill))
    {
        blank_unmasked();
    }

    BasicScalarField(GridPtr<Scalar> grid, Array values) : grid_(std::move(grid)), values_(std::move(values))
    {
        if (values_.rows() != grid_->nx() || values_.cols() != grid_->ny()) {
            throw Error(ErrorKind::kGridMismatch, "field shape does not match grid");
        }
        blank_unmasked();
    }

    template <typename Fn>
    static BasicScalarField sample(GridPtr<Scalar> grid, Fn&& fn)
    {
        BasicScalarField out(grid);
        for (int j = 0; j < grid->ny(); ++j) {
            for (int i = 0; i < grid->nx(); ++i) {
                if (grid->mask()(i, j)) out.values_(i, j) = fn(grid->x(i), grid->y(j));
            }
        }
        return out;
    }

    const BasicGrid<Scalar>& grid() const { return *grid_; }
    const GridPtr<Scalar>& grid_ptr() const { return grid_; }
    const Array& values() const { return values_; }
    Array& values() { return values_; }

    Scalar operator()(int i, int j) const { return values_(i, j); }
    Scalar& operator()(int i, int j) { return values_(i, j); }
    Scalar at(NodeIndex n) const { return values_(n.i, n.j); }

    template <typename Fn>
    BasicScalarField map(Fn&& fn) const
    {
        BasicScalarField out(grid_);
        for_each_node([&](int i, int j) { out.values_(i, j) = fn(values_(i, j)); });
        return out;
    }

    template <typename Fn>
    void for_each_node(Fn&& fn) const
    {
        for (int j = 0; j < grid_->ny(); ++j) {
            for (int i = 0; i < grid_->nx(); ++i) {
                if (grid_->mask()(i, j)) fn(i, j);
            }
        }
    }

    Scalar max_abs() const
    {
        Scalar m = 0;
        for_each_node([&](int i, int j) { m = std::max(m, std::abs(values_(i, j))); });
        return m;
    }

    Scalar min_value() const
    {
        Scalar m = std::numeric_limits<Scalar>::infinity();
        for_each_node([&](int i, int j) { m = std::min(m, values_(i, j)); });
        return m;
    }

    bool all_finite() const
    {
        bool ok = true;
        for_each_node([&](int i, int j) { ok = ok && std::isfinite(values_(i, j)); });
        return ok;
    }

    BasicScalarField& operator+=(const BasicScalarField& o) { return combine(o, std::plus<>{}); }
    BasicScalarField& operator-=(const BasicScalarField& o) { return combine(o, std::minus<>{}); }
    BasicScalarField& operator*=(const BasicScalarField& o) { return combine(o, std::multiplies<>{}); }
    BasicScalarField& operator/=(const BasicScalarField& o) { return combine(o, std::divides<>{}); }
    BasicScalarField& operator+=(Scalar s) { values_ += s; return *this; }
    BasicScalarField& operator-=(Scalar s) { values_ -= s; return *this; }
    BasicScalarField& operator*=(Scalar s) { values_ *= s; return *this; }
    BasicScalarField& operator/=(Scalar s) { values_ /= s; return *this; }

    friend BasicScalarField operator+(BasicScalarField a, const BasicScalarField& b) { return a += b; }
    friend BasicScalarField operator-(BasicScalarField a, const BasicScalarField& b) { return a -= b; }
    friend BasicScalarField operator*(BasicScalarField a, const BasicScalarField& b) { return a *= b; }
    friend BasicScalarField operator/(BasicScalarField a, const BasicScalarField& b) { return a /= b; }
    friend BasicScalarField operator+(BasicScalarField a, Scalar s) { return a += s; }
    friend BasicScalarField operator-(BasicScalarField a, Scalar s) { return a -= s; }
    friend BasicScalarField operator*(BasicScalarField a, Scalar s) { return a *= s; }
    friend BasicScalarField operator/(BasicScalarField a, Scalar s) { return a /= s; }
    friend BasicScalarField operator+(Scalar s, BasicScalarField a) { return a += s; }
    friend BasicScalarField operator*(Scalar s, BasicScalarField a) { return a *= s; }
    friend BasicScalarField operator-(Scalar s, const BasicScalarField& a) { return a.map([s](Scalar v) { return s - v; }); }
    friend BasicScalarField operator/(Scalar s, const BasicScalarField& a) { return a.map([s](Scalar v) { return s / v; }); }
    friend BasicScalarField operator-(const BasicScalarField& a) { return a.map([](Scalar v) { return -v; }); }

private:
    template <typename Op>
    BasicScalarField& combine(const BasicScalarField& o, Op op)
    {
        if (!same_grid(grid_, o.grid_)) throw Error(ErrorKind::kGridMismatch, "fields live on different grids");
        values_ = op(values_, o.values_);
        return *this;
    }

    void blank_unmasked()
    {
        values_ = grid_->mask().select(values_, Array::Constant(grid_->nx(), grid_->ny(), std::numeric_limits<Scalar>::quiet_NaN()));
    }

    GridPtr<Scalar> grid_;
    Array values_;
};

template <typename Scalar>
BasicScalarField<Scalar> sqrt(const BasicScalarField<Scalar>& f)
{
    return f.map([](Scalar v) { return std::sqrt(v); });
}

template <typename Scalar>
BasicScalarField<Scalar> square(const BasicScalarField<Scalar>& f)
{
    return f.map([](Scalar v) { return v * v; });
}

/// Pair of scalar fields (v1, v2) on one grid.
template <typename Scalar>
struct BasicVectorField2 {
    BasicScalarField<Scalar> v1;
    BasicScalarField<Scalar> v2;

    const BasicGrid<Scalar>& grid() const { return v1.grid(); }
    const GridPtr<Scalar>& grid_ptr() const { return v1.grid_ptr(); }

    Scalar max_norm() const
    {
        Scalar m = 0;
        v1.for_each_node([&](int i, int j) { m = std::max(m, std::hypot(v1(i, j), v2(i, j))); });
        return m;
    }
};

using Grid2D = BasicGrid<double>;
using GridHandle = GridPtr<double>;
using ScalarField = BasicScalarField<double>;
using VectorField2 = BasicVectorField2<double>;

// ---------------------------------------------------------------------------
// Mask construction
// ---------------------------------------------------------------------------

/// Rectangular sampling box; node counts include both ends.
struct GridSpec {
    int nx = 101;
    int ny = 101;
    double xmin = -1;
    double xmax = 1;
    double ymin = -1;
    double ymax = 1;

    double hx() const { return (xmax - xmin) / (nx - 1); }
    double hy() const { return (ymax - ymin) / (ny - 1); }
};

using Region = std::function<bool(double, double)>;

namespace regions {

inline Region everything()
{
    return [](double, double) { return true; };
}

inline Region disk(double radius, double cx = 0, double cy = 0)
{
    return [=](double x, double y) { return std::hypot(x - cx, y - cy) <= radius; };
}

inline Region annulus(double r0, double r1)
{
    return [=](double x, double y) {
        const double r = std::hypot(x, y);
        return r >= r0 && r <= r1;
    };
}

/// Annulus cut along the negative x-axis; nodes on the cut (y == 0, x < 0) are removed.
inline Region slit_annulus(double r0, double r1, double slit_half_width)
{
    return [=](double x, double y) {
        const double r = std::hypot(x, y);
        if (r < r0 || r > r1) return false;
        return !(x < 0 && std::abs(y) < slit_half_width);
    };
}

inline Region intersect(Region a, Region b)
{
    return [a = std::move(a), b = std::move(b)](double x, double y) { return a(x, y) && b(x, y); };
}

} // namespace regions

/// Removes nodes that cannot support a second-order first-derivative stencil in x or y,
/// repeating until stable.
inline void prune_for_stencils(Mask& mask)
{
    const int nx = static_cast<int>(mask.rows());
    const int ny = static_cast<int>(mask.cols());
    auto at = [&](int i, int j) { return i >= 0 && j >= 0 && i < nx && j < ny && mask(i, j); };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                if (!mask(i, j)) continue;
                const bool xs = (at(i - 1, j) && at(i + 1, j)) || (at(i + 1, j) && at(i + 2, j)) || (at(i - 1, j) && at(i - 2, j));
                const bool ys = (at(i, j - 1) && at(i, j + 1)) || (at(i, j + 1) && at(i, j + 2)) || (at(i, j - 1) && at(i, j - 2));
                if (!xs || !ys) {
                    mask(i, j) = false;
                    changed = true;
                }
            }
        }
    }
}

/// Keeps only the 4-connected component containing `seed`.
inline Mask connected_component(const Mask& mask, NodeIndex seed)
{
    const int nx = static_cast<int>(mask.rows());
    const int ny = static_cast<int>(mask.cols());
    Mask out = Mask::Constant(nx, ny, false);
    if (seed.i < 0 || seed.j < 0 || seed.i >= nx || seed.j >= ny || !mask(seed.i, seed.j)) return out;
    std::deque<NodeIndex> queue{seed};
    out(seed.i, seed.j) = true;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const NodeIndex n = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
            const int i = n.i + di[k];
            const int j = n.j + dj[k];
            if (i < 0 || j < 0 || i >= nx || j >= ny || !mask(i, j) || out(i, j)) continue;
            out(i, j) = true;
            queue.push_back({i, j});
        }
    }
    return out;
}

/// Samples `region` on the box, prunes nodes without valid stencils, keeps the component
/// of the node nearest to (anchor_x, anchor_y) and anchors there.
inline GridHandle make_grid(const GridSpec& spec, const Region& region, double anchor_x, double anchor_y)
{
    if (spec.nx < 3 || spec.ny < 3) throw Error(ErrorKind::kDomain, "grid needs at least 3x3 nodes");
    Mask mask(spec.nx, spec.ny);
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            mask(i, j) = region(spec.xmin + spec.hx() * i, spec.ymin + spec.hy() * j);
        }
    }
    prune_for_stencils(mask);
    NodeIndex seed{-1, -1};
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            if (!mask(i, j)) continue;
            const double dx = spec.xmin + spec.hx() * i - anchor_x;
            const double dy = spec.ymin + spec.hy() * j - anchor_y;
            if (dx * dx + dy * dy < best) {
                best = dx * dx + dy * dy;
                seed = {i, j};
            }
        }
    }
    if (seed.i < 0) throw Error(ErrorKind::kDomain, "region contains no usable grid node");
    Mask component = connected_component(mask, seed);
    prune_for_stencils(component);
    if (!component(seed.i, seed.j)) throw Error(ErrorKind::kDomain, "anchor component vanished after stencil pruning");
    return std::make_shared<const Grid2D>(spec.nx, spec.ny, spec.xmin, spec.ymin, spec.hx(), spec.hy(), std::move(component), seed);
}

inline GridHandle make_grid(const GridSpec& spec, const Region& region)
{
    return make_grid(spec, region, 0.5 * (spec.xmin + spec.xmax), 0.5 * (spec.ymin + spec.ymax));
}

} // namespace twinsurf
