#pragma once

// Simultaneous conformal coordinates for a twin pair: potentials M, N with
// grad M = (E, F)/omega and grad N = (F, G)/omega, the map Psi = (x + M, y + N), its inverse
// on a rectangular xi-grid, and the Weierstrass data of both surfaces in that chart.

#include "twinsurf/twin2.hpp"

#include <optional>

namespace twinsurf {

struct CubicSample {
    double value = 0;
    double dx = 0;
    double dy = 0;
};

/// Catmull-Rom bicubic interpolation of a masked field. A query is answered only when the
/// full 4x4 support of its cell lies in the mask.
class MaskedCubic {
public:
    explicit MaskedCubic(ScalarField field) : field_(std::move(field)) {}

    std::optional<CubicSample> operator()(double x, double y) const;

private:
    ScalarField field_;
};

struct ConformalOptions {
    PotentialOptions potential;
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
};

struct ConformalChart {
    ScalarField M;
    ScalarField N;
    ScalarField xi1;
    ScalarField xi2;
    ScalarField J_psi;
    ResidualReport curl;
    /// Rectangular grid in (xi1, xi2); masked where Psi was inverted.
    GridHandle xi_grid;
    ScalarField x_of_xi;
    ScalarField y_of_xi;
    /// omega / J_psi of the source surface, on the xi-grid.
    ScalarField conformal_factor;
    int dropped_nodes = 0;
};

/// Throws kNotAGradient when the chart potentials fail the curl test and kDomain when
/// J_psi <= 2 somewhere.
ConformalChart build_conformal_chart(const MultiGraph& mg, const FirstFundamental& ff, const ConformalOptions& opts = {});

/// Heights of mg resampled at Psi^{-1}(xi) for every xi-node.
std::vector<ScalarField> resample_heights(const ConformalChart& chart, const MultiGraph& mg);

/// Relative departure of the pulled-back metric from lambda (dxi1^2 + dxi2^2), with
/// lambda = omega/J_psi for the surface of the given signature.
ResidualReport conformality_residual(const ConformalChart& chart, const MultiGraph& mg, Signature signature);

struct WeierstrassData {
    GridHandle grid;
    /// phi_k = (d/dxi1 - i d/dxi2) X_k for X = (x, y, f_1, ..., f_n).
    std::vector<ScalarField> re;
    std::vector<ScalarField> im;
    Signature signature = Signature::kRiemannian;
};

WeierstrassData weierstrass_data(const ConformalChart& chart, const MultiGraph& mg, Signature signature);

/// |sum s_k phi_k^2| / sum |phi_k|^2, with s_k = -1 on the height slots of a Lorentzian curve.
ResidualReport nullity_residual(const WeierstrassData& w);

/// max of |phi_1 - phi^_1|, |phi_2 - phi^_2| and |phi_{k+2} + i phi^_{k+2}|.
ResidualReport weierstrass_twin_residual(const WeierstrassData& wf, const WeierstrassData& wg);

} // namespace twinsurf
