#pragma once

// Twin correspondence between CMC graphs in E^3(kappa, tau) and spacelike CMC graphs in
// the Lorentzian BCV spaces, on the equation family
//     2H/delta^2 = d/dx(alpha/omega) + d/dy(beta/omega).

#include "twinsurf/bcv.hpp"
#include "twinsurf/numerics.hpp"

#include <optional>

namespace twinsurf {

struct CmcParams {
    double kappa = 0;
    double tau = 0;
    double H = 0;
    int epsilon = 1;

    friend bool operator==(const CmcParams&, const CmcParams&) = default;
};

struct GraphData {
    ScalarField f;
    CmcParams params;
    ScalarField alpha;
    ScalarField beta;
    ScalarField omega;
    ScalarField delta;
};

/// Builds alpha, beta, omega, delta from f. Throws kDomain where delta <= 0 and, for
/// epsilon = -1, kSpacelike on nodes with 1 - delta^2 (alpha^2 + beta^2) <= 0.
GraphData make_graph_data(ScalarField f, const CmcParams& params);

/// Same, with (f_x, f_y) supplied instead of differentiated, e.g. the field a potential was
/// integrated from.
GraphData make_graph_data(ScalarField f, const CmcParams& params, const VectorField2& grad);

/// div(alpha/omega, beta/omega) - 2H/delta^2.
ScalarField cmc_residual(const GraphData& data);

struct TwinOptions {
    PotentialOptions potential;
    double lightlike_tol = 1e-6;
};

struct TwinResult {
    ScalarField g;
    /// The integrated field W; grad g up to quadrature error.
    VectorField2 gradient;
    CmcParams params;
    ResidualReport curl_report;
    ResidualReport dual_pde_report;
    double spacelike_margin = 0;
    double path_discrepancy = 0;
};

/// Riemannian graph (kappa, tau, H, +1) to its spacelike twin solving (kappa, -H, tau, -1).
TwinResult twin_transform(const GraphData& data, const TwinOptions& opts = {});

/// Spacelike graph (kappa, tau', H', -1) to its twin solving (kappa, H', -tau', +1).
TwinResult inverse_twin_transform(const GraphData& data, const TwinOptions& opts = {});

/// Applies the transform matching data.params.epsilon.
TwinResult any_twin_transform(const GraphData& data, const TwinOptions& opts = {});

/// max |twin(twin(f)) - (f - f(anchor))|.
ResidualReport involutivity_check(const GraphData& data, const TwinOptions& opts = {});

/// Entrywise |I_twin - u^2 I_riem| with u = 1/omega, merged with the pointwise identity
/// 1 - delta^2 (alpha~^2 + beta~^2) = 1/omega^2. Argument order does not matter.
ResidualReport conformal_factor_check(const GraphData& a, const GraphData& b);

/// Induced metric (E, F, G) of a graph in its BCV ambient, in (x, y) coordinates.
struct InducedMetric {
    ScalarField E;
    ScalarField F;
    ScalarField G;
};
InducedMetric induced_metric(const GraphData& data);

struct SpacelikeRegion {
    enum class Kind { kDisk, kEntire, kEmpty };
    Kind kind = Kind::kEmpty;
    double cx = 0;
    double cy = 0;
    double radius = 0;

    bool contains(double x, double y) const;
};

/// Where q = mu1 x + mu2 y is spacelike in the Lorentzian Heisenberg space of bundle
/// curvature tau.
SpacelikeRegion affine_spacelike_region(double mu1, double mu2, double tau);

} // namespace twinsurf
