#pragma once

// Registry of closed-form and ODE-defined example surfaces, twin-pair regression, the
// Hessian-zero divergence identity, chart checks and OBJ export.

#include "twinsurf/ode.hpp"
#include "twinsurf/twin1.hpp"
#include "twinsurf/twin2.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace twinsurf::catalog {

using Params = std::map<std::string, double>;
using HeightFn = std::function<double(double, double)>;

enum class DomainKind { kRect, kDisk, kSlitAnnulus };

struct DomainSpec {
    DomainKind kind = DomainKind::kRect;
    double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
    /// Disk radius in r1; annulus radii in r0, r1.
    double r0 = 0, r1 = 0;
    double anchor_x = 0, anchor_y = 0;

    DomainSpec shifted(double dx, double dy) const;
};

/// n x n nodes over the bounding box, masked by the domain recipe.
GridHandle make_domain_grid(const DomainSpec& d, int n);
GridHandle make_domain_grid(const DomainSpec& d, int nx, int ny);

struct Ambient {
    std::string space;
    int codim = 1;
    Signature signature = Signature::kRiemannian;
    /// Equation-family parameters; meaningful for codim 1.
    CmcParams cmc;
};

struct SurfaceExample {
    std::string name;
    std::string description;
    Params defaults;
    std::function<Ambient(const Params&)> ambient;
    std::function<DomainSpec(const Params&)> domain;
    /// Prepares height evaluators (solving any ODE once) for the given parameters.
    std::function<std::vector<HeightFn>(const Params&)> heights;
    std::optional<std::string> expected_twin;
};

/// twin(source) = orientation * target(x + shift_x, y + shift_y) + const.
struct TwinPair {
    std::string source;
    std::string target;
    double orientation = 1;
    double shift_x = 0;
    double shift_y = 0;
    Params params;
    std::string label;
};

const std::vector<SurfaceExample>& list_examples();
const SurfaceExample& find_example(const std::string& name);
/// Pairs used by the regression matrix; each pair may carry its own parameters.
const std::vector<TwinPair>& twin_pairs();
std::vector<TwinPair> pairs_for(const std::string& name);

Params merged_params(const SurfaceExample& ex, const Params& overrides);

std::vector<ScalarField> sample_heights(const SurfaceExample& ex, const Params& params, const GridHandle& grid);

using Evaluated = std::variant<GraphData, MultiGraph>;
Evaluated eval_example(const std::string& name, const Params& params, const GridHandle& grid);

/// Self-residual of an example: cmc_residual for codim 1, the minimal or maximal system
/// otherwise; interior-core report.
ResidualReport example_residual(const std::string& name, const Params& params, int n);

struct PairCheckResult {
    std::string label;
    int n = 0;
    double h = 0;
    double forward_error = 0;
    double forward_error_refined = 0;
    double inverse_error = 0;
    double inverse_error_refined = 0;
    double forward_ratio = 0;
    double inverse_ratio = 0;
    double involution_error = 0;
    double tol = 0;
    double involution_tol = 0;
    bool pass = false;
    double seconds = 0;
};

/// Forward and inverse twins on an n x n grid and on the refined 2n-1 grid (h halved), plus
/// twin-of-twin on the n grid. Ratios are error(n) / error(2n-1).
PairCheckResult check_pair(const TwinPair& pair, int n = 201);

// ---------------------------------------------------------------------------
// Hessian-zero equation
// ---------------------------------------------------------------------------

struct HessianZeroResiduals {
    /// (f_xx f_yy - f_xy^2)/(1 + |grad f|^2)^2
    ScalarField hessian_form;
    /// div of the flux pair ((f_yy f_x - f_xy f_y), (f_xx f_y - f_xy f_x)) / (2 (1 + |grad f|^2))
    ScalarField lam_divergence_form;

    ResidualReport identity_report() const;
};

HessianZeroResiduals hessian_zero_residuals(const ScalarField& f);

/// Potential g with grad g = (-Q, P) for the flux pair (P, Q); throws kNotAGradient when f is
/// not flat.
Potential hessian_zero_potential(const ScalarField& f, const PotentialOptions& opts = {});

// ---------------------------------------------------------------------------
// Charts
// ---------------------------------------------------------------------------

using ChartFn = std::function<Eigen::Vector3d(double, double)>;

/// Conformal chart of the saddle graph f^theta in Nil^3(1/2).
ChartFn nil_saddle_chart(double theta);

/// Conformal chart of the Nil catenoid; the height is lambda rho(lambda cosh w(u)).
ChartFn nil_catenoid_chart(double lambda, double tau, double u_max);

struct ChartMetricReport {
    ResidualReport conformality;
    /// |E - expected| and |G - expected| when an expected factor is supplied.
    ResidualReport factor;
};

/// Samples the chart on an n x n (u, v) grid, differentiates with grid stencils and
/// evaluates the BCV metric of E^3(kappa, tau) on the chart tangents.
ChartMetricReport chart_metric_residual(const ChartFn& chart, const bcv::BcvParams& ambient, const GridSpec& uv,
                                        const std::function<double(double, double)>& expected_factor = {});

// ---------------------------------------------------------------------------
// Mesh export
// ---------------------------------------------------------------------------

/// OBJ text: vertices (x, y, fields[component]) in row-major masked order, two triangles per
/// fully masked cell.
std::string export_mesh(const std::vector<ScalarField>& fields, int component = 0);

} // namespace twinsurf::catalog
