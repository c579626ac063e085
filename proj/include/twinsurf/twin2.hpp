#pragma once

// Two-dimensional minimal graphs in R^{n+2} and their maximal twins in R^{n+2}_n.

#include "twinsurf/bcv.hpp"
#include "twinsurf/numerics.hpp"

#include <Eigen/Core>

#include <vector>

namespace twinsurf {

using bcv::Signature;

constexpr int kMaxCodim = 8;

struct MultiGraph {
    std::vector<ScalarField> f;

    int n() const { return static_cast<int>(f.size()); }
    const Grid2D& grid() const { return f.front().grid(); }
    const GridHandle& grid_ptr() const { return f.front().grid_ptr(); }
};

/// Checks 1 <= n <= max_codim and a shared grid.
void validate(const MultiGraph& mg, int max_codim = kMaxCodim);

struct FirstFundamental {
    ScalarField E;
    ScalarField F;
    ScalarField G;
    ScalarField omega;
    Signature signature = Signature::kRiemannian;
    std::vector<ScalarField> alpha;
    std::vector<ScalarField> beta;
};

FirstFundamental first_fundamental(const MultiGraph& mg, Signature signature);
/// From supplied gradients (f_k,x, f_k,y) instead of stencils.
FirstFundamental first_fundamental(const std::vector<VectorField2>& gradients, Signature signature);

struct AreaAngle {
    /// J[i][j] for i < j; other entries are empty fields.
    std::vector<std::vector<ScalarField>> J;
    ScalarField normJ;
    ScalarField theta;
};

AreaAngle area_angle(const FirstFundamental& ff, double area_tol = 1e-3);
AreaAngle area_angle(const MultiGraph& mg, double area_tol = 1e-3);

/// max |omega^2 - (1 + sum alpha^2 + sum beta^2 + sum J^2)|.
double lagrange_identity_residual(const MultiGraph& mg, const FirstFundamental& ff, const AreaAngle& aa);

struct SystemResidual {
    /// G f_xx - 2F f_xy + E f_yy per component.
    std::vector<ScalarField> nondivergence;
    /// div((G alpha - F beta)/omega, (E beta - F alpha)/omega) per component.
    std::vector<ScalarField> divergence;

    ResidualReport nondivergence_report() const;
    ResidualReport divergence_report() const;
};

SystemResidual minimal_system_residual(const MultiGraph& mg);
SystemResidual minimal_system_residual(const MultiGraph& mg, const FirstFundamental& ff);
SystemResidual maximal_system_residual(const MultiGraph& mg, const FirstFundamental& ff);

/// Residuals of d/dx(G/omega) = d/dy(F/omega) and d/dx(F/omega) = d/dy(E/omega).
ResidualReport mss2_identities_residual(const FirstFundamental& ff);

/// Derivatives of all heights at one node; column k holds (alpha_k, beta_k).
using NodeGradients = Eigen::Matrix<double, 2, Eigen::Dynamic>;

/// Forward twin relation at a node: minimal gradients to maximal gradients.
NodeGradients forward_twin_relation(const NodeGradients& ab);
/// Inverse twin relation at a node: maximal gradients to minimal gradients.
NodeGradients inverse_twin_relation(const NodeGradients& ab);

struct DualityReport {
    ResidualReport jacobian;
    ResidualReport angle;
    ResidualReport conformal;
    ResidualReport step_b1;
    ResidualReport step_a3;
    ResidualReport area_angle;
};

/// Argument order: minimal graph first, maximal graph second.
DualityReport duality_checks(const MultiGraph& minimal, const MultiGraph& maximal);

struct CodimTwinOptions {
    PotentialOptions potential;
    double area_tol = 1e-3;
    double lightlike_tol = 1e-6;
};

struct CodimTwinResult {
    MultiGraph twin;
    /// Integrated fields, one per height; grad of the twin heights up to quadrature error.
    std::vector<VectorField2> gradients;
    Signature signature = Signature::kLorentzian;
    std::vector<ResidualReport> curl;
    ResidualReport dual_system;
    double spacelike_margin = 0;
    double path_discrepancy = 0;
};

/// `source` is the signature of mg: Riemannian input yields the maximal twin and
/// Lorentzian input yields the minimal twin.
CodimTwinResult twin_transform_codim(const MultiGraph& mg, Signature source = Signature::kRiemannian,
                                     const CodimTwinOptions& opts = {});
/// Uses the derivatives held in ff (signature from ff) rather than differentiating mg.
CodimTwinResult twin_transform_codim(const MultiGraph& mg, const FirstFundamental& ff, const CodimTwinOptions& opts = {});

ResidualReport involutivity_check_codim(const MultiGraph& mg, Signature source = Signature::kRiemannian,
                                        const CodimTwinOptions& opts = {});

/// Componentwise negation of all heights.
MultiGraph reflect_heights(const MultiGraph& mg);

} // namespace twinsurf
