#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "steklov/geometry.hpp"

namespace steklov {

// Tensor grid over the reference rectangle of the thin part: rows sample
// v in [0,1] uniformly, columns sample xi in [-1,1] so that x = xi r^{2v}/2
// spans the domain width at each height (paper coordinates, y = r^v).
struct ThetaGrid {
    int rows = 32;
    int cols = 8;
    double v(int j) const { return static_cast<double>(j) / rows; }
    double xi(int i) const { return -1.0 + 2.0 * static_cast<double>(i) / cols; }
};

// field[j][i]: value at node (v_j, xi_i); j = 0..rows, i = 0..cols.
using GridField = std::vector<std::vector<double>>;

// Change of variables between phi on the paper-coordinate domain (y in [r,1])
// and theta on the rectangle:
//   phi(x,y) = sqrt(t) y^{-1/2} / (sqrt(eps) sqrt(ln(1/r))) theta(x, ln y/ln r).
// Pointwise and exactly invertible on the grid.
GridField theta_of_phi(const GridField& phi, const ThetaGrid& grid, const GlueParams& params);
GridField phi_of_theta(const GridField& theta, const ThetaGrid& grid, const GlueParams& params);

struct EnergyIdentityResiduals {
    double square = 0.0;    // boundary square identity, summed over both sides
    double mean = 0.0;      // boundary mean identity
    double gradient = 0.0;  // gradient/energy identity
};

// Residuals |LHS - RHS| of the three identities, from point samples: both
// sides are quadratures at the grid's order (halving h quarters them).
EnergyIdentityResiduals energy_identity_residuals(const GridField& theta, const ThetaGrid& grid,
                                                  const GlueParams& params);

// Same identities from callables with composite Gauss quadrature; smooth
// fields come out near machine precision.
EnergyIdentityResiduals energy_identity_residuals(const std::function<double(double, double)>& theta,
                                                  const std::function<double(double, double)>& theta_x,
                                                  const std::function<double(double, double)>& theta_v,
                                                  const GlueParams& params, int panels = 64);

// First-eigenvalue upper bound: min of the thick branch sigma_star and the
// cusp branch t/8 + t pi^2/(2 ln(r)^2). Error scales are reported, never added.
struct UpperBoundFirst {
    double branch_star = 0.0;
    double branch_cusp = 0.0;
    double bound = 0.0;
    double err_scale_star = 0.0;  // eps/ln(1/r)^2 + eps^2
    double err_scale_cusp = 0.0;  // eps/ln(1/r)^3 + eps^2
    double err_scale = 0.0;       // scale of the selected branch
};
UpperBoundFirst upper_bound_first(const GlueParams& params, double sigma_star);

// (K+1)-st eigenvalue bound: max of the two branches, with error scale
// eps/ln(1/r) + sqrt(eps)/ln(1/r)^{3/2} + eps^2.
struct UpperBoundKplus1 {
    double value = 0.0;
    double err_scale = 0.0;
};
UpperBoundKplus1 upper_bound_Kplus1(const GlueParams& params, double sigma_star);

// Inputs of the eigenvalue/profile expansions: c0 = sqrt(thin mass),
// c1 = theta_bar(0); d0, d1 the same for the second selected mode.
struct ExpansionInput {
    GlueParams params;
    double c0 = 1.0;
    double c1 = 0.0;
    std::optional<double> d0;
    std::optional<double> d1;
};

struct ExpansionSigma {
    double value = 0.0;      // sigma, main terms only
    double err_scale = 0.0;  // eps^{(3+alpha)/2} log(1/eps)^3 / c0^3 + eps^{1+alpha}
};
ExpansionSigma expansion_sigma(const ExpansionInput& input);

struct ExpansionTheta {
    std::vector<double> theta_bar;
    std::vector<double> theta_bar_v;
};
// c0 (f + (c1/c0) f1 + (c1/c0)^2 f2) and its derivative on the grid.
ExpansionTheta expansion_theta(const std::vector<double>& v_grid, const ExpansionInput& input);

}  // namespace steklov
