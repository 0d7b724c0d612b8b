#pragma once

#include "steklov/reduced1d.hpp"

namespace steklov {

// Thin-part boundary-mass fraction M of (a) first eigenfunction of the glued
// problem; clusters take the minimizing combination over the eigenspace.
double thin_mass_fraction(const GlueResult& glued, const SteklovSpectrum& spectrum);

struct MassBalanceOptions {
    double tau = 0.0;          // 0 = midpoint of (2 alpha, 1)
    double eta = 0.05;
    bool strict_window = true; // enforce xi in (eps^{1-tau}, 1-eta); the window is
                               // asymptotic and empties out at coarse eps/alpha
    double bracket_lo = 0.0;   // 0 = a third of the finite-truncation balance point
    double bracket_hi = 0.0;   // 0 = three times the balance point
    double tolerance = 1e-3;   // on |M - xi|
    int max_iterations = 80;
    int spectrum_count = 6;
};

struct MassBalanceResult {
    double t = 0.0;
    double mass = 0.0;      // measured M at the returned t
    double mass_lo = 0.0;   // endpoint masses of the bracket
    double mass_hi = 0.0;
    double sigma_star = 0.0;
    double t_star = 0.0;    // 8 sigma_star
    int iterations = 0;
};

// Bisection over the dilation t on the thin-mass fraction of the glued first
// eigenfunction, targeting M = xi. Throws BracketFailure when the endpoint
// masses do not straddle xi.
MassBalanceResult choose_t_for_mass(const Mesh& base, const ConformalMetric& metric,
                                    const GlueParams& params_without_t, double xi,
                                    const MassBalanceOptions& opts = {});

struct CouplingData {
    double mean0 = 0.0;  // chart-interval average of the thick eigenfunction at p0
    double mean1 = 0.0;  // at p1
    double theta0 = 0.0;  // theta_bar(0) implied by the compatibility condition
    double theta1 = 0.0;  // theta_bar(1)
};

struct CoupledOptions {
    bool detached = false;   // force the interface to zero (pure Dirichlet thin model)
    double damping = 0.5;
    int max_iterations = 200;
    double tolerance = 1e-10;  // relative fixed-point tolerance on sigma
    int thin_grid = 1024;
};

struct CoupledResult {
    double sigma = 0.0;            // matched eigenvalue estimate
    ReducedState state;            // thin-part profile of the matched mode
    CouplingData coupling;
    int iterations = 0;
    double sigma_thin_dirichlet = 0.0;  // reduced Dirichlet ground value (diagnostic)
};

// Hybrid solve: thick part condensed to its boundary with a Robin-type
// interface response of the reduced thin model on the two attachment
// intervals, matched through the compatibility mean values. Damped fixed
// point on sigma; throws InterfaceMismatch past the iteration cap.
CoupledResult coupled_solve(const Mesh& base, const ConformalMetric& metric,
                            const GlueParams& params, const CoupledOptions& opts = {});

}  // namespace steklov
