#pragma once

#include <cstdint>
#include <vector>

#include "steklov/spectrum.hpp"

namespace steklov {

// Derivative of the discrete boundary mass in a boundary log-density
// direction: exact derivative of the assembled matrix.
SparseSym assemble_boundary_mass_derivative(const Mesh& mesh, const ConformalMetric& metric,
                                            const std::vector<double>& delta_omega,
                                            MassScheme scheme = MassScheme::Consistent);

// One-sided derivatives of sigma_1 (and of sigma_1 L) in the direction
// delta_omega. For a simple first eigenvalue the interval degenerates to the
// scalar -sigma_1 int u_1^2 delta_omega dmu; for a cluster it spans the
// extreme eigenvalues of the perturbation form over the eigenspace.
struct DerivativeInterval {
    double dsigma_lo = 0.0;
    double dsigma_hi = 0.0;
    double dL = 0.0;
    double dsigmaL_lo = 0.0;
    double dsigmaL_hi = 0.0;
};
DerivativeInterval eigenvalue_directional_derivative(const Mesh& mesh, const ConformalMetric& metric,
                                                     const SteklovSpectrum& spectrum,
                                                     const std::vector<double>& delta_omega);

// Rescale the boundary log-density by a constant so the metric boundary
// length is 1; iterated to a fixed point, hence bitwise idempotent.
ConformalMetric project_unit_length(const Mesh& mesh, const ConformalMetric& metric);

struct OptimizeOptions {
    int fourier_modes = 16;  // per boundary cycle; 0 enables the per-vertex mode
    int max_iterations = 400;
    double initial_step = 0.5;
    double backtrack_factor = 0.5;
    int backtrack_budget = 25;
    double armijo_slope = 0.05;
    double gradient_tolerance = 1e-8;  // stop when the derivative interval contains 0 within this
    double ascent_slack = 1e-10;       // minimal accepted improvement (relative)
    int spectrum_count = 6;
};

struct OptimizeHistoryRow {
    int iteration = 0;
    double sigma1L = 0.0;
    int cluster_size = 0;
    double step = 0.0;
};

struct OptimizeResult {
    ConformalMetric density;  // final boundary log-density, projected to L = 1
    double sigma1L = 0.0;
    std::vector<OptimizeHistoryRow> history;
    bool stalled = false;  // no ascent step above tolerance found (convergence signal)
};

// Projected subgradient ascent on sigma_1 L over boundary conformal densities.
OptimizeResult optimize_density(const Mesh& mesh, const ConformalMetric& init,
                                const OptimizeOptions& opts = {});

// Random low-frequency boundary density for optimizer starts (modes 2..modes;
// the k = 1 pair is a neutral reparametrization direction on the disk).
ConformalMetric random_fourier_density(const Mesh& mesh, int modes, double amplitude,
                                       std::uint64_t seed);

struct Immersion {
    int N = 0;                   // sigma_1 cluster size
    double sigma1 = 0.0;
    double scale = 0.0;          // global least-squares scale applied to coordinates
    Eigen::MatrixXd coordinates; // num_vertices x N, scaled
    Eigen::MatrixXd gram;        // (2/L) boundary Gram of the unscaled eigenfunctions
    double sphere_deviation = 0.0;  // max over boundary vertices of | |Phi|^2 - 1 |
};

// Candidate free-boundary immersion from the sigma_1 eigenspace.
Immersion extract_immersion(const Mesh& mesh, const ConformalMetric& metric,
                            const SteklovSpectrum& spectrum);

struct MinimalityReport {
    double harmonic_residual = 0.0;  // max relative pencil residual over coordinates
    double sphere_deviation = 0.0;   // max | |Phi|^2 - 1 | over boundary vertices
    double angle_residual = 0.0;     // max | dtn(Phi) - sigma_1 Phi | (normalized)
};
MinimalityReport minimality_residuals(const Immersion& immersion, const Mesh& mesh,
                                      const ConformalMetric& metric);

}  // namespace steklov
