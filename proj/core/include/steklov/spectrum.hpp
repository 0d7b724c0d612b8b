#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "steklov/assembly.hpp"

namespace steklov {

struct SpectrumOptions {
    double cluster_rtol = 1e-6;  // relative gap grouping eigenvalues into clusters
    MassScheme mass = MassScheme::Consistent;
    enum class Route {
        SchurBoundary,  // eliminate interior vertices, dense solve on the boundary
        FullPencil      // full-size pencil with semidefinite right-hand side
    } route = Route::SchurBoundary;
};

struct SteklovSpectrum {
    std::vector<double> eigenvalues;  // ascending, sigma_0 ~ 0 first
    Eigen::MatrixXd eigenfunctions;   // num_vertices x n, boundary-L2-normalized
    std::vector<std::pair<int, int>> clusters;  // half-open index ranges
    double boundary_length = 0.0;
    std::vector<double> boundary_norm_residuals;  // |u^T B u - 1|
    std::vector<double> pencil_residuals;         // ||A u - sigma B u|| / ||u||

    int size() const { return static_cast<int>(eigenvalues.size()); }
    std::pair<int, int> cluster_range(int k) const;
    int multiplicity(int k) const;
    double sigma(int k) const { return eigenvalues[static_cast<std::size_t>(k)]; }
};

// Interior elimination of the stiffness matrix: S is the Schur complement
// onto boundary vertices (the discrete Dirichlet-to-Neumann matrix), and
// `extension` reconstructs interior values of harmonic extensions.
struct BoundaryReduction {
    std::vector<int> boundary;   // vertex ids, ascending
    std::vector<int> interior;   // vertex ids, ascending
    Eigen::MatrixXd S;           // nb x nb, symmetric PSD, kernel = constants
    Eigen::MatrixXd extension;   // ni x nb, u_I = extension * u_B
};

BoundaryReduction reduce_to_boundary(const Mesh& mesh, const ConformalMetric& metric);

// Lowest count+1 eigenpairs of (stiffness) u = sigma (boundary mass) u.
SteklovSpectrum steklov_spectrum(const Mesh& mesh, const ConformalMetric& metric, int count,
                                 const SpectrumOptions& opts = {});

// Same problem on a precomputed reduction with a caller-supplied boundary
// mass; cheap to call repeatedly while the mesh geometry is fixed.
SteklovSpectrum spectrum_from_reduction(const BoundaryReduction& red, const SparseSym& boundary_mass,
                                        const SparseSym& stiffness, int count,
                                        const SpectrumOptions& opts = {});

struct DtnMatrix {
    Eigen::MatrixXd S;           // boundary x boundary
    std::vector<int> boundary;   // vertex ids
};

// Schur complement of the stiffness matrix onto boundary vertices.
DtnMatrix dtn_matrix(const Mesh& mesh, const ConformalMetric& metric);

// Scale-invariant product sigma_1 * L of the first nonzero eigenvalue and the
// metric boundary length.
double sigma1_L(const Mesh& mesh, const ConformalMetric& metric);

}  // namespace steklov
