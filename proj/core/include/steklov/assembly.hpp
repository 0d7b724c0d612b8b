#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "steklov/mesh.hpp"

namespace steklov {

using SparseSym = Eigen::SparseMatrix<double>;

// Piecewise-linear stiffness matrix of the Dirichlet energy. In two
// dimensions this form is conformally invariant, so the metric factor never
// enters; rows sum to zero exactly (diagonal = -sum of off-diagonals).
SparseSym assemble_stiffness(const Mesh& mesh, const ConformalMetric& metric);

enum class MassScheme { Consistent, Lumped };

// Boundary mass \int u^2 e^w dl, supported on boundary vertices. Cusp side
// edges integrate the exact parabolic arc element.
SparseSym assemble_boundary_mass(const Mesh& mesh, const ConformalMetric& metric,
                                 MassScheme scheme = MassScheme::Consistent);

// Sorted unique vertex ids appearing in boundary edges.
std::vector<int> boundary_vertex_list(const Mesh& mesh);

}  // namespace steklov
