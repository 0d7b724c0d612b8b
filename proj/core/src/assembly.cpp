#include "steklov/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace steklov {

SparseSym assemble_stiffness(const Mesh& mesh, const ConformalMetric& metric) {
    (void)metric;  // conformal invariance of the 2D Dirichlet form
    const int n = mesh.num_vertices();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Vec2 p[3] = {mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2)};
        const double area = 0.5 * ((p[1] - p[0]).x() * (p[2] - p[0]).y() -
                                   (p[2] - p[0]).x() * (p[1] - p[0]).y());
        if (!(area > 0.0) || area < 1e-300)
            throw DegenerateTriangle("stiffness: triangle " + std::to_string(t) + " area underflow");

        // Off-diagonal entries are -cot(opposite angle)/2; the diagonal is
        // minus the row sum so constants are in the kernel exactly.
        double offdiag[3];  // offdiag[k] couples vertices (k+1, k+2)
        for (int k = 0; k < 3; ++k) {
            const Vec2 u = p[(k + 1) % 3] - p[k];
            const Vec2 v = p[(k + 2) % 3] - p[k];
            const double cross = u.x() * v.y() - u.y() * v.x();
            offdiag[k] = -0.5 * u.dot(v) / cross;
        }
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[static_cast<std::size_t>((k + 1) % 3)];
            const int b = tri[static_cast<std::size_t>((k + 2) % 3)];
            trip.emplace_back(a, b, offdiag[k]);
            trip.emplace_back(b, a, offdiag[k]);
            trip.emplace_back(a, a, -offdiag[k]);
            trip.emplace_back(b, b, -offdiag[k]);
        }
    }
    SparseSym A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

SparseSym assemble_boundary_mass(const Mesh& mesh, const ConformalMetric& metric, MassScheme scheme) {
    const int n = mesh.num_vertices();
    const std::vector<double> factors = boundary_edge_metric_factors(mesh, metric);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& be = mesh.boundary_edges[e];
        const double len = boundary_edge_chart_length(mesh, static_cast<int>(e));
        const double w = len * factors[e];
        if (scheme == MassScheme::Consistent) {
            trip.emplace_back(be.a, be.a, w / 3.0);
            trip.emplace_back(be.b, be.b, w / 3.0);
            trip.emplace_back(be.a, be.b, w / 6.0);
            trip.emplace_back(be.b, be.a, w / 6.0);
        } else {
            trip.emplace_back(be.a, be.a, w / 2.0);
            trip.emplace_back(be.b, be.b, w / 2.0);
        }
    }
    SparseSym B(n, n);
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

std::vector<int> boundary_vertex_list(const Mesh& mesh) {
    std::set<int> s;
    for (const auto& be : mesh.boundary_edges) {
        s.insert(be.a);
        s.insert(be.b);
    }
    return std::vector<int>(s.begin(), s.end());
}

}  // namespace steklov
