#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "steklov/errors.hpp"

namespace steklov {

using Vec2 = Eigen::Vector2d;

// Triangulated surface with boundary. Vertices live in 2D chart coordinates;
// each triangle is tagged with the chart its coordinates belong to. Glued
// surfaces are multi-chart: a vertex shared between charts stores its primary
// coordinates and carries per-chart overrides for the other charts.
struct Mesh {
    struct BoundaryEdge {
        int a = -1;
        int b = -1;
        int tag = 0;  // index into segment_tags
    };

    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise in their chart
    std::vector<int> tri_chart;                 // index into chart_tags, per triangle
    std::vector<std::string> chart_tags;
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<std::string> segment_tags;

    // Per-chart coordinate overrides for seam vertices (vertex id, chart id -> position).
    std::unordered_map<std::int64_t, Vec2> chart_overrides;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    int chart_id(const std::string& tag);           // interns the tag
    int find_chart(const std::string& tag) const;   // -1 when absent
    int segment_id(const std::string& tag);
    int find_segment(const std::string& tag) const;

    void set_override(int vertex, int chart, const Vec2& pos);

    // Coordinates of vertex v as seen from chart `chart`.
    Vec2 position_in_chart(int vertex, int chart) const;

    // Coordinates of corner k of triangle t, in that triangle's chart.
    Vec2 corner(int t, int k) const { return position_in_chart(triangles[t][k], tri_chart[t]); }

    // Signed area of triangle t in its chart.
    double signed_area(int t) const;

    // Chart area of the whole mesh (sum of per-triangle chart areas).
    double chart_area() const;

    // Recompute boundary_edges from edges incident to exactly one triangle,
    // keeping tags of surviving edges and applying `default_tag` to new ones.
    // Throws NonManifold if an edge borders more than two triangles.
    void rebuild_boundary(const std::string& default_tag = "boundary");

    // Structural validation: positive areas, boundary consistency, connectivity.
    void check_valid() const;
};

// Per-vertex log conformal factor. Area element e^{2w} dx dy, boundary
// element e^{w} dl in the chart the point is seen from.
struct ConformalMetric {
    std::vector<double> log_factor;

    static ConformalMetric constant(int num_vertices, double w = 0.0) {
        ConformalMetric m;
        m.log_factor.assign(static_cast<std::size_t>(num_vertices), w);
        return m;
    }
    double operator[](int v) const { return log_factor[static_cast<std::size_t>(v)]; }
    double& operator[](int v) { return log_factor[static_cast<std::size_t>(v)]; }
    void check_finite() const;
};

struct TopologySummary {
    int genus = 0;                 // non-orientable genus (cross-caps) when orientable == false
    int boundary_components = 0;
    bool orientable = true;

    bool operator==(const TopologySummary&) const = default;
};

// Boundary cycles as ordered vertex loops; each loop lists the boundary-edge
// indices it traverses. Throws NonManifold on inconsistent boundary data.
struct BoundaryCycle {
    std::vector<int> vertices;  // in traversal order, vertices.size() == edges.size()
    std::vector<int> edges;     // boundary_edges indices, edge[i] = (vertices[i], vertices[i+1])
};
std::vector<BoundaryCycle> boundary_cycles(const Mesh& mesh);

// Genus, boundary component count and orientability of the simplicial complex.
TopologySummary topology_invariants(const Mesh& mesh);

// Euler characteristic V - E + F.
int euler_characteristic(const Mesh& mesh);

// Metric length of the full boundary (sum over boundary edges of e^w dl).
double boundary_length(const Mesh& mesh, const ConformalMetric& metric);

// Chart length of one boundary edge (exact parabolic arc on cusp side edges).
double boundary_edge_chart_length(const Mesh& mesh, int edge_index);

// Per-edge conformal factor e^w. The glued metric is piecewise across the
// seams: cusp side edges take the thin-part branch, so a seam corner vertex
// never leaks the thick-part factor into the side arcs (and vice versa).
std::vector<double> boundary_edge_metric_factors(const Mesh& mesh, const ConformalMetric& metric);

// Directional derivative of the factors in a per-vertex log-density direction.
std::vector<double> boundary_edge_metric_factor_derivatives(const Mesh& mesh,
                                                            const ConformalMetric& metric,
                                                            const std::vector<double>& delta_omega);

// MESH2D v1 text format. Sections: V (vertices), T (triangles + chart tag),
// B (boundary edges + segment tag), optional S (per-chart seam overrides).
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

}  // namespace steklov
