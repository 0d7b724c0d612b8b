#pragma once

#include <optional>
#include <vector>

#include "steklov/mesh.hpp"

namespace steklov {

// Parameter pack driving the cuspidal domain and the glued surface.
// The physical cusp is {(x,y): eps*r <= y <= eps, -y^2/2 <= x <= y^2/2}
// carrying the flat metric scaled by 1/t^2. With alpha-mode active,
// r = exp(-eps^-alpha) holds bitwise.
struct GlueParams {
    double epsilon = 0.1;
    double alpha = 0.45;
    std::optional<double> r_value;  // overrides the alpha rule when set
    double t = 1.0;
    double p0 = 0.0;  // boundary arc-length coordinates on the base (chart units)
    double p1 = 0.0;
    bool flip0 = false;  // orientation flags for the two chart identifications
    bool flip1 = false;
    bool require_orientable = false;  // throw OrientationError on flag combos that lose orientability

    int cusp_layers = 40;
    int min_columns = 6;
    double quality_floor_deg = 5.0;
    bool keep_corners = true;  // corner vertices of the seams are kept as-is

    double r() const;
    double log_one_over_r() const;
    void validate() const;  // throws on out-of-range parameters
};

// Triangulated unit disk. Refinement 0 is the hexagon fan (7 vertices, 6
// triangles); each level splits every triangle in four and lifts boundary
// midpoints to the unit circle, halving edge lengths.
Mesh build_disk_mesh(int refinement);

// Annulus with radii inner < outer, tensor grid of n_radial x n_angular quads
// split into triangles. Boundary tags "outer" and "inner".
Mesh build_annulus_mesh(int n_radial, int n_angular, double inner = 0.5, double outer = 1.0);

// Axis-aligned rectangle [0,w] x [0,h] meshed with a symmetric crisscross
// pattern (four triangles per cell). Boundary tags "bottom","right","top","left".
Mesh build_square_mesh(int nx, int ny, double w = 1.0, double h = 1.0);

// Anisotropic graded mesh of the physical cusp. Nodes come from the uniform
// rectangle grid (s,v) in [-1,1] x [0,1] through x = s y^2/2, y = eps r^v,
// so layers are geometric in y. Boundary tags: bottom (y = eps r), top
// (y = eps), side+ (x = +y^2/2), side- (x = -y^2/2).
Mesh build_cusp_mesh(const GlueParams& params, int layers);
Mesh build_cusp_mesh(const GlueParams& params);  // params.cusp_layers

// Conformal factor of the cusp metric in its physical chart: w = -ln t.
ConformalMetric cusp_metric(const Mesh& cusp, const GlueParams& params);

// Smallest interior angle (radians) of the generating (s,v) grid triangles of
// a cusp mesh; the physical anisotropy is by construction and not penalized.
double cusp_grid_min_angle(const GlueParams& params, int layers, int columns);

// Result of glueing the cusp onto a base surface.
struct GlueResult {
    Mesh mesh;
    ConformalMetric metric;
    TopologySummary topology;

    int cusp_chart = -1;                          // chart id of the cusp triangles
    std::vector<std::vector<int>> cusp_rows;      // vertex ids per grid row, row 0 at y = eps
    std::vector<double> row_y;                    // physical y of each row
    std::vector<int> interval0;                   // base boundary vertices consumed at p0 (ordered)
    std::vector<int> interval1;                   // at p1
    double removed_chart_length0 = 0.0;           // chart length of the p0 attachment interval
    double removed_chart_length1 = 0.0;
    double removed_metric_length0 = 0.0;          // metric length (with e^w) of the same
    double removed_metric_length1 = 0.0;
    double added_side_metric_length = 0.0;        // metric length of the side+- arcs
    GlueParams params;
};

// Glue the cuspidal domain onto `base` along chart intervals of length eps^2
// at p0 and r^2 eps^2 at p1. The returned surface has the cusp bottom/top rows
// identified with base boundary vertices near p1/p0, the piecewise conformal
// factor on the glued strip, and the boundary re-tagged so that the boundary
// of the result is (base boundary minus the attachment intervals) plus the
// side+- arcs.
GlueResult glue(const Mesh& base, const ConformalMetric& metric, const GlueParams& params);

}  // namespace steklov
