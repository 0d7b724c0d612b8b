#include "steklov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace steklov {

double GlueParams::r() const {
    if (r_value) return *r_value;
    return std::exp(-std::pow(epsilon, -alpha));
}

double GlueParams::log_one_over_r() const { return -std::log(r()); }

void GlueParams::validate() const {
    if (!(epsilon > 0.0) || epsilon >= 0.5)
        throw DegenerateGeometry("glue params: epsilon must lie in (0, 0.5)");
    if (!(t > 0.0)) throw DegenerateGeometry("glue params: t must be positive");
    const double rv = r();
    if (!(rv > 0.0) || !(rv < 1.0))
        throw DegenerateGeometry("glue params: r must lie in (0,1)");
    if (epsilon * rv <= 0.0)
        throw DegenerateGeometry("glue params: eps*r underflows to zero");
}

namespace {

constexpr double kPi = std::numbers::pi;

struct EdgeMidpointCache {
    std::map<std::pair<int, int>, int> mid;
    int get(Mesh& mesh, int a, int b, bool on_circle) {
        const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        auto it = mid.find(key);
        if (it != mid.end()) return it->second;
        Vec2 p = 0.5 * (mesh.vertices[static_cast<std::size_t>(a)] + mesh.vertices[static_cast<std::size_t>(b)]);
        if (on_circle) p.normalize();
        mesh.vertices.push_back(p);
        int v = mesh.num_vertices() - 1;
        mid[key] = v;
        return v;
    }
};

}  // namespace

Mesh build_disk_mesh(int refinement) {
    if (refinement < 0) throw DegenerateGeometry("disk refinement must be >= 0");

    Mesh mesh;
    const int chart = mesh.chart_id("base");
    const int tag = mesh.segment_id("circle");

    mesh.vertices.emplace_back(0.0, 0.0);
    for (int k = 0; k < 6; ++k) {
        const double a = 2.0 * kPi * k / 6.0;
        mesh.vertices.emplace_back(std::cos(a), std::sin(a));
    }
    for (int k = 0; k < 6; ++k) {
        mesh.triangles.push_back({0, 1 + k, 1 + (k + 1) % 6});
        mesh.tri_chart.push_back(chart);
    }

    for (int level = 0; level < refinement; ++level) {
        // Boundary vertices are exactly those on the unit circle.
        std::vector<char> on_circle(static_cast<std::size_t>(mesh.num_vertices()), 0);
        {
            std::map<std::pair<int, int>, int> count;
            for (const auto& tri : mesh.triangles)
                for (int k = 0; k < 3; ++k)
                    count[std::minmax(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)])]++;
            for (const auto& tri : mesh.triangles)
                for (int k = 0; k < 3; ++k) {
                    int a = tri[static_cast<std::size_t>(k)], b = tri[static_cast<std::size_t>((k + 1) % 3)];
                    if (count[std::minmax(a, b)] == 1) {
                        on_circle[static_cast<std::size_t>(a)] = 1;
                        on_circle[static_cast<std::size_t>(b)] = 1;
                    }
                }
        }
        EdgeMidpointCache cache;
        std::vector<std::array<int, 3>> next;
        next.reserve(mesh.triangles.size() * 4);
        for (const auto& tri : mesh.triangles) {
            int a = tri[0], b = tri[1], c = tri[2];
            int ab = cache.get(mesh, a, b, on_circle[static_cast<std::size_t>(a)] && on_circle[static_cast<std::size_t>(b)]);
            int bc = cache.get(mesh, b, c, on_circle[static_cast<std::size_t>(b)] && on_circle[static_cast<std::size_t>(c)]);
            int ca = cache.get(mesh, c, a, on_circle[static_cast<std::size_t>(c)] && on_circle[static_cast<std::size_t>(a)]);
            next.push_back({a, ab, ca});
            next.push_back({ab, b, bc});
            next.push_back({ca, bc, c});
            next.push_back({ab, bc, ca});
        }
        mesh.triangles = std::move(next);
        mesh.tri_chart.assign(mesh.triangles.size(), chart);
    }

    mesh.rebuild_boundary("circle");
    for (auto& be : mesh.boundary_edges) be.tag = tag;
    return mesh;
}

Mesh build_annulus_mesh(int n_radial, int n_angular, double inner, double outer) {
    if (n_radial < 1 || n_angular < 3) throw DegenerateGeometry("annulus: need n_radial >= 1, n_angular >= 3");
    if (!(0.0 < inner && inner < outer)) throw DegenerateGeometry("annulus: need 0 < inner < outer");

    Mesh mesh;
    const int chart = mesh.chart_id("base");
    auto vid = [&](int i, int j) { return i * n_angular + (j % n_angular); };
    for (int i = 0; i <= n_radial; ++i) {
        const double rho = inner + (outer - inner) * i / n_radial;
        for (int j = 0; j < n_angular; ++j) {
            const double a = 2.0 * kPi * j / n_angular;
            mesh.vertices.emplace_back(rho * std::cos(a), rho * std::sin(a));
        }
    }
    for (int i = 0; i < n_radial; ++i)
        for (int j = 0; j < n_angular; ++j) {
            int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    mesh.tri_chart.assign(mesh.triangles.size(), chart);

    mesh.rebuild_boundary();
    const int touter = mesh.segment_id("outer");
    const int tinner = mesh.segment_id("inner");
    for (auto& be : mesh.boundary_edges) {
        const double rho = mesh.vertices[static_cast<std::size_t>(be.a)].norm();
        be.tag = (rho > 0.5 * (inner + outer)) ? touter : tinner;
    }
    return mesh;
}

Mesh build_square_mesh(int nx, int ny, double w, double h) {
    if (nx < 1 || ny < 1) throw DegenerateGeometry("square: need nx, ny >= 1");
    Mesh mesh;
    const int chart = mesh.chart_id("base");
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.emplace_back(w * i / nx, h * j / ny);
    // Cell centers; crisscross split keeps every mesh symmetry of the rectangle.
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            mesh.vertices.emplace_back(w * (i + 0.5) / nx, h * (j + 0.5) / ny);
            int c = mesh.num_vertices() - 1;
            int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            mesh.triangles.push_back({v00, v10, c});
            mesh.triangles.push_back({v10, v11, c});
            mesh.triangles.push_back({v11, v01, c});
            mesh.triangles.push_back({v01, v00, c});
        }
    mesh.tri_chart.assign(mesh.triangles.size(), chart);

    mesh.rebuild_boundary();
    const int tb = mesh.segment_id("bottom"), tr = mesh.segment_id("right");
    const int tt = mesh.segment_id("top"), tl = mesh.segment_id("left");
    for (auto& be : mesh.boundary_edges) {
        const Vec2 mid = 0.5 * (mesh.vertices[static_cast<std::size_t>(be.a)] + mesh.vertices[static_cast<std::size_t>(be.b)]);
        if (mid.y() < 1e-12 * h)
            be.tag = tb;
        else if (mid.y() > h - 1e-12 * h)
            be.tag = tt;
        else if (mid.x() < 1e-12 * w)
            be.tag = tl;
        else
            be.tag = tr;
    }
    return mesh;
}

namespace {

// Cusp grid nodes for given per-row s partitions. Row j holds y = eps*r^{v_j}.
// Plain builds use the uniform partition for every row.
Mesh build_cusp_from_partitions(const GlueParams& params, int layers,
                                const std::vector<std::vector<double>>& row_s,
                                std::vector<std::vector<int>>* rows_out) {
    params.validate();
    const double eps = params.epsilon;
    const double r = params.r();
    if (eps * r == 0.0) throw DegenerateGeometry("cusp: eps*r underflows to zero in floating point");
    if (layers < 4) throw DegenerateGeometry("cusp: need layers >= 4");

    const int cols = static_cast<int>(row_s.front().size()) - 1;

    Mesh mesh;
    const int chart = mesh.chart_id("cusp");
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(layers + 1));
    for (int j = 0; j <= layers; ++j) {
        const double v = static_cast<double>(j) / layers;
        const double y = eps * std::pow(r, v);
        for (int i = 0; i <= cols; ++i) {
            const double s = row_s[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            mesh.vertices.emplace_back(s * y * y / 2.0, y);
            rows[static_cast<std::size_t>(j)].push_back(mesh.num_vertices() - 1);
        }
    }
    for (int j = 0; j < layers; ++j)
        for (int i = 0; i < cols; ++i) {
            // Row j is above row j+1 (y decreases with j); orient CCW in the chart.
            int a = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            int b = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i + 1)];
            int c = rows[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(i)];
            int d = rows[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(i + 1)];
            mesh.triangles.push_back({a, c, d});
            mesh.triangles.push_back({a, d, b});
        }
    mesh.tri_chart.assign(mesh.triangles.size(), chart);

    mesh.rebuild_boundary();
    const int ttop = mesh.segment_id("top"), tbot = mesh.segment_id("bottom");
    const int tsp = mesh.segment_id("side+"), tsm = mesh.segment_id("side-");
    const double ytop = eps, ybot = eps * r;
    for (auto& be : mesh.boundary_edges) {
        const Vec2 pa = mesh.vertices[static_cast<std::size_t>(be.a)];
        const Vec2 pb = mesh.vertices[static_cast<std::size_t>(be.b)];
        const Vec2 mid = 0.5 * (pa + pb);
        if (pa.y() == ytop && pb.y() == ytop)
            be.tag = ttop;
        else if (pa.y() == ybot && pb.y() == ybot)
            be.tag = tbot;
        else if (mid.x() > 0.0)
            be.tag = tsp;
        else
            be.tag = tsm;
    }
    if (rows_out) *rows_out = std::move(rows);
    return mesh;
}

std::vector<std::vector<double>> uniform_partitions(int layers, int cols) {
    std::vector<double> part(static_cast<std::size_t>(cols + 1));
    for (int i = 0; i <= cols; ++i) part[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / cols;
    return std::vector<std::vector<double>>(static_cast<std::size_t>(layers + 1), part);
}

}  // namespace

Mesh build_cusp_mesh(const GlueParams& params, int layers) {
    const int cols = std::max(params.min_columns, (layers + 4) / 5);
    return build_cusp_from_partitions(params, layers, uniform_partitions(layers, cols), nullptr);
}

Mesh build_cusp_mesh(const GlueParams& params) { return build_cusp_mesh(params, params.cusp_layers); }

ConformalMetric cusp_metric(const Mesh& cusp, const GlueParams& params) {
    return ConformalMetric::constant(cusp.num_vertices(), -std::log(params.t));
}

double cusp_grid_min_angle(const GlueParams& params, int layers, int columns) {
    (void)params;
    // Right triangles with legs (2/columns, 1/layers) in the (s,v) rectangle.
    const double ds = 2.0 / columns;
    const double dv = 1.0 / layers;
    const double a1 = std::atan2(std::min(ds, dv), std::max(ds, dv));
    return a1;
}

}  // namespace steklov
