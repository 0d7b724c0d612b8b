#include "steklov/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <queue>
#include <sstream>

namespace steklov {

namespace {

std::int64_t override_key(int vertex, int chart) {
    return (static_cast<std::int64_t>(vertex) << 16) | static_cast<std::int64_t>(chart);
}

int intern(std::vector<std::string>& table, const std::string& tag) {
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i] == tag) return static_cast<int>(i);
    table.push_back(tag);
    return static_cast<int>(table.size() - 1);
}

int lookup(const std::vector<std::string>& table, const std::string& tag) {
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i] == tag) return static_cast<int>(i);
    return -1;
}

using EdgeKey = std::pair<int, int>;
EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Map undirected edge -> incident triangle indices. Throws on >2 incidences.
std::map<EdgeKey, std::vector<int>> edge_incidence(const Mesh& mesh) {
    std::map<EdgeKey, std::vector<int>> inc;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            auto key = edge_key(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)]);
            auto& v = inc[key];
            v.push_back(t);
            if (v.size() > 2)
                throw NonManifold("edge (" + std::to_string(key.first) + "," +
                                  std::to_string(key.second) + ") borders more than two triangles");
        }
    }
    return inc;
}

}  // namespace

int Mesh::chart_id(const std::string& tag) { return intern(chart_tags, tag); }
int Mesh::find_chart(const std::string& tag) const { return lookup(chart_tags, tag); }
int Mesh::segment_id(const std::string& tag) { return intern(segment_tags, tag); }
int Mesh::find_segment(const std::string& tag) const { return lookup(segment_tags, tag); }

void Mesh::set_override(int vertex, int chart, const Vec2& pos) {
    chart_overrides[override_key(vertex, chart)] = pos;
}

Vec2 Mesh::position_in_chart(int vertex, int chart) const {
    if (!chart_overrides.empty()) {
        auto it = chart_overrides.find(override_key(vertex, chart));
        if (it != chart_overrides.end()) return it->second;
    }
    return vertices[static_cast<std::size_t>(vertex)];
}

double Mesh::signed_area(int t) const {
    const Vec2 a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double Mesh::chart_area() const {
    double area = 0.0;
    for (int t = 0; t < num_triangles(); ++t) area += signed_area(t);
    return area;
}

void Mesh::rebuild_boundary(const std::string& default_tag) {
    auto inc = edge_incidence(*this);

    std::map<EdgeKey, int> old_tags;
    for (const auto& be : boundary_edges) old_tags[edge_key(be.a, be.b)] = be.tag;

    std::vector<BoundaryEdge> fresh;
    int fallback = -1;
    for (int t = 0; t < num_triangles(); ++t) {
        const auto& tri = triangles[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            int a = tri[static_cast<std::size_t>(k)];
            int b = tri[static_cast<std::size_t>((k + 1) % 3)];
            if (inc[edge_key(a, b)].size() != 1) continue;
            BoundaryEdge be;
            be.a = a;  // oriented as traversed by its unique triangle
            be.b = b;
            auto it = old_tags.find(edge_key(a, b));
            if (it != old_tags.end()) {
                be.tag = it->second;
            } else {
                if (fallback < 0) fallback = segment_id(default_tag);
                be.tag = fallback;
            }
            fresh.push_back(be);
        }
    }
    boundary_edges = std::move(fresh);
}

void Mesh::check_valid() const {
    if (triangles.size() != tri_chart.size())
        throw Error("mesh: tri_chart size mismatch");
    for (int t = 0; t < num_triangles(); ++t) {
        for (int k = 0; k < 3; ++k) {
            int v = triangles[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
            if (v < 0 || v >= num_vertices()) throw Error("mesh: triangle vertex out of range");
        }
        if (signed_area(t) <= 0.0)
            throw DegenerateGeometry("mesh: triangle " + std::to_string(t) +
                                     " has non-positive area in its chart");
    }

    auto inc = edge_incidence(*this);
    std::map<EdgeKey, int> listed;
    for (const auto& be : boundary_edges) listed[edge_key(be.a, be.b)]++;
    for (const auto& [key, count] : listed)
        if (count != 1) throw Error("mesh: duplicated boundary edge");
    for (const auto& [key, tris] : inc) {
        bool is_boundary = tris.size() == 1;
        bool is_listed = listed.count(key) > 0;
        if (is_boundary != is_listed)
            throw Error("mesh: boundary_edges disagree with edge incidence at (" +
                        std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    }

    // Edge-adjacency connectivity of triangles.
    if (num_triangles() > 0) {
        std::vector<char> seen(static_cast<std::size_t>(num_triangles()), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            int t = q.front();
            q.pop();
            const auto& tri = triangles[static_cast<std::size_t>(t)];
            for (int k = 0; k < 3; ++k) {
                auto key = edge_key(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)]);
                for (int s : inc[key]) {
                    if (!seen[static_cast<std::size_t>(s)]) {
                        seen[static_cast<std::size_t>(s)] = 1;
                        ++reached;
                        q.push(s);
                    }
                }
            }
        }
        if (reached != num_triangles()) throw Error("mesh: triangle adjacency graph is disconnected");
    }
}

void ConformalMetric::check_finite() const {
    for (double w : log_factor)
        if (!std::isfinite(w)) throw Error("conformal metric: non-finite log factor");
}

std::vector<BoundaryCycle> boundary_cycles(const Mesh& mesh) {
    // Each boundary vertex must meet exactly two boundary edges.
    std::map<int, std::vector<int>> at_vertex;  // vertex -> incident boundary edge indices
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        at_vertex[mesh.boundary_edges[e].a].push_back(static_cast<int>(e));
        at_vertex[mesh.boundary_edges[e].b].push_back(static_cast<int>(e));
    }
    for (const auto& [v, edges] : at_vertex)
        if (edges.size() != 2)
            throw NonManifold("boundary vertex " + std::to_string(v) + " meets " +
                              std::to_string(edges.size()) + " boundary edges");

    std::vector<char> used(mesh.boundary_edges.size(), 0);
    std::vector<BoundaryCycle> cycles;
    for (std::size_t e0 = 0; e0 < mesh.boundary_edges.size(); ++e0) {
        if (used[e0]) continue;
        BoundaryCycle cycle;
        int edge = static_cast<int>(e0);
        int v = mesh.boundary_edges[e0].a;  // traverse following the stored direction of e0
        while (!used[static_cast<std::size_t>(edge)]) {
            used[static_cast<std::size_t>(edge)] = 1;
            cycle.vertices.push_back(v);
            cycle.edges.push_back(edge);
            const auto& be = mesh.boundary_edges[static_cast<std::size_t>(edge)];
            int next_v = (be.a == v) ? be.b : be.a;
            const auto& inc = at_vertex[next_v];
            int next_edge = (inc[0] == edge) ? inc[1] : inc[0];
            v = next_v;
            edge = next_edge;
        }
        if (v != mesh.boundary_edges[e0].a)
            throw NonManifold("boundary walk did not close into a cycle");
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

int euler_characteristic(const Mesh& mesh) {
    std::map<EdgeKey, int> edges;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) edges[edge_key(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)])] = 1;
    return mesh.num_vertices() - static_cast<int>(edges.size()) + mesh.num_triangles();
}

TopologySummary topology_invariants(const Mesh& mesh) {
    auto inc = edge_incidence(mesh);

    // Orientability: propagate a flip state over the dual graph; adjacent
    // triangles are compatible when they traverse the shared edge oppositely.
    auto direction_in = [&](int t, const EdgeKey& key) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            int a = tri[static_cast<std::size_t>(k)], b = tri[static_cast<std::size_t>((k + 1) % 3)];
            if (a == key.first && b == key.second) return +1;
            if (a == key.second && b == key.first) return -1;
        }
        throw Error("edge not in triangle");
    };

    bool orientable = true;
    std::vector<int> flip(static_cast<std::size_t>(mesh.num_triangles()), 0);  // 0 unseen, +1/-1 assigned
    for (int seed = 0; seed < mesh.num_triangles() && orientable; ++seed) {
        if (flip[static_cast<std::size_t>(seed)] != 0) continue;
        flip[static_cast<std::size_t>(seed)] = 1;
        std::queue<int> q;
        q.push(seed);
        while (!q.empty() && orientable) {
            int t = q.front();
            q.pop();
            const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
            for (int k = 0; k < 3; ++k) {
                auto key = edge_key(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)]);
                for (int s : inc[key]) {
                    if (s == t) continue;
                    int want = (direction_in(t, key) == direction_in(s, key)) ? -flip[static_cast<std::size_t>(t)]
                                                                              : flip[static_cast<std::size_t>(t)];
                    if (flip[static_cast<std::size_t>(s)] == 0) {
                        flip[static_cast<std::size_t>(s)] = want;
                        q.push(s);
                    } else if (flip[static_cast<std::size_t>(s)] != want) {
                        orientable = false;
                        break;
                    }
                }
            }
        }
    }

    TopologySummary summary;
    summary.orientable = orientable;
    summary.boundary_components = static_cast<int>(boundary_cycles(mesh).size());
    const int chi = euler_characteristic(mesh);
    if (orientable)
        summary.genus = (2 - summary.boundary_components - chi) / 2;
    else
        summary.genus = 2 - summary.boundary_components - chi;
    return summary;
}

namespace {

// Arc length of x = +-y^2/2 between heights a and b.
double parabolic_arc(double a, double b) {
    auto antideriv = [](double y) { return 0.5 * (y * std::sqrt(1.0 + y * y) + std::asinh(y)); };
    return std::abs(antideriv(b) - antideriv(a));
}

bool is_parabolic_side(const Mesh& mesh, int tag) {
    const std::string& name = mesh.segment_tags[static_cast<std::size_t>(tag)];
    return name == "side+" || name == "side-";
}

}  // namespace

double boundary_edge_chart_length(const Mesh& mesh, int edge_index) {
    const auto& be = mesh.boundary_edges[static_cast<std::size_t>(edge_index)];
    if (is_parabolic_side(mesh, be.tag)) {
        // Side edges always live in the cusp chart; seam corners store base
        // coordinates as primary and the cusp position as an override.
        const int cusp = mesh.find_chart("cusp");
        const Vec2 pa = cusp >= 0 ? mesh.position_in_chart(be.a, cusp) : mesh.vertices[static_cast<std::size_t>(be.a)];
        const Vec2 pb = cusp >= 0 ? mesh.position_in_chart(be.b, cusp) : mesh.vertices[static_cast<std::size_t>(be.b)];
        return parabolic_arc(pa.y(), pb.y());
    }
    const Vec2 pa = mesh.vertices[static_cast<std::size_t>(be.a)];
    const Vec2 pb = mesh.vertices[static_cast<std::size_t>(be.b)];
    return (pb - pa).norm();
}

namespace {

// Seam corners meet both a cusp side edge and a thick-part boundary edge;
// the piecewise factor of each branch must not blend across them.
std::vector<char> seam_corner_flags(const Mesh& mesh) {
    std::vector<char> touches_side(static_cast<std::size_t>(mesh.num_vertices()), 0);
    std::vector<char> touches_other(static_cast<std::size_t>(mesh.num_vertices()), 0);
    for (const auto& be : mesh.boundary_edges) {
        auto& flag = is_parabolic_side(mesh, be.tag) ? touches_side : touches_other;
        flag[static_cast<std::size_t>(be.a)] = 1;
        flag[static_cast<std::size_t>(be.b)] = 1;
    }
    std::vector<char> corner(static_cast<std::size_t>(mesh.num_vertices()), 0);
    for (int v = 0; v < mesh.num_vertices(); ++v)
        corner[static_cast<std::size_t>(v)] =
            touches_side[static_cast<std::size_t>(v)] && touches_other[static_cast<std::size_t>(v)];
    return corner;
}

template <typename EndpointTerm>
std::vector<double> edge_factors_impl(const Mesh& mesh, const EndpointTerm& term) {
    const std::vector<char> corner = seam_corner_flags(mesh);
    std::vector<double> factors(mesh.boundary_edges.size());
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& be = mesh.boundary_edges[e];
        if (is_parabolic_side(mesh, be.tag)) {
            const bool ca = corner[static_cast<std::size_t>(be.a)];
            const bool cb = corner[static_cast<std::size_t>(be.b)];
            if (ca && !cb)
                factors[e] = term(be.b);
            else if (cb && !ca)
                factors[e] = term(be.a);
            else
                factors[e] = 0.5 * (term(be.a) + term(be.b));
        } else {
            factors[e] = 0.5 * (term(be.a) + term(be.b));
        }
    }
    return factors;
}

}  // namespace

std::vector<double> boundary_edge_metric_factors(const Mesh& mesh, const ConformalMetric& metric) {
    return edge_factors_impl(mesh, [&](int v) { return std::exp(metric[v]); });
}

std::vector<double> boundary_edge_metric_factor_derivatives(const Mesh& mesh,
                                                            const ConformalMetric& metric,
                                                            const std::vector<double>& delta_omega) {
    return edge_factors_impl(
        mesh, [&](int v) { return delta_omega[static_cast<std::size_t>(v)] * std::exp(metric[v]); });
}

double boundary_length(const Mesh& mesh, const ConformalMetric& metric) {
    const std::vector<double> factors = boundary_edge_metric_factors(mesh, metric);
    double total = 0.0;
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e)
        total += boundary_edge_chart_length(mesh, static_cast<int>(e)) * factors[e];
    return total;
}

namespace {

void write_double(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
}

}  // namespace

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "MESH2D v1\n";
    os << "V " << mesh.num_vertices() << "\n";
    for (const auto& p : mesh.vertices) {
        write_double(os, p.x());
        os << ' ';
        write_double(os, p.y());
        os << '\n';
    }
    os << "T " << mesh.num_triangles() << "\n";
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' '
           << mesh.chart_tags[static_cast<std::size_t>(mesh.tri_chart[static_cast<std::size_t>(t)])] << '\n';
    }
    os << "B " << mesh.boundary_edges.size() << "\n";
    for (const auto& be : mesh.boundary_edges)
        os << be.a << ' ' << be.b << ' ' << mesh.segment_tags[static_cast<std::size_t>(be.tag)] << '\n';
    if (!mesh.chart_overrides.empty()) {
        // Deterministic order: sort by (vertex, chart).
        std::vector<std::pair<std::int64_t, Vec2>> rows(mesh.chart_overrides.begin(), mesh.chart_overrides.end());
        std::sort(rows.begin(), rows.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        os << "S " << rows.size() << "\n";
        for (const auto& [key, pos] : rows) {
            const int vertex = static_cast<int>(key >> 16);
            const int chart = static_cast<int>(key & 0xffff);
            os << vertex << ' ' << mesh.chart_tags[static_cast<std::size_t>(chart)] << ' ';
            write_double(os, pos.x());
            os << ' ';
            write_double(os, pos.y());
            os << '\n';
        }
    }
}

Mesh read_mesh(std::istream& is) {
    std::string magic, version;
    if (!(is >> magic >> version) || magic != "MESH2D" || version != "v1")
        throw Error("mesh file: bad header");
    Mesh mesh;
    std::string section;
    while (is >> section) {
        if (section == "V") {
            int n = 0;
            is >> n;
            mesh.vertices.resize(static_cast<std::size_t>(n));
            for (auto& p : mesh.vertices)
                if (!(is >> p.x() >> p.y())) throw Error("mesh file: truncated V section");
        } else if (section == "T") {
            int m = 0;
            is >> m;
            mesh.triangles.resize(static_cast<std::size_t>(m));
            mesh.tri_chart.resize(static_cast<std::size_t>(m));
            for (int t = 0; t < m; ++t) {
                std::string tag;
                auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
                if (!(is >> tri[0] >> tri[1] >> tri[2] >> tag)) throw Error("mesh file: truncated T section");
                mesh.tri_chart[static_cast<std::size_t>(t)] = mesh.chart_id(tag);
            }
        } else if (section == "B") {
            int p = 0;
            is >> p;
            mesh.boundary_edges.resize(static_cast<std::size_t>(p));
            for (auto& be : mesh.boundary_edges) {
                std::string tag;
                if (!(is >> be.a >> be.b >> tag)) throw Error("mesh file: truncated B section");
                be.tag = mesh.segment_id(tag);
            }
        } else if (section == "S") {
            int q = 0;
            is >> q;
            for (int i = 0; i < q; ++i) {
                int vertex = 0;
                std::string tag;
                Vec2 pos;
                if (!(is >> vertex >> tag >> pos.x() >> pos.y())) throw Error("mesh file: truncated S section");
                mesh.set_override(vertex, mesh.chart_id(tag), pos);
            }
        } else {
            throw Error("mesh file: unknown section '" + section + "'");
        }
    }
    return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_mesh(os, mesh);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path + "'");
    return read_mesh(is);
}

}  // namespace steklov
