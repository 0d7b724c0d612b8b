#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "steklov/geometry.hpp"

namespace steklov {

namespace {

using EdgeKey = std::pair<int, int>;
EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Boundary cycle with a refinement-stable origin (smallest vertex id) and
// cumulative chart arc length.
struct CycleInfo {
    std::vector<int> verts;
    std::vector<double> cum;  // size verts.size()+1, cum.back() = total length
    double total() const { return cum.back(); }
};

std::vector<CycleInfo> canonical_cycles(const Mesh& mesh) {
    auto raw = boundary_cycles(mesh);
    std::vector<CycleInfo> out;
    for (const auto& c : raw) {
        const int n = static_cast<int>(c.vertices.size());
        const int shift = static_cast<int>(std::min_element(c.vertices.begin(), c.vertices.end()) - c.vertices.begin());
        CycleInfo info;
        info.verts.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            info.verts[static_cast<std::size_t>(i)] = c.vertices[static_cast<std::size_t>((shift + i) % n)];
        info.cum.assign(static_cast<std::size_t>(n) + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            const Vec2 a = mesh.vertices[static_cast<std::size_t>(info.verts[static_cast<std::size_t>(i)])];
            const Vec2 b = mesh.vertices[static_cast<std::size_t>(info.verts[static_cast<std::size_t>((i + 1) % n)])];
            info.cum[static_cast<std::size_t>(i) + 1] = info.cum[static_cast<std::size_t>(i)] + (b - a).norm();
        }
        out.push_back(std::move(info));
    }
    std::sort(out.begin(), out.end(),
              [](const CycleInfo& l, const CycleInfo& r) { return l.verts[0] < r.verts[0]; });
    return out;
}

// Conforming edge splitter with Rivara longest-edge propagation.
struct Splitter {
    Mesh& mesh;
    ConformalMetric& metric;
    std::map<EdgeKey, std::vector<int>> inc;

    Splitter(Mesh& m, ConformalMetric& w) : mesh(m), metric(w) { rebuild(); }

    void rebuild() {
        inc.clear();
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
            for (int k = 0; k < 3; ++k)
                inc[edge_key(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)])].push_back(t);
        }
    }

    double length(const EdgeKey& e) const {
        return (mesh.vertices[static_cast<std::size_t>(e.first)] - mesh.vertices[static_cast<std::size_t>(e.second)]).norm();
    }

    EdgeKey longest_edge(int t) const {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        EdgeKey best = edge_key(tri[0], tri[1]);
        double best_len = length(best);
        for (int k = 1; k < 3; ++k) {
            EdgeKey e = edge_key(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)]);
            const double len = length(e);
            if (len > best_len * (1.0 + 1e-12) ||
                (len > best_len * (1.0 - 1e-12) && e < best)) {
                best = e;
                best_len = std::max(best_len, len);
            }
        }
        return best;
    }

    // Split edge (a,b) at its midpoint, splitting the incident triangles.
    int split(const EdgeKey& e) {
        const int a = e.first, b = e.second;
        const Vec2 pm = 0.5 * (mesh.vertices[static_cast<std::size_t>(a)] + mesh.vertices[static_cast<std::size_t>(b)]);
        mesh.vertices.push_back(pm);
        metric.log_factor.push_back(0.5 * (metric[a] + metric[b]));
        const int m = mesh.num_vertices() - 1;

        auto it = inc.find(e);
        if (it == inc.end()) throw Error("split: edge does not exist");
        const std::vector<int> tris = it->second;
        for (int t : tris) {
            auto tri = mesh.triangles[static_cast<std::size_t>(t)];
            auto tri2 = tri;
            for (int k = 0; k < 3; ++k) {
                if (tri[static_cast<std::size_t>(k)] == b) tri[static_cast<std::size_t>(k)] = m;    // keeps a
                if (tri2[static_cast<std::size_t>(k)] == a) tri2[static_cast<std::size_t>(k)] = m;  // keeps b
            }
            mesh.triangles[static_cast<std::size_t>(t)] = tri;
            mesh.triangles.push_back(tri2);
            mesh.tri_chart.push_back(mesh.tri_chart[static_cast<std::size_t>(t)]);
        }
        for (auto& be : mesh.boundary_edges) {
            if (edge_key(be.a, be.b) == e) {
                Mesh::BoundaryEdge second = be;
                second.a = m;  // be keeps direction a->m, second m->b
                if (be.a == a) {
                    be.b = m;
                    second.a = m;
                    second.b = b;
                } else {
                    be.b = m;
                    second.a = m;
                    second.b = a;
                }
                mesh.boundary_edges.push_back(second);
                break;
            }
        }
        rebuild();
        return m;
    }

    // Rivara bisection: refine along the longest-edge propagation path until
    // the target edge can be split conformly, then split it.
    void rivara(EdgeKey target) {
        std::vector<EdgeKey> stack{target};
        int guard = 0;
        while (!stack.empty()) {
            if (++guard > 100000) throw ResolutionMismatch("glue: refinement cascade did not terminate");
            const EdgeKey e = stack.back();
            auto it = inc.find(e);
            if (it == inc.end()) {  // edge already consumed by an earlier split
                stack.pop_back();
                continue;
            }
            bool ready = true;
            for (int t : it->second) {
                const EdgeKey le = longest_edge(t);
                if (le != e) {
                    stack.push_back(le);
                    ready = false;
                }
            }
            if (ready) {
                split(e);
                stack.pop_back();
            }
        }
    }
};

double wrap(double s, double total) {
    s = std::fmod(s, total);
    if (s < 0) s += total;
    return s;
}

// Circular arc distance between coordinates on a cycle of length `total`.
double arc_distance(double a, double b, double total) {
    const double d = std::abs(wrap(a, total) - wrap(b, total));
    return std::min(d, total - d);
}

struct ArcTarget {
    int cycle = -1;
    double center = 0.0;  // local coordinate on the cycle
    double length = 0.0;
};

ArcTarget locate(const std::vector<CycleInfo>& cycles, double global_s, double length) {
    double s = global_s;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        if (s < cycles[c].total() || c + 1 == cycles.size())
            return ArcTarget{static_cast<int>(c), wrap(s, cycles[c].total()), length};
        s -= cycles[c].total();
    }
    throw ResolutionMismatch("glue: attachment coordinate outside the boundary");
}

}  // namespace

GlueResult glue(const Mesh& base, const ConformalMetric& base_metric, const GlueParams& params) {
    params.validate();
    if (base.find_chart("cusp") >= 0)
        throw Error("glue: base mesh already carries a cusp chart");
    if (static_cast<int>(base_metric.log_factor.size()) != base.num_vertices())
        throw Error("glue: metric size mismatch");

    const double eps = params.epsilon;
    const double r = params.r();
    const double len0 = eps * eps;
    const double len1 = r * r * eps * eps;
    const int layers = params.cusp_layers;

    Mesh mesh = base;
    ConformalMetric metric = base_metric;

    ArcTarget t0, t1;
    {
        auto cycles = canonical_cycles(mesh);
        t0 = locate(cycles, params.p0, len0);
        t1 = locate(cycles, params.p1, len1);
        if (t0.cycle == t1.cycle &&
            arc_distance(t0.center, t1.center, cycles[static_cast<std::size_t>(t0.cycle)].total()) <
                0.5 * (len0 + len1) + 1e-15)
            throw ResolutionMismatch("glue: attachment intervals overlap");
        for (const ArcTarget& at : {t0, t1})
            if (at.length >= cycles[static_cast<std::size_t>(at.cycle)].total())
                throw ResolutionMismatch("glue: attachment interval longer than its boundary component");
    }

    // Refine boundary edges meeting each interval until they are shorter than
    // a quarter of the interval, so the snapped interval keeps >= 2 segments.
    Splitter splitter(mesh, metric);
    for (const ArcTarget& at : {t0, t1}) {
        for (;;) {
            auto cycles = canonical_cycles(mesh);
            const CycleInfo& cyc = cycles[static_cast<std::size_t>(at.cycle)];
            const double total = cyc.total();
            const double lo = wrap(at.center - at.length / 2, total);
            const double hi = lo + at.length;
            EdgeKey worst{-1, -1};
            double worst_len = at.length / 4.0;
            const int n = static_cast<int>(cyc.verts.size());
            for (int i = 0; i < n; ++i) {
                const double e_lo = cyc.cum[static_cast<std::size_t>(i)];
                const double e_hi = cyc.cum[static_cast<std::size_t>(i) + 1];
                bool overlaps = false;
                for (int shift = -1; shift <= 1; ++shift) {
                    const double a = e_lo + shift * total, b = e_hi + shift * total;
                    if (b > lo && a < hi) overlaps = true;
                }
                if (!overlaps) continue;
                const double len = e_hi - e_lo;
                if (len > worst_len) {
                    worst_len = len;
                    worst = edge_key(cyc.verts[static_cast<std::size_t>(i)],
                                     cyc.verts[static_cast<std::size_t>((i + 1) % n)]);
                }
            }
            if (worst.first < 0) break;
            splitter.rivara(worst);
        }
    }

    // Snap interval endpoints to the nearest boundary vertices.
    struct Interval {
        std::vector<int> verts;  // ordered along the cycle
    };
    std::array<Interval, 2> intervals;
    {
        auto cycles = canonical_cycles(mesh);
        const std::array<ArcTarget, 2> targets{t0, t1};
        for (int which = 0; which < 2; ++which) {
            const ArcTarget& at = targets[static_cast<std::size_t>(which)];
            const CycleInfo& cyc = cycles[static_cast<std::size_t>(at.cycle)];
            const double total = cyc.total();
            const int n = static_cast<int>(cyc.verts.size());
            auto nearest = [&](double s) {
                int best = 0;
                double best_d = arc_distance(cyc.cum[0], s, total);
                for (int i = 1; i < n; ++i) {
                    const double d = arc_distance(cyc.cum[static_cast<std::size_t>(i)], s, total);
                    if (d < best_d) {
                        best_d = d;
                        best = i;
                    }
                }
                return best;
            };
            const int i_lo = nearest(at.center - at.length / 2);
            const int i_hi = nearest(at.center + at.length / 2);
            if (i_lo == i_hi)
                throw ResolutionMismatch("glue: attachment interval contains fewer than 2 boundary vertices");
            for (int i = i_lo;; i = (i + 1) % n) {
                intervals[static_cast<std::size_t>(which)].verts.push_back(cyc.verts[static_cast<std::size_t>(i)]);
                if (i == i_hi) break;
            }
        }
    }
    {
        std::set<int> seen(intervals[0].verts.begin(), intervals[0].verts.end());
        for (int v : intervals[1].verts)
            if (seen.count(v)) throw ResolutionMismatch("glue: attachment intervals overlap after snapping");
    }

    // Balance both intervals to the same number of segments M.
    const int grid_cols = std::max({params.min_columns, (layers + 4) / 5,
                                    static_cast<int>(intervals[0].verts.size()) - 1,
                                    static_cast<int>(intervals[1].verts.size()) - 1});
    for (auto& iv : intervals) {
        while (static_cast<int>(iv.verts.size()) - 1 < grid_cols) {
            int pos = 0;
            double best = -1.0;
            for (std::size_t i = 0; i + 1 < iv.verts.size(); ++i) {
                const double len = splitter.length(edge_key(iv.verts[i], iv.verts[i + 1]));
                if (len > best) {
                    best = len;
                    pos = static_cast<int>(i);
                }
            }
            const int m = splitter.split(edge_key(iv.verts[static_cast<std::size_t>(pos)],
                                                  iv.verts[static_cast<std::size_t>(pos) + 1]));
            iv.verts.insert(iv.verts.begin() + pos + 1, m);
        }
    }
    const int M = grid_cols;

    // Interval bookkeeping (chart/metric lengths of the removed arcs).
    GlueResult out;
    out.params = params;
    std::array<std::vector<double>, 2> fracs;
    for (int which = 0; which < 2; ++which) {
        const auto& iv = intervals[static_cast<std::size_t>(which)].verts;
        std::vector<double> cum{0.0};
        double metric_len = 0.0;
        for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
            const double len = (mesh.vertices[static_cast<std::size_t>(iv[i + 1])] -
                                mesh.vertices[static_cast<std::size_t>(iv[i])]).norm();
            cum.push_back(cum.back() + len);
            metric_len += len * 0.5 * (std::exp(metric[iv[i]]) + std::exp(metric[iv[i + 1]]));
        }
        const double total = cum.back();
        for (auto& c : cum) c /= total;
        fracs[static_cast<std::size_t>(which)] = std::move(cum);
        if (which == 0) {
            out.removed_chart_length0 = total;
            out.removed_metric_length0 = metric_len;
        } else {
            out.removed_chart_length1 = total;
            out.removed_metric_length1 = metric_len;
        }
    }

    // s-partitions of the cusp grid rows. Node i of the top row is identified
    // with interval0 vertex i (or M-i when flipped); the bottom row runs
    // against the cycle direction so that both seams reverse the induced
    // boundary orientation and the unflipped glueing stays orientable.
    std::vector<double> s_top(static_cast<std::size_t>(M) + 1), s_bot(static_cast<std::size_t>(M) + 1);
    std::vector<int> id_top(static_cast<std::size_t>(M) + 1), id_bot(static_cast<std::size_t>(M) + 1);
    for (int i = 0; i <= M; ++i) {
        if (!params.flip0) {
            id_top[static_cast<std::size_t>(i)] = intervals[0].verts[static_cast<std::size_t>(i)];
            s_top[static_cast<std::size_t>(i)] = -1.0 + 2.0 * fracs[0][static_cast<std::size_t>(i)];
        } else {
            id_top[static_cast<std::size_t>(i)] = intervals[0].verts[static_cast<std::size_t>(M - i)];
            s_top[static_cast<std::size_t>(i)] = -1.0 + 2.0 * (1.0 - fracs[0][static_cast<std::size_t>(M - i)]);
        }
        if (!params.flip1) {
            id_bot[static_cast<std::size_t>(i)] = intervals[1].verts[static_cast<std::size_t>(M - i)];
            s_bot[static_cast<std::size_t>(i)] = -1.0 + 2.0 * (1.0 - fracs[1][static_cast<std::size_t>(M - i)]);
        } else {
            id_bot[static_cast<std::size_t>(i)] = intervals[1].verts[static_cast<std::size_t>(i)];
            s_bot[static_cast<std::size_t>(i)] = -1.0 + 2.0 * fracs[1][static_cast<std::size_t>(i)];
        }
    }

    // Cusp grid. Row 0 sits at y = eps (glued at p0), row `layers` at y = eps r.
    const int cusp_chart = mesh.chart_id("cusp");
    const double log_t = std::log(params.t);
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(layers) + 1,
                                       std::vector<int>(static_cast<std::size_t>(M) + 1, -1));
    std::vector<double> row_y(static_cast<std::size_t>(layers) + 1);
    for (int j = 0; j <= layers; ++j) {
        const double v = static_cast<double>(j) / layers;
        const double y = eps * std::pow(r, v);
        row_y[static_cast<std::size_t>(j)] = y;
        for (int i = 0; i <= M; ++i) {
            const double s = (1.0 - v) * s_top[static_cast<std::size_t>(i)] + v * s_bot[static_cast<std::size_t>(i)];
            const Vec2 pos(s * y * y / 2.0, y);
            if (j == 0) {
                rows[0][static_cast<std::size_t>(i)] = id_top[static_cast<std::size_t>(i)];
                mesh.set_override(id_top[static_cast<std::size_t>(i)], cusp_chart, pos);
            } else if (j == layers) {
                rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = id_bot[static_cast<std::size_t>(i)];
                mesh.set_override(id_bot[static_cast<std::size_t>(i)], cusp_chart, pos);
            } else {
                mesh.vertices.push_back(pos);
                metric.log_factor.push_back(-log_t);
                rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = mesh.num_vertices() - 1;
            }
        }
    }
    for (int j = 0; j < layers; ++j)
        for (int i = 0; i < M; ++i) {
            const int a = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            const int b = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i + 1)];
            const int c = rows[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(i)];
            const int d = rows[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(i + 1)];
            mesh.triangles.push_back({a, c, d});
            mesh.triangles.push_back({a, d, b});
            mesh.tri_chart.push_back(cusp_chart);
            mesh.tri_chart.push_back(cusp_chart);
        }

    mesh.rebuild_boundary();
    const int tag_sp = mesh.segment_id("side+");
    const int tag_sm = mesh.segment_id("side-");
    {
        std::map<EdgeKey, int> side_tag;
        for (int j = 0; j < layers; ++j) {
            side_tag[edge_key(rows[static_cast<std::size_t>(j)][0], rows[static_cast<std::size_t>(j + 1)][0])] = tag_sm;
            side_tag[edge_key(rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(M)],
                              rows[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(M)])] = tag_sp;
        }
        for (auto& be : mesh.boundary_edges) {
            auto it = side_tag.find(edge_key(be.a, be.b));
            if (it != side_tag.end()) be.tag = it->second;
        }
    }

    out.mesh = std::move(mesh);
    out.metric = std::move(metric);
    out.cusp_chart = cusp_chart;
    out.cusp_rows = std::move(rows);
    out.row_y = std::move(row_y);
    out.interval0 = intervals[0].verts;
    out.interval1 = intervals[1].verts;

    if (params.require_orientable && (params.flip0 != params.flip1))
        throw OrientationError("glue: orientation flags give a non-orientable surface");

    out.mesh.check_valid();
    out.topology = topology_invariants(out.mesh);
    if (params.require_orientable && !out.topology.orientable)
        throw OrientationError("glue: requested orientable surface but result is non-orientable");

    double side_len = 0.0;
    const std::vector<double> factors = boundary_edge_metric_factors(out.mesh, out.metric);
    for (std::size_t e = 0; e < out.mesh.boundary_edges.size(); ++e) {
        const auto& be = out.mesh.boundary_edges[e];
        if (be.tag != tag_sp && be.tag != tag_sm) continue;
        side_len += boundary_edge_chart_length(out.mesh, static_cast<int>(e)) * factors[e];
    }
    out.added_side_metric_length = side_len;
    return out;
}

}  // namespace steklov
