#include "steklov/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Dense>

#include "steklov/asymptotics.hpp"

namespace steklov {

namespace {

// Metric with the cusp interior vertices re-dilated to parameter t. The glued
// geometry does not depend on t, so one glue serves a whole t-sweep.
ConformalMetric metric_at_t(const GlueResult& glued, double t) {
    ConformalMetric m = glued.metric;
    const double w = -std::log(t);
    const int layers = static_cast<int>(glued.cusp_rows.size()) - 1;
    for (int j = 1; j < layers; ++j)
        for (int v : glued.cusp_rows[static_cast<std::size_t>(j)]) m[v] = w;
    return m;
}

SparseSym thin_boundary_mass(const GlueResult& glued, const ConformalMetric& metric) {
    const Mesh& mesh = glued.mesh;
    const int tag_sp = mesh.find_segment("side+");
    const int tag_sm = mesh.find_segment("side-");
    const std::vector<double> factors = boundary_edge_metric_factors(mesh, metric);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& be = mesh.boundary_edges[e];
        if (be.tag != tag_sp && be.tag != tag_sm) continue;
        const double w = boundary_edge_chart_length(mesh, static_cast<int>(e)) * factors[e];
        trip.emplace_back(be.a, be.a, w / 3.0);
        trip.emplace_back(be.b, be.b, w / 3.0);
        trip.emplace_back(be.a, be.b, w / 6.0);
        trip.emplace_back(be.b, be.a, w / 6.0);
    }
    SparseSym B(mesh.num_vertices(), mesh.num_vertices());
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

// Reduced thin operator at eigen parameter sigma, solved as a two-point BVP:
// -w'' - q(v) w = 0, q = ln(r)^2 [(2s/t - 1/4) + (2s/t)(sqrt(1+eps^2 r^{2v})-1)].
struct ThinSolver {
    const GlueParams& params;
    double sigma;
    int n;

    std::vector<double> solve(double w0, double w1) const {
        const double h = 1.0 / n;
        const double L = params.log_one_over_r();
        const double r = params.r();
        const double eps = params.epsilon;
        auto q = [&](double v) {
            const double root = std::sqrt(1.0 + eps * eps * std::pow(r, 2.0 * v));
            return L * L * ((2.0 * sigma / params.t - 0.25) +
                            (2.0 * sigma / params.t) * (root - 1.0));
        };
        const int m = n - 1;
        Eigen::VectorXd diag(m), rhs = Eigen::VectorXd::Zero(m);
        const double off = -1.0 / (h * h);
        for (int i = 0; i < m; ++i) diag[i] = 2.0 / (h * h) - q((i + 1) * h);
        rhs[0] -= off * w0;
        rhs[m - 1] -= off * w1;

        Eigen::VectorXd cp(m), dp(m);
        double beta = diag[0];
        if (std::abs(beta) < 1e-300) throw InterfaceMismatch("thin solve: singular operator");
        cp[0] = off / beta;
        dp[0] = rhs[0] / beta;
        for (int i = 1; i < m; ++i) {
            beta = diag[i] - off * cp[i - 1];
            if (std::abs(beta) < 1e-300) throw InterfaceMismatch("thin solve: singular operator");
            cp[i] = off / beta;
            dp[i] = (rhs[i] - off * dp[i - 1]) / beta;
        }
        std::vector<double> w(static_cast<std::size_t>(n) + 1);
        w[0] = w0;
        w[static_cast<std::size_t>(n)] = w1;
        w[static_cast<std::size_t>(n) - 1] = dp[m - 1];
        for (int i = m - 2; i >= 0; --i)
            w[static_cast<std::size_t>(i) + 1] = dp[i] - cp[i] * w[static_cast<std::size_t>(i) + 2];
        return w;
    }

    double slope0(const std::vector<double>& w) const {
        const double h = 1.0 / n;
        return (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2 * h);
    }
    double slope1(const std::vector<double>& w) const {
        const double h = 1.0 / n;
        const std::size_t e = w.size() - 1;
        return (3.0 * w[e] - 4.0 * w[e - 1] + w[e - 2]) / (2 * h);
    }
};

std::vector<double> derivative_uniform(const std::vector<double>& w, double h) {
    const std::size_t n = w.size();
    std::vector<double> d(n);
    d[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2 * h);
    d[n - 1] = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (w[i + 1] - w[i - 1]) / (2 * h);
    return d;
}

}  // namespace

double thin_mass_fraction(const GlueResult& glued, const SteklovSpectrum& spectrum) {
    const SparseSym Bthin = thin_boundary_mass(glued, glued.metric);
    const auto range = spectrum.cluster_range(1);
    const int k = range.second - range.first;
    Eigen::MatrixXd gram(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            gram(i, j) = spectrum.eigenfunctions.col(range.first + i)
                             .dot(Bthin * spectrum.eigenfunctions.col(range.first + j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    return es.eigenvalues().minCoeff();
}

MassBalanceResult choose_t_for_mass(const Mesh& base, const ConformalMetric& metric,
                                    const GlueParams& params_without_t, double xi,
                                    const MassBalanceOptions& opts) {
    GlueParams params = params_without_t;
    params.t = 1.0;
    params.validate();

    const double alpha_eff = params.r_value
                                 ? std::log(params.log_one_over_r()) / std::log(1.0 / params.epsilon)
                                 : params.alpha;
    const double tau = opts.tau > 0.0 ? opts.tau : 0.5 * (2.0 * alpha_eff + 1.0);
    if (opts.strict_window) {
        if (!(tau > 2.0 * alpha_eff) || !(tau < 1.0))
            throw BracketFailure("choose_t: tau must lie in (2 alpha, 1)");
        const double xi_lo = std::pow(params.epsilon, 1.0 - tau);
        const double xi_hi = 1.0 - opts.eta;
        if (!(xi > xi_lo) || !(xi < xi_hi))
            throw BracketFailure("choose_t: xi outside (eps^{1-tau}, 1-eta) = (" +
                                 std::to_string(xi_lo) + ", " + std::to_string(xi_hi) + ")");
    }

    MassBalanceResult out;
    {
        const SteklovSpectrum base_spec = steklov_spectrum(base, metric, 2);
        out.sigma_star = base_spec.sigma(1);
    }
    out.t_star = 8.0 * out.sigma_star;
    // Finite-truncation balance point where the two branches of the first
    // upper bound cross; tends to t_star as eps -> 0 and centers the bracket
    // where the thick/thin interaction actually happens at this scale.
    const double L = params.log_one_over_r();
    const double t_balance = out.sigma_star / (0.125 + std::numbers::pi * std::numbers::pi / (2 * L * L));

    const GlueResult glued = glue(base, metric, params);
    const BoundaryReduction red = reduce_to_boundary(glued.mesh, glued.metric);
    const SparseSym A = assemble_stiffness(glued.mesh, glued.metric);

    auto mass_at = [&](double t) {
        const ConformalMetric mt = metric_at_t(glued, t);
        const SparseSym B = assemble_boundary_mass(glued.mesh, mt);
        const SteklovSpectrum spec = spectrum_from_reduction(red, B, A, opts.spectrum_count);
        GlueResult view = glued;
        view.metric = mt;
        return thin_mass_fraction(view, spec);
    };

    double lo = opts.bracket_lo > 0.0 ? opts.bracket_lo : t_balance / 3.0;
    double hi = opts.bracket_hi > 0.0 ? opts.bracket_hi : 3.0 * t_balance;
    out.mass_lo = mass_at(lo);
    out.mass_hi = mass_at(hi);
    if (!(out.mass_lo > xi) || !(out.mass_hi < xi))
        throw BracketFailure("choose_t: bracket masses M(t0)=" + std::to_string(out.mass_lo) +
                             ", M(t1)=" + std::to_string(out.mass_hi) +
                             " do not straddle xi=" + std::to_string(xi));

    for (int it = 0; it < opts.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double m = mass_at(mid);
        ++out.iterations;
        if (std::abs(m - xi) <= opts.tolerance) {
            out.t = mid;
            out.mass = m;
            return out;
        }
        if (m > xi)
            lo = mid;
        else
            hi = mid;
    }
    throw BracketFailure("choose_t: bisection exhausted without meeting |M - xi| <= tolerance");
}

CoupledResult coupled_solve(const Mesh& base, const ConformalMetric& metric,
                            const GlueParams& params, const CoupledOptions& opts) {
    params.validate();
    const double eps = params.epsilon;
    const double r = params.r();
    const double L = params.log_one_over_r();
    const double t = params.t;
    const double sqrt_r = std::sqrt(r);

    CoupledResult out;
    {
        auto dirichlet = solve_reduced(params, ReducedBC::dirichlet_dirichlet(), 1,
                                       ReducedOptions{opts.thin_grid, true});
        out.sigma_thin_dirichlet = dirichlet[0].sigma;
        if (opts.detached) {
            out.sigma = dirichlet[0].sigma;
            out.state = std::move(dirichlet[0]);
            return out;
        }
    }

    // Thick side: the glued mesh minus the cusp is the refined base with the
    // two attachment intervals marked; condense its stiffness to the boundary.
    const GlueResult glued = glue(base, metric, params);
    Mesh thick;
    ConformalMetric thick_metric;
    std::vector<int> remap(static_cast<std::size_t>(glued.mesh.num_vertices()), -1);
    {
        const Mesh& gm = glued.mesh;
        for (int tr = 0; tr < gm.num_triangles(); ++tr) {
            if (gm.tri_chart[static_cast<std::size_t>(tr)] == glued.cusp_chart) continue;
            std::array<int, 3> tri;
            for (int k = 0; k < 3; ++k) {
                const int v = gm.triangles[static_cast<std::size_t>(tr)][static_cast<std::size_t>(k)];
                if (remap[static_cast<std::size_t>(v)] < 0) {
                    remap[static_cast<std::size_t>(v)] = thick.num_vertices();
                    thick.vertices.push_back(gm.vertices[static_cast<std::size_t>(v)]);
                    thick_metric.log_factor.push_back(glued.metric[v]);
                }
                tri[static_cast<std::size_t>(k)] = remap[static_cast<std::size_t>(v)];
            }
            thick.triangles.push_back(tri);
            thick.tri_chart.push_back(0);
        }
        thick.chart_tags.push_back("base");
        thick.rebuild_boundary("steklov");
    }

    std::vector<int> interval0, interval1;
    for (int v : glued.interval0) interval0.push_back(remap[static_cast<std::size_t>(v)]);
    for (int v : glued.interval1) interval1.push_back(remap[static_cast<std::size_t>(v)]);

    // Steklov mass only away from the seams.
    SparseSym B_free;
    {
        Mesh masked = thick;
        std::set<std::pair<int, int>> seam;
        auto key = [](int a, int b) { return std::pair<int, int>{std::min(a, b), std::max(a, b)}; };
        for (std::size_t i = 0; i + 1 < interval0.size(); ++i)
            seam.insert(key(interval0[i], interval0[i + 1]));
        for (std::size_t i = 0; i + 1 < interval1.size(); ++i)
            seam.insert(key(interval1[i], interval1[i + 1]));
        std::vector<Mesh::BoundaryEdge> kept;
        for (const auto& be : masked.boundary_edges)
            if (!seam.count(key(be.a, be.b))) kept.push_back(be);
        masked.boundary_edges = std::move(kept);
        B_free = assemble_boundary_mass(masked, thick_metric);
    }

    const BoundaryReduction red = reduce_to_boundary(thick, thick_metric);
    const int nb = static_cast<int>(red.boundary.size());
    std::vector<int> bpos(static_cast<std::size_t>(thick.num_vertices()), -1);
    for (int i = 0; i < nb; ++i)
        bpos[static_cast<std::size_t>(red.boundary[static_cast<std::size_t>(i)])] = i;

    // Chart-mean functionals of the two intervals on the boundary DOFs.
    auto mean_vector = [&](const std::vector<int>& interval) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(nb);
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < interval.size(); ++i) {
            const double len = (thick.vertices[static_cast<std::size_t>(interval[i + 1])] -
                                thick.vertices[static_cast<std::size_t>(interval[i])])
                                   .norm();
            w[bpos[static_cast<std::size_t>(interval[i])]] += 0.5 * len;
            w[bpos[static_cast<std::size_t>(interval[i + 1])]] += 0.5 * len;
            total += len;
        }
        w /= total;
        return w;  // w^T u = chart mean of u over the interval
    };
    const Eigen::VectorXd w0 = mean_vector(interval0);
    const Eigen::VectorXd w1 = mean_vector(interval1);

    std::vector<char> on_interval(static_cast<std::size_t>(nb), 0);
    for (int v : interval0) on_interval[static_cast<std::size_t>(bpos[static_cast<std::size_t>(v)])] = 1;
    for (int v : interval1) on_interval[static_cast<std::size_t>(bpos[static_cast<std::size_t>(v)])] = 1;
    std::vector<int> idxF, idxI;
    for (int i = 0; i < nb; ++i) (on_interval[static_cast<std::size_t>(i)] ? idxI : idxF).push_back(i);
    const int nf = static_cast<int>(idxF.size());
    const int ni = static_cast<int>(idxI.size());

    auto pick = [](const Eigen::MatrixXd& M, const std::vector<int>& rows, const std::vector<int>& cols) {
        Eigen::MatrixXd out(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M(rows[i], cols[j]);
        return out;
    };
    const Eigen::MatrixXd S_ff = pick(red.S, idxF, idxF);
    const Eigen::MatrixXd S_fi = pick(red.S, idxF, idxI);
    const Eigen::MatrixXd S_ii = pick(red.S, idxI, idxI);

    Eigen::MatrixXd Bff = Eigen::MatrixXd::Zero(nf, nf);
    for (int k = 0; k < B_free.outerSize(); ++k)
        for (SparseSym::InnerIterator it(B_free, k); it; ++it) {
            const int ib = bpos[static_cast<std::size_t>(it.row())];
            const int jb = bpos[static_cast<std::size_t>(it.col())];
            if (ib < 0 || jb < 0) continue;
            if (on_interval[static_cast<std::size_t>(ib)] || on_interval[static_cast<std::size_t>(jb)])
                continue;
            const int fi = static_cast<int>(std::lower_bound(idxF.begin(), idxF.end(), ib) - idxF.begin());
            const int fj = static_cast<int>(std::lower_bound(idxF.begin(), idxF.end(), jb) - idxF.begin());
            Bff(fi, fj) += it.value();
        }

    Eigen::VectorXd w0I(ni), w1I(ni);
    for (int i = 0; i < ni; ++i) {
        w0I[i] = w0[idxI[static_cast<std::size_t>(i)]];
        w1I[i] = w1[idxI[static_cast<std::size_t>(i)]];
    }

    for (int i = 0; i < nf; ++i) {
        if (Bff(i, i) > 0.0) continue;
        const int v = red.boundary[static_cast<std::size_t>(idxF[static_cast<std::size_t>(i)])];
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "coupled: free boundary vertex %d at (%.6g, %.6g) carries no Steklov mass", v,
                      thick.vertices[static_cast<std::size_t>(v)].x(),
                      thick.vertices[static_cast<std::size_t>(v)].y());
        throw InterfaceMismatch(msg);
    }

    // Interface conductance: flux out of the thick part through the seams per
    // unit chart means (m0, m1), from the thin Dirichlet-data responses via
    // the compatibility conditions.
    auto interface_matrix = [&](double sigma) {
        const ThinSolver thin{params, sigma, opts.thin_grid};
        const auto h0 = thin.solve(1.0, 0.0);
        const auto h1 = thin.solve(0.0, 1.0);
        Eigen::Matrix2d C;
        C(0, 0) = eps * (0.5 + thin.slope0(h0) / L);
        C(0, 1) = eps * sqrt_r * thin.slope0(h1) / L;
        C(1, 0) = -eps * sqrt_r * thin.slope1(h0) / L;
        C(1, 1) = -eps * r * (0.5 + thin.slope1(h1) / L);
        return C;
    };

    auto interface_projector = [&](const Eigen::Matrix2d& C) {
        Eigen::MatrixXd Q = C(0, 0) * w0I * w0I.transpose() + C(0, 1) * w0I * w1I.transpose() +
                            C(1, 0) * w1I * w0I.transpose() + C(1, 1) * w1I * w1I.transpose();
        return (0.5 * (Q + Q.transpose())).eval();
    };

    struct Step {
        double sigma;
        Eigen::VectorXd uf;
    };
    auto advance = [&](double sigma) {
        const Eigen::MatrixXd Q = interface_projector(interface_matrix(sigma));
        Eigen::FullPivLU<Eigen::MatrixXd> lu(S_ii - Q);
        if (!lu.isInvertible())
            throw InterfaceMismatch("coupled: interval block singular at sigma=" + std::to_string(sigma));
        const Eigen::MatrixXd X = lu.solve(S_fi.transpose());  // ni x nf
        const Eigen::MatrixXd S_eff = S_ff - S_fi * X;

        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S_eff, Bff);
        if (es.info() != Eigen::Success) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "coupled: condensed solve failed (nf=%d, min Bff diag=%.3e, |S_eff|=%.3e)",
                          static_cast<int>(S_eff.rows()), Bff.diagonal().minCoeff(), S_eff.norm());
            throw InterfaceMismatch(msg);
        }
        // index 0 is the near-constant mode; the matched mode comes next
        return Step{es.eigenvalues()[1], es.eigenvectors().col(1)};
    };

    // The matched eigenvalue is the lowest fixed point of sigma -> lambda_1(sigma).
    // Several fixed points coexist near resonance (thick modes cross the thin
    // branch), so bracket the lowest sign change of F(s) = lambda_1(s) - s on
    // (0, branch_cusp) first, then polish with the damped iteration.
    const double scan_hi = 0.998 * (params.t / 8.0 + params.t * std::numbers::pi * std::numbers::pi /
                                                         (2.0 * L * L));
    auto F = [&](double s) { return advance(s).sigma - s; };

    double lo = 0.0, hi = 0.0;
    {
        const int scan_points = 24;
        double prev_s = 0.0, prev_f = 0.0;
        for (int k = 1; k <= scan_points; ++k) {
            const double s = scan_hi * static_cast<double>(k) / scan_points;
            const double f = F(s);
            ++out.iterations;
            if (k > 1 && prev_f > 0.0 && f <= 0.0) {
                lo = prev_s;
                hi = s;
                break;
            }
            prev_s = s;
            prev_f = f;
        }
        if (hi == 0.0) {
            lo = prev_s;  // no crossing below the thin resonance: fall back to
            hi = scan_hi; // the damped iteration from the last scanned point
        }
    }

    double sigma = 0.5 * (lo + hi);
    Eigen::VectorXd uf;
    bool converged = false;
    double damping = opts.damping;
    double prev_gap = std::numeric_limits<double>::infinity();
    double prev_width = hi - lo;
    while (out.iterations < opts.max_iterations) {
        const Step step = advance(sigma);
        uf = step.uf;
        ++out.iterations;
        const double gap = step.sigma - sigma;
        if (std::abs(gap) <= opts.tolerance * std::max(1.0, std::abs(sigma)) ||
            hi - lo <= 1e-14 * std::max(1.0, std::abs(sigma))) {
            converged = true;
            break;
        }
        if (gap > 0.0)
            lo = std::max(lo, sigma);
        else
            hi = std::min(hi, sigma);
        if (std::abs(gap) >= prev_gap) damping *= 0.5;  // non-contracting: damp harder
        prev_gap = std::abs(gap);
        double next = sigma + damping * gap;
        // Keep geometric progress: bisect whenever the damped step leaves the
        // bracket or the bracket stopped shrinking.
        if (next <= lo || next >= hi || hi - lo > 0.75 * prev_width) next = 0.5 * (lo + hi);
        prev_width = hi - lo;
        sigma = next;
    }
    if (!converged)
        throw InterfaceMismatch("coupled: fixed point not converged within " +
                                std::to_string(opts.max_iterations) + " iterations");
    out.sigma = sigma;

    // Interval values and thin profile of the matched mode.
    const Eigen::MatrixXd Q = interface_projector(interface_matrix(sigma));
    const Eigen::VectorXd uI = Eigen::FullPivLU<Eigen::MatrixXd>(S_ii - Q).solve(-S_fi.transpose() * uf);
    const double m0 = w0I.dot(uI);
    const double m1 = w1I.dot(uI);

    const double end0 = m0 * std::sqrt(eps * L) / std::sqrt(t);
    const double end1 = m1 * std::sqrt(eps * L * r) / std::sqrt(t);

    ReducedState st;
    st.params = params;
    st.sigma = sigma;
    {
        const int n = opts.thin_grid;
        const ThinSolver thin{params, sigma, n};
        st.grid.resize(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) st.grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
        st.theta_bar = thin.solve(end0, end1);
        st.theta_bar_v = derivative_uniform(st.theta_bar, 1.0 / n);
    }

    // Normalize thick + thin to unit total boundary mass.
    const double mass_thick = [&] {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(thick.num_vertices());
        for (int i = 0; i < nf; ++i)
            full[red.boundary[static_cast<std::size_t>(idxF[static_cast<std::size_t>(i)])]] = uf[i];
        return full.dot(B_free * full);
    }();
    const double mass_thin = st.thin_mass();
    const double scale = 1.0 / std::sqrt(mass_thick + mass_thin);
    for (auto& x : st.theta_bar) x *= scale;
    for (auto& x : st.theta_bar_v) x *= scale;
    st.c0 = std::sqrt(mass_thin) * scale;
    st.c1 = st.theta_bar.front();
    st.b_eps = (eps / std::numbers::pi) * (-std::sqrt(t) / (std::sqrt(eps) * std::sqrt(L))) *
               (0.5 * st.theta_bar.front() + st.theta_bar_v.front() / L);

    {
        Eigen::VectorXd ub(nb);
        for (int i = 0; i < nf; ++i) ub[idxF[static_cast<std::size_t>(i)]] = uf[i];
        for (int i = 0; i < ni; ++i) ub[idxI[static_cast<std::size_t>(i)]] = uI[i];
        ub *= scale;
        st.delta_eps = ub.dot(red.S * ub) - sigma * mass_thick * scale * scale;
    }

    out.state = std::move(st);
    out.coupling.mean0 = m0 * scale;
    out.coupling.mean1 = m1 * scale;
    out.coupling.theta0 = out.state.theta_bar.front();
    out.coupling.theta1 = out.state.theta_bar.back();
    return out;
}

}  // namespace steklov
