#include "steklov/reduced1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace steklov {

namespace {

constexpr double kPi = std::numbers::pi;

double trapz(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

// Second-order derivative of samples on a uniform grid.
std::vector<double> derivative(const std::vector<double>& v, double h) {
    const std::size_t n = v.size();
    std::vector<double> d(n);
    if (n < 3) throw NoConvergence("reduced: grid too small for differentiation");
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2 * h);
    return d;
}

}  // namespace

double ReducedState::thin_mass() const {
    const double eps = params.epsilon;
    const double r = params.r();
    std::vector<double> integrand(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = std::pow(r, 2.0 * grid[i]);
        integrand[i] = theta_bar[i] * theta_bar[i] * std::sqrt(1.0 + eps * eps * w);
    }
    return 2.0 * trapz(grid, integrand);
}

double ReducedState::thin_energy() const {
    const double L = params.log_one_over_r();
    std::vector<double> integrand(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = 0.5 * theta_bar[i] + theta_bar_v[i] / L;
        integrand[i] = g * g;
    }
    return params.t * trapz(grid, integrand);
}

std::vector<ReducedState> solve_reduced(const GlueParams& params, const ReducedBC& bc, int count,
                                        const ReducedOptions& opts) {
    params.validate();
    const int n = opts.grid_points;
    if (n < 8) throw NoConvergence("reduced: grid_points too small");
    const double h = 1.0 / n;
    const double L = params.log_one_over_r();
    const double r = params.r();
    const double eps = params.epsilon;
    const double t = params.t;

    // Pencil A w = sigma D w on the kept nodes; A = FD Laplacian + L^2/4
    // (lumped) + Robin springs, D = lumped weight (2L^2/t) sqrt(1+eps^2 r^{2v}).
    const bool keep0 = bc.robin0.has_value();
    const bool keep1 = bc.robin1.has_value();
    const int lo = keep0 ? 0 : 1;
    const int hi = keep1 ? n : n - 1;
    const int m = hi - lo + 1;
    if (m < 3) throw NoConvergence("reduced: empty interior");

    Eigen::VectorXd diagA(m), offA(m - 1), diagD(m);
    for (int k = 0; k < m; ++k) {
        const int i = lo + k;
        const double v = i * h;
        const double lump = (i == 0 || i == n) ? h / 2 : h;
        const double weight =
            opts.epsilon_correction ? std::sqrt(1.0 + eps * eps * std::pow(r, 2.0 * v)) : 1.0;
        double a = (L * L / 4.0) * lump;
        a += (i == 0 || i == n) ? 1.0 / h : 2.0 / h;
        if (i == 0 && keep0) a += *bc.robin0;
        if (i == n && keep1) a += *bc.robin1;
        diagA[k] = a;
        diagD[k] = (2.0 * L * L / t) * weight * lump;
        if (k + 1 < m) offA[k] = -1.0 / h;
    }

    // Symmetric congruence by D^{-1/2} keeps the tridiagonal form.
    Eigen::VectorXd dinv = diagD.array().sqrt().inverse();
    Eigen::VectorXd td = diagA.array() * dinv.array().square();
    Eigen::VectorXd te(m - 1);
    for (int k = 0; k + 1 < m; ++k) te[k] = offA[k] * dinv[k] * dinv[k + 1];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(td, te, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw NoConvergence("reduced: tridiagonal solve failed");

    std::vector<ReducedState> states;
    const int take = std::min(count, m);
    for (int k = 0; k < take; ++k) {
        ReducedState st;
        st.params = params;
        st.sigma = solver.eigenvalues()[k];
        st.grid.resize(static_cast<std::size_t>(n) + 1);
        st.theta_bar.assign(static_cast<std::size_t>(n) + 1, 0.0);
        for (int i = 0; i <= n; ++i) st.grid[static_cast<std::size_t>(i)] = i * h;
        for (int kk = 0; kk < m; ++kk)
            st.theta_bar[static_cast<std::size_t>(lo + kk)] = dinv[kk] * solver.eigenvectors()(kk, k);

        // Unit thin mass; orient the profile upward at its maximum.
        const double mass = st.thin_mass();
        double scale = 1.0 / std::sqrt(mass);
        const auto imax = std::max_element(st.theta_bar.begin(), st.theta_bar.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
        if (*imax < 0) scale = -scale;
        for (auto& x : st.theta_bar) x *= scale;

        st.theta_bar_v = derivative(st.theta_bar, h);  // mu = 0 in the reduced model
        st.c0 = 1.0;
        st.c1 = st.theta_bar.front();
        st.b_eps = (eps / kPi) * (-std::sqrt(t) / (std::sqrt(eps) * std::sqrt(L))) *
                   (0.5 * st.theta_bar.front() + st.theta_bar_v.front() / L);
        states.push_back(std::move(st));
    }
    return states;
}

double reduced_dirichlet_sigma(const GlueParams& params, int mode) {
    const double L = params.log_one_over_r();
    return params.t / 8.0 + params.t * mode * mode * kPi * kPi / (2.0 * L * L);
}

ReducedState reduced_state_from_fem(const GlueResult& glued, const SteklovSpectrum& spectrum,
                                    int eigen_index) {
    const Mesh& mesh = glued.mesh;
    const GlueParams& p = glued.params;
    const double eps = p.epsilon;
    const double L = p.log_one_over_r();
    const double t = p.t;
    const Eigen::VectorXd u = spectrum.eigenfunctions.col(eigen_index);

    const int layers = static_cast<int>(glued.cusp_rows.size()) - 1;
    const int cols = static_cast<int>(glued.cusp_rows.front().size()) - 1;
    ReducedState st;
    st.params = p;
    st.sigma = spectrum.sigma(eigen_index);
    st.grid.resize(static_cast<std::size_t>(layers) + 1);
    st.theta_bar.resize(static_cast<std::size_t>(layers) + 1);

    std::vector<double> edge_plus(static_cast<std::size_t>(layers) + 1);
    std::vector<double> edge_minus(static_cast<std::size_t>(layers) + 1);
    for (int j = 0; j <= layers; ++j) {
        const double v = static_cast<double>(j) / layers;
        st.grid[static_cast<std::size_t>(j)] = v;
        const double y_paper = glued.row_y[static_cast<std::size_t>(j)] / eps;
        const double inv_c = std::sqrt(eps) * std::sqrt(L) * std::sqrt(y_paper) / std::sqrt(t);

        // Chart-width-weighted horizontal mean over the row.
        double num = 0.0, den = 0.0;
        double prev_x = 0.0, prev_u = 0.0;
        for (int i = 0; i <= cols; ++i) {
            const int vert = glued.cusp_rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            const double x = mesh.position_in_chart(vert, glued.cusp_chart).x();
            const double uv = u[vert];
            if (i > 0) {
                num += 0.5 * (uv + prev_u) * (x - prev_x);
                den += x - prev_x;
            }
            prev_x = x;
            prev_u = uv;
        }
        st.theta_bar[static_cast<std::size_t>(j)] = (num / den) * inv_c;
        edge_minus[static_cast<std::size_t>(j)] =
            u[glued.cusp_rows[static_cast<std::size_t>(j)].front()] * inv_c;
        edge_plus[static_cast<std::size_t>(j)] =
            u[glued.cusp_rows[static_cast<std::size_t>(j)].back()] * inv_c;
    }

    // Thin boundary mass, exactly as the FEM boundary form sees it.
    double mass = 0.0;
    {
        const int tag_sp = mesh.find_segment("side+");
        const int tag_sm = mesh.find_segment("side-");
        const std::vector<double> factors = boundary_edge_metric_factors(mesh, glued.metric);
        for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
            const auto& be = mesh.boundary_edges[e];
            if (be.tag != tag_sp && be.tag != tag_sm) continue;
            const double w = boundary_edge_chart_length(mesh, static_cast<int>(e)) * factors[e];
            const double ua = u[be.a], ub = u[be.b];
            mass += w * (ua * ua + ub * ub + ua * ub) / 3.0;
        }
    }
    st.c0 = std::sqrt(mass);
    st.c1 = st.theta_bar.front();

    const double h = 1.0 / layers;
    std::vector<double> mu(static_cast<std::size_t>(layers) + 1);
    for (int j = 0; j <= layers; ++j)
        mu[static_cast<std::size_t>(j)] = 2.0 * st.theta_bar[static_cast<std::size_t>(j)] -
                                          edge_plus[static_cast<std::size_t>(j)] -
                                          edge_minus[static_cast<std::size_t>(j)];
    // theta_bar' = ln(1/r) mu + theta_bar_v
    const std::vector<double> dbar = derivative(st.theta_bar, h);
    st.theta_bar_v.resize(dbar.size());
    for (std::size_t j = 0; j < dbar.size(); ++j) st.theta_bar_v[j] = dbar[j] - L * mu[j];

    std::vector<double> mu_sq(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) mu_sq[j] = mu[j] * mu[j];
    st.mu_norm_bound = std::sqrt(trapz(st.grid, mu_sq));

    st.b_eps = (eps / kPi) * (-std::sqrt(t) / (std::sqrt(eps) * std::sqrt(L))) *
               (0.5 * st.theta_bar.front() + st.theta_bar_v.front() / L);

    // Thick-part energy defect delta_eps = int_Sigma |grad u|^2 - sigma N.
    double thick_energy = 0.0;
    for (int tr = 0; tr < mesh.num_triangles(); ++tr) {
        if (mesh.tri_chart[static_cast<std::size_t>(tr)] == glued.cusp_chart) continue;
        const Vec2 pts[3] = {mesh.corner(tr, 0), mesh.corner(tr, 1), mesh.corner(tr, 2)};
        const auto& tri = mesh.triangles[static_cast<std::size_t>(tr)];
        const double area = 0.5 * ((pts[1] - pts[0]).x() * (pts[2] - pts[0]).y() -
                                   (pts[2] - pts[0]).x() * (pts[1] - pts[0]).y());
        Vec2 grad = Vec2::Zero();
        for (int k = 0; k < 3; ++k) {
            const Vec2 e = pts[(k + 2) % 3] - pts[(k + 1) % 3];
            grad += u[tri[static_cast<std::size_t>(k)]] * Vec2(-e.y(), e.x());
        }
        grad /= (2.0 * area);
        thick_energy += area * grad.squaredNorm();
    }
    st.delta_eps = thick_energy - st.sigma * (1.0 - mass);
    return st;
}

SecondModeChoice select_second_mode(const GlueResult& glued, const SteklovSpectrum& spectrum, int K) {
    SecondModeChoice choice;
    for (int l = 2; l <= K + 1 && l < spectrum.size(); ++l) {
        const ReducedState st = reduced_state_from_fem(glued, spectrum, l);
        const double mass = st.c0 * st.c0;
        if (mass > choice.thin_mass) {
            choice.thin_mass = mass;
            choice.mode = l;
        }
    }
    if (choice.mode < 0) throw Error("select_second_mode: spectrum too short");
    choice.meets_threshold = choice.thin_mass >= 1.0 / (4.0 * K);
    return choice;
}

CombinedTestResult combined_test_function(const ReducedState& first, const ReducedState& second) {
    if (std::abs(first.c1) <= 1e-12)
        throw DegenerateC1("combined test function: |c1| <= 1e-12, the simple test function suffices");
    if (first.grid.size() != second.grid.size())
        throw Error("combined test function: profiles on different grids");

    CombinedTestResult out;
    out.gamma = -second.c1 / first.c1;
    const double g2 = out.gamma * out.gamma;
    const double s1 = first.sigma, sl = second.sigma;

    ReducedState combined = second;
    for (std::size_t i = 0; i < combined.theta_bar.size(); ++i) {
        combined.theta_bar[i] += out.gamma * first.theta_bar[i];
        combined.theta_bar_v[i] += out.gamma * first.theta_bar_v[i];
    }
    const double mass = combined.thin_mass();
    const double energy = combined.thin_energy();

    out.thin_mass_combined = mass;
    out.leading = (g2 * s1 + sl) / (1.0 + g2);
    out.A = (g2 * s1 + sl) * mass - (g2 + 1.0) * energy;
    out.B = g2 + 1.0 - mass;
    out.improved_bound = out.leading + out.A / ((g2 + 1.0) * out.B);

    const double m1 = first.thin_mass();
    const double e1 = first.thin_energy();
    out.single_bound = (s1 - e1) / (1.0 - m1);
    return out;
}

}  // namespace steklov
