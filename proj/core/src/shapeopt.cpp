#include "steklov/shapeopt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace steklov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Arc-length fraction of each vertex along its boundary cycle.
struct CycleParam {
    std::vector<int> verts;
    std::vector<double> frac;  // in [0,1)
};

std::vector<CycleParam> cycle_parametrization(const Mesh& mesh) {
    std::vector<CycleParam> out;
    for (const auto& cycle : boundary_cycles(mesh)) {
        CycleParam cp;
        cp.verts = cycle.vertices;
        const int n = static_cast<int>(cp.verts.size());
        std::vector<double> cum(static_cast<std::size_t>(n) + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            const Vec2 a = mesh.vertices[static_cast<std::size_t>(cp.verts[static_cast<std::size_t>(i)])];
            const Vec2 b = mesh.vertices[static_cast<std::size_t>(cp.verts[static_cast<std::size_t>((i + 1) % n)])];
            cum[static_cast<std::size_t>(i) + 1] = cum[static_cast<std::size_t>(i)] + (b - a).norm();
        }
        cp.frac.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) cp.frac[static_cast<std::size_t>(i)] = cum[static_cast<std::size_t>(i)] / cum.back();
        out.push_back(std::move(cp));
    }
    return out;
}

// Per-vertex fields of the Fourier directions cos(2 pi k s), sin(2 pi k s)
// on each cycle, plus the per-cycle constant. On a topological disk the k = 1
// pair spans the Mobius reparametrizations, neutral for sigma_1 L; keeping
// them only lets the iterates drift along the maximizer orbit.
std::vector<std::vector<double>> fourier_directions(const Mesh& mesh, int modes) {
    const auto cycles = cycle_parametrization(mesh);
    const TopologySummary topo = topology_invariants(mesh);
    const bool is_disk = topo.genus == 0 && topo.boundary_components == 1 && topo.orientable;
    std::vector<std::vector<double>> dirs;
    const std::size_t n = static_cast<std::size_t>(mesh.num_vertices());
    for (const auto& cp : cycles) {
        std::vector<double> dc(n, 0.0);
        for (int v : cp.verts) dc[static_cast<std::size_t>(v)] = 1.0;
        dirs.push_back(dc);
        for (int k = is_disk ? 2 : 1; k <= modes; ++k) {
            std::vector<double> c(n, 0.0), s(n, 0.0);
            for (std::size_t i = 0; i < cp.verts.size(); ++i) {
                c[static_cast<std::size_t>(cp.verts[i])] = std::cos(kTwoPi * k * cp.frac[i]);
                s[static_cast<std::size_t>(cp.verts[i])] = std::sin(kTwoPi * k * cp.frac[i]);
            }
            dirs.push_back(c);
            dirs.push_back(s);
        }
    }
    return dirs;
}

}  // namespace

SparseSym assemble_boundary_mass_derivative(const Mesh& mesh, const ConformalMetric& metric,
                                            const std::vector<double>& delta_omega,
                                            MassScheme scheme) {
    const int n = mesh.num_vertices();
    const std::vector<double> dfactors =
        boundary_edge_metric_factor_derivatives(mesh, metric, delta_omega);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& be = mesh.boundary_edges[e];
        const double len = boundary_edge_chart_length(mesh, static_cast<int>(e));
        const double w = len * dfactors[e];
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
    SparseSym dB(n, n);
    dB.setFromTriplets(trip.begin(), trip.end());
    return dB;
}

DerivativeInterval eigenvalue_directional_derivative(const Mesh& mesh, const ConformalMetric& metric,
                                                     const SteklovSpectrum& spectrum,
                                                     const std::vector<double>& delta_omega) {
    const SparseSym dB = assemble_boundary_mass_derivative(mesh, metric, delta_omega);
    const auto range = spectrum.cluster_range(1);
    const int k = range.second - range.first;
    const double sigma1 = spectrum.sigma(1);

    Eigen::MatrixXd Q(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            Q(i, j) = spectrum.eigenfunctions.col(range.first + i)
                          .dot(dB * spectrum.eigenfunctions.col(range.first + j));

    DerivativeInterval out;
    if (k == 1) {
        out.dsigma_lo = out.dsigma_hi = -sigma1 * Q(0, 0);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
        out.dsigma_lo = -sigma1 * es.eigenvalues().maxCoeff();
        out.dsigma_hi = -sigma1 * es.eigenvalues().minCoeff();
    }
    const int n = mesh.num_vertices();
    out.dL = Eigen::VectorXd::Ones(n).dot(dB * Eigen::VectorXd::Ones(n));
    const double L = spectrum.boundary_length;
    out.dsigmaL_lo = L * out.dsigma_lo + sigma1 * out.dL;
    out.dsigmaL_hi = L * out.dsigma_hi + sigma1 * out.dL;
    return out;
}

ConformalMetric project_unit_length(const Mesh& mesh, const ConformalMetric& metric) {
    ConformalMetric m = metric;
    for (int pass = 0; pass < 8; ++pass) {
        const double c = std::log(boundary_length(mesh, m));
        if (std::abs(c) <= 1e-15) return m;  // fixed point: second call returns unchanged
        for (auto& w : m.log_factor) w -= c;
    }
    return m;
}

namespace {

struct Evaluator {
    const Mesh& mesh;
    const BoundaryReduction red;
    const SparseSym A;
    int count;

    Evaluator(const Mesh& m, const ConformalMetric& metric, int spectrum_count)
        : mesh(m), red(reduce_to_boundary(m, metric)), A(assemble_stiffness(m, metric)),
          count(spectrum_count) {}

    SteklovSpectrum spectrum(const ConformalMetric& metric) const {
        const SparseSym B = assemble_boundary_mass(mesh, metric);
        return spectrum_from_reduction(red, B, A, count);
    }
};

}  // namespace

OptimizeResult optimize_density(const Mesh& mesh, const ConformalMetric& init,
                                const OptimizeOptions& opts) {
    if (static_cast<int>(init.log_factor.size()) != mesh.num_vertices())
        throw Error("optimize: density size mismatch");

    std::vector<std::vector<double>> dirs;
    if (opts.fourier_modes > 0) {
        dirs = fourier_directions(mesh, opts.fourier_modes);
    } else {
        for (int v : boundary_vertex_list(mesh)) {
            std::vector<double> e(static_cast<std::size_t>(mesh.num_vertices()), 0.0);
            e[static_cast<std::size_t>(v)] = 1.0;
            dirs.push_back(std::move(e));
        }
    }

    const Evaluator eval(mesh, init, opts.spectrum_count);
    OptimizeResult out;
    ConformalMetric omega = project_unit_length(mesh, init);
    SteklovSpectrum spec = eval.spectrum(omega);
    double value = spec.sigma(1) * spec.boundary_length;
    out.history.push_back({0, value, spec.multiplicity(1), 0.0});

    // Per-direction derivative of sigma_1 L evaluated on a fixed vector of the
    // sigma_1 eigenspace (worst-case subgradient when u spans the cluster
    // minimum, cluster average for the smoothed fallback direction).
    auto gradient_at = [&](const Eigen::MatrixXd& basis, const SteklovSpectrum& s) {
        std::vector<double> grad(dirs.size(), 0.0);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_vertices());
        for (std::size_t j = 0; j < dirs.size(); ++j) {
            const SparseSym dB = assemble_boundary_mass_derivative(mesh, omega, dirs[j]);
            double q = 0.0;
            for (int c = 0; c < basis.cols(); ++c) q += basis.col(c).dot(dB * basis.col(c));
            q /= basis.cols();
            const double dL = ones.dot(dB * ones);
            grad[j] = s.boundary_length * (-s.sigma(1) * q) + s.sigma(1) * dL;
        }
        return grad;
    };
    auto as_field = [&](const std::vector<double>& coeffs) {
        std::vector<double> d(static_cast<std::size_t>(mesh.num_vertices()), 0.0);
        for (std::size_t j = 0; j < dirs.size(); ++j)
            for (std::size_t v = 0; v < d.size(); ++v) d[v] += coeffs[j] * dirs[j][v];
        return d;
    };

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        const auto range = spec.cluster_range(1);
        const int kc = range.second - range.first;

        // Worst-case eigenvector of the cluster: one refinement pass against
        // the tentative step direction.
        Eigen::MatrixXd worst = spec.eigenfunctions.col(range.first);
        std::vector<double> grad = gradient_at(worst, spec);
        if (kc > 1) {
            const SparseSym dBd = assemble_boundary_mass_derivative(mesh, omega, as_field(grad));
            Eigen::MatrixXd Q(kc, kc);
            for (int i = 0; i < kc; ++i)
                for (int j2 = 0; j2 < kc; ++j2)
                    Q(i, j2) = spec.eigenfunctions.col(range.first + i)
                                   .dot(dBd * spec.eigenfunctions.col(range.first + j2));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
            Eigen::VectorXd comb = es.eigenvectors().col(kc - 1);  // max of Q = min of -sigma Q
            worst = Eigen::VectorXd::Zero(mesh.num_vertices());
            for (int i = 0; i < kc; ++i) worst += comb[i] * spec.eigenfunctions.col(range.first + i);
            grad = gradient_at(worst, spec);
        }

        // Backtracking on sigma_1 L along a per-vertex field, Armijo slope from
        // the worst-case one-sided directional derivative.
        auto line_search = [&](std::vector<double> field, int iter_no) {
            double sup = 0.0;
            for (double x : field) sup = std::max(sup, std::abs(x));
            if (sup == 0.0) return false;
            for (double& x : field) x /= sup;
            const DerivativeInterval di = eigenvalue_directional_derivative(mesh, omega, spec, field);
            const double slope = di.dsigmaL_lo;
            if (slope <= opts.gradient_tolerance) return false;
            double trial_step = opts.initial_step;
            for (int bt = 0; bt < opts.backtrack_budget; ++bt) {
                ConformalMetric cand = omega;
                for (std::size_t v = 0; v < cand.log_factor.size(); ++v)
                    cand.log_factor[v] += trial_step * field[v];
                cand = project_unit_length(mesh, cand);
                SteklovSpectrum cand_spec = eval.spectrum(cand);
                const double cand_value = cand_spec.sigma(1) * cand_spec.boundary_length;
                const double required =
                    value + std::max(opts.armijo_slope * trial_step * slope,
                                     opts.ascent_slack * std::max(1.0, std::abs(value)));
                if (cand_value >= required) {
                    omega = std::move(cand);
                    spec = std::move(cand_spec);
                    value = cand_value;
                    out.history.push_back({iter_no, value, spec.multiplicity(1), trial_step});
                    return true;
                }
                trial_step *= opts.backtrack_factor;
            }
            return false;
        };

        // Crease direction: the worst-case step deadlocks a degenerate cluster,
        // so also solve for the direction whose derivative matrix of sigma_1 L
        // over the cluster is the identity, lifting every branch together.
        std::vector<double> lifted;
        if (kc > 1) {
            const int pairs = kc * (kc + 1) / 2;
            Eigen::MatrixXd M(pairs, static_cast<Eigen::Index>(dirs.size()));
            Eigen::VectorXd rhs(pairs);
            const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_vertices());
            for (std::size_t j = 0; j < dirs.size(); ++j) {
                const SparseSym dB = assemble_boundary_mass_derivative(mesh, omega, dirs[j]);
                const double dL = ones.dot(dB * ones);
                int row = 0;
                for (int a = 0; a < kc; ++a)
                    for (int b = a; b < kc; ++b, ++row) {
                        const double q = spec.eigenfunctions.col(range.first + a)
                                             .dot(dB * spec.eigenfunctions.col(range.first + b));
                        double entry = spec.boundary_length * (-spec.sigma(1)) * q;
                        if (a == b) entry += spec.sigma(1) * dL;
                        M(row, static_cast<Eigen::Index>(j)) = entry;
                    }
            }
            {
                int row = 0;
                for (int a = 0; a < kc; ++a)
                    for (int b = a; b < kc; ++b, ++row) rhs[row] = (a == b) ? 1.0 : 0.0;
            }
            const Eigen::VectorXd sol = M.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
            lifted.resize(dirs.size());
            for (std::size_t j = 0; j < dirs.size(); ++j) lifted[j] = sol[static_cast<Eigen::Index>(j)];
        }

        // Stopping rule: the sigma_1 L derivative interval along the best
        // available ascent direction contains 0 within tolerance.
        {
            std::vector<double> d = as_field(kc > 1 ? lifted : grad);
            double sup = 0.0;
            for (double x : d) sup = std::max(sup, std::abs(x));
            if (sup == 0.0) break;
            for (double& x : d) x /= sup;
            const DerivativeInterval di = eigenvalue_directional_derivative(mesh, omega, spec, d);
            if (di.dsigmaL_lo <= opts.gradient_tolerance &&
                di.dsigmaL_hi >= -opts.gradient_tolerance)
                break;
        }

        bool accepted = line_search(as_field(grad), iter);
        if (!accepted && kc > 1) accepted = line_search(as_field(lifted), iter);
        if (!accepted) {
            out.stalled = true;  // convergence signal, reported, not fatal
            break;
        }
    }

    out.density = std::move(omega);
    out.sigma1L = value;
    return out;
}

ConformalMetric random_fourier_density(const Mesh& mesh, int modes, double amplitude,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ConformalMetric m = ConformalMetric::constant(mesh.num_vertices(), 0.0);
    for (const auto& cp : cycle_parametrization(mesh)) {
        // Starts span modes k >= 2: on the disk the k = 1 pair spans the
        // Mobius reparametrizations, neutral directions of sigma_1 L that no
        // ascent step can or should remove.
        for (int k = 2; k <= modes; ++k) {
            const double a = amplitude * uni(rng) / k;
            const double b = amplitude * uni(rng) / k;
            for (std::size_t i = 0; i < cp.verts.size(); ++i)
                m[cp.verts[i]] += a * std::cos(kTwoPi * k * cp.frac[i]) +
                                  b * std::sin(kTwoPi * k * cp.frac[i]);
        }
    }
    return project_unit_length(mesh, m);
}

Immersion extract_immersion(const Mesh& mesh, const ConformalMetric& metric,
                            const SteklovSpectrum& spectrum) {
    const auto range = spectrum.cluster_range(1);
    const int N = range.second - range.first;
    const int n = mesh.num_vertices();

    Immersion im;
    im.N = N;
    im.sigma1 = spectrum.sigma(1);
    im.coordinates.resize(n, N);
    for (int j = 0; j < N; ++j) im.coordinates.col(j) = spectrum.eigenfunctions.col(range.first + j);

    const SparseSym B = assemble_boundary_mass(mesh, metric);
    im.gram.resize(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            im.gram(i, j) = 2.0 / spectrum.boundary_length *
                            im.coordinates.col(i).dot(B * im.coordinates.col(j));

    // Least-squares global scale: min over c of sum w (c^2 |Phi|^2 - 1)^2
    // with lumped boundary weights.
    const SparseSym Bl = assemble_boundary_mass(mesh, metric, MassScheme::Lumped);
    double s2 = 0.0, s4 = 0.0;
    for (int v : boundary_vertex_list(mesh)) {
        const double w = Bl.coeff(v, v);
        const double nrm2 = im.coordinates.row(v).squaredNorm();
        s2 += w * nrm2;
        s4 += w * nrm2 * nrm2;
    }
    if (s4 <= 0.0) throw Error("immersion: degenerate boundary trace");
    im.scale = std::sqrt(s2 / s4);
    im.coordinates *= im.scale;

    im.sphere_deviation = 0.0;
    for (int v : boundary_vertex_list(mesh))
        im.sphere_deviation =
            std::max(im.sphere_deviation, std::abs(im.coordinates.row(v).squaredNorm() - 1.0));
    return im;
}

MinimalityReport minimality_residuals(const Immersion& immersion, const Mesh& mesh,
                                      const ConformalMetric& metric) {
    MinimalityReport rep;
    const SparseSym A = assemble_stiffness(mesh, metric);
    const SparseSym B = assemble_boundary_mass(mesh, metric);
    const SparseSym Bl = assemble_boundary_mass(mesh, metric, MassScheme::Lumped);
    const DtnMatrix dtn = dtn_matrix(mesh, metric);
    const auto bverts = boundary_vertex_list(mesh);

    double max_phi = 0.0;
    for (int v : bverts) max_phi = std::max(max_phi, immersion.coordinates.row(v).norm());

    for (int j = 0; j < immersion.N; ++j) {
        const Eigen::VectorXd u = immersion.coordinates.col(j);
        const Eigen::VectorXd res = A * u - immersion.sigma1 * (B * u);
        rep.harmonic_residual = std::max(rep.harmonic_residual, res.norm() / u.norm());

        Eigen::VectorXd ub(dtn.boundary.size());
        for (std::size_t i = 0; i < dtn.boundary.size(); ++i)
            ub[static_cast<Eigen::Index>(i)] = u[dtn.boundary[i]];
        const Eigen::VectorXd flux = dtn.S * ub;
        for (std::size_t i = 0; i < dtn.boundary.size(); ++i) {
            const int v = dtn.boundary[i];
            const double density = flux[static_cast<Eigen::Index>(i)] / Bl.coeff(v, v);
            const double target = immersion.sigma1 * u[v];
            rep.angle_residual = std::max(
                rep.angle_residual, std::abs(density - target) / (immersion.sigma1 * max_phi));
        }
    }

    for (int v : bverts)
        rep.sphere_deviation =
            std::max(rep.sphere_deviation, std::abs(immersion.coordinates.row(v).squaredNorm() - 1.0));
    return rep;
}

}  // namespace steklov
