#include "steklov/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

namespace steklov {

namespace {

std::vector<std::pair<int, int>> cluster_ranges(const std::vector<double>& sigma, double rtol) {
    std::vector<std::pair<int, int>> clusters;
    int begin = 0;
    for (int k = 1; k <= static_cast<int>(sigma.size()); ++k) {
        bool close = false;
        if (k < static_cast<int>(sigma.size())) {
            const double gap = sigma[static_cast<std::size_t>(k)] - sigma[static_cast<std::size_t>(k - 1)];
            const double scale = std::max(std::abs(sigma[static_cast<std::size_t>(k)]), 1e-12);
            close = gap <= rtol * scale;
        }
        if (!close) {
            clusters.emplace_back(begin, k);
            begin = k;
        }
    }
    return clusters;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> u) {
    int imax = 0;
    double vmax = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        if (std::abs(u[i]) > vmax) {
            vmax = std::abs(u[i]);
            imax = i;
        }
    }
    if (u[imax] < 0.0) u = -u;
}

}  // namespace

std::pair<int, int> SteklovSpectrum::cluster_range(int k) const {
    for (const auto& c : clusters)
        if (k >= c.first && k < c.second) return c;
    return {k, k + 1};
}

int SteklovSpectrum::multiplicity(int k) const {
    const auto c = cluster_range(k);
    return c.second - c.first;
}

BoundaryReduction reduce_to_boundary(const Mesh& mesh, const ConformalMetric& metric) {
    const SparseSym A = assemble_stiffness(mesh, metric);
    const int n = mesh.num_vertices();

    BoundaryReduction red;
    red.boundary = boundary_vertex_list(mesh);
    std::vector<char> is_bd(static_cast<std::size_t>(n), 0);
    for (int v : red.boundary) is_bd[static_cast<std::size_t>(v)] = 1;
    for (int v = 0; v < n; ++v)
        if (!is_bd[static_cast<std::size_t>(v)]) red.interior.push_back(v);

    const int nb = static_cast<int>(red.boundary.size());
    const int ni = static_cast<int>(red.interior.size());
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < nb; ++i) pos[static_cast<std::size_t>(red.boundary[static_cast<std::size_t>(i)])] = i;
    for (int i = 0; i < ni; ++i) pos[static_cast<std::size_t>(red.interior[static_cast<std::size_t>(i)])] = i;

    std::vector<Eigen::Triplet<double>> tii;
    Eigen::MatrixXd Aib = Eigen::MatrixXd::Zero(ni, nb);
    Eigen::MatrixXd Abb = Eigen::MatrixXd::Zero(nb, nb);
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseSym::InnerIterator it(A, k); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            const bool bi = is_bd[static_cast<std::size_t>(i)], bj = is_bd[static_cast<std::size_t>(j)];
            if (bi && bj)
                Abb(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]) += it.value();
            else if (!bi && bj)
                Aib(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]) += it.value();
            else if (!bi && !bj)
                tii.emplace_back(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)], it.value());
        }

    if (ni == 0) {
        red.S = std::move(Abb);
        red.extension.resize(0, nb);
        return red;
    }

    SparseSym Aii(ni, ni);
    Aii.setFromTriplets(tii.begin(), tii.end());
    Eigen::SimplicialLDLT<SparseSym> ldlt(Aii);
    if (ldlt.info() != Eigen::Success)
        throw SolverFailure("interior stiffness block factorization failed");
    red.extension = -ldlt.solve(Aib);
    red.S = Abb + Aib.transpose() * red.extension;
    red.S = 0.5 * (red.S + red.S.transpose()).eval();
    return red;
}

SteklovSpectrum spectrum_from_reduction(const BoundaryReduction& red, const SparseSym& B,
                                        const SparseSym& A, int count, const SpectrumOptions& opts) {
    if (count < 1) throw SolverFailure("spectrum: count must be >= 1");
    const int nb = static_cast<int>(red.boundary.size());
    const int n = static_cast<int>(B.rows());

    Eigen::MatrixXd Bbb = Eigen::MatrixXd::Zero(nb, nb);
    {
        std::vector<int> pos(static_cast<std::size_t>(n), -1);
        for (int i = 0; i < nb; ++i) pos[static_cast<std::size_t>(red.boundary[static_cast<std::size_t>(i)])] = i;
        for (int k = 0; k < B.outerSize(); ++k)
            for (SparseSym::InnerIterator it(B, k); it; ++it) {
                const int i = pos[static_cast<std::size_t>(it.row())];
                const int j = pos[static_cast<std::size_t>(it.col())];
                if (i >= 0 && j >= 0) Bbb(i, j) += it.value();
            }
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(red.S, Bbb);
    if (solver.info() != Eigen::Success)
        throw SolverFailure("boundary pencil solve failed (is the boundary mass positive definite?)");

    const int take = std::min(count + 1, nb);
    SteklovSpectrum out;
    out.eigenfunctions.resize(n, take);
    for (int k = 0; k < take; ++k) {
        out.eigenvalues.push_back(solver.eigenvalues()[k]);
        Eigen::VectorXd ub = solver.eigenvectors().col(k);
        Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < nb; ++i) full[red.boundary[static_cast<std::size_t>(i)]] = ub[i];
        if (!red.interior.empty()) {
            Eigen::VectorXd ui = red.extension * ub;
            for (std::size_t i = 0; i < red.interior.size(); ++i)
                full[red.interior[i]] = ui[static_cast<Eigen::Index>(i)];
        }
        const double bnorm = std::sqrt(full.dot(B * full));
        if (bnorm > 0) full /= bnorm;
        fix_sign(full);
        out.eigenfunctions.col(k) = full;

        out.boundary_norm_residuals.push_back(std::abs(full.dot(B * full) - 1.0));
        const Eigen::VectorXd res = A * full - out.eigenvalues.back() * (B * full);
        out.pencil_residuals.push_back(res.norm() / full.norm());
    }
    out.clusters = cluster_ranges(out.eigenvalues, opts.cluster_rtol);
    out.boundary_length = Eigen::VectorXd::Ones(n).dot(B * Eigen::VectorXd::Ones(n));
    return out;
}

namespace {

// Full-size route: A u = sigma B u with B semidefinite, solved through the
// positive definite shift K = A + B as B u = 1/(1+sigma) K u.
SteklovSpectrum full_pencil_spectrum(const Mesh& mesh, const SparseSym& A, const SparseSym& B,
                                     int count, const SpectrumOptions& opts) {
    const int n = mesh.num_vertices();
    Eigen::MatrixXd Ad = Eigen::MatrixXd(A);
    Eigen::MatrixXd Bd = Eigen::MatrixXd(B);
    Eigen::MatrixXd K = Ad + Bd;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(Bd, K);
    if (solver.info() != Eigen::Success) throw SolverFailure("full pencil solve failed");

    // lambda = 1/(1+sigma); finite sigmas are the largest lambdas.
    std::vector<std::pair<double, int>> finite;
    for (int k = 0; k < n; ++k) {
        const double lambda = solver.eigenvalues()[k];
        if (lambda > 1e-10) finite.emplace_back(1.0 / lambda - 1.0, k);
    }
    std::sort(finite.begin(), finite.end());

    const int take = std::min<int>(count + 1, static_cast<int>(finite.size()));
    SteklovSpectrum out;
    out.eigenfunctions.resize(n, take);
    for (int k = 0; k < take; ++k) {
        out.eigenvalues.push_back(finite[static_cast<std::size_t>(k)].first);
        Eigen::VectorXd u = solver.eigenvectors().col(finite[static_cast<std::size_t>(k)].second);
        const double bnorm = std::sqrt(u.dot(Bd * u));
        if (bnorm > 0) u /= bnorm;
        fix_sign(u);
        out.eigenfunctions.col(k) = u;
        out.boundary_norm_residuals.push_back(std::abs(u.dot(Bd * u) - 1.0));
        const Eigen::VectorXd res = Ad * u - out.eigenvalues.back() * (Bd * u);
        out.pencil_residuals.push_back(res.norm() / u.norm());
    }
    out.clusters = cluster_ranges(out.eigenvalues, opts.cluster_rtol);
    out.boundary_length = Eigen::VectorXd::Ones(n).dot(Bd * Eigen::VectorXd::Ones(n));
    return out;
}

}  // namespace

SteklovSpectrum steklov_spectrum(const Mesh& mesh, const ConformalMetric& metric, int count,
                                 const SpectrumOptions& opts) {
    if (mesh.boundary_edges.empty()) throw SolverFailure("spectrum: mesh has empty boundary");
    const SparseSym A = assemble_stiffness(mesh, metric);
    const SparseSym B = assemble_boundary_mass(mesh, metric, opts.mass);
    if (opts.route == SpectrumOptions::Route::FullPencil)
        return full_pencil_spectrum(mesh, A, B, count, opts);
    const BoundaryReduction red = reduce_to_boundary(mesh, metric);
    return spectrum_from_reduction(red, B, A, count, opts);
}

DtnMatrix dtn_matrix(const Mesh& mesh, const ConformalMetric& metric) {
    if (mesh.boundary_edges.empty()) throw SolverFailure("dtn: mesh has empty boundary");
    BoundaryReduction red = reduce_to_boundary(mesh, metric);
    return DtnMatrix{std::move(red.S), std::move(red.boundary)};
}

double sigma1_L(const Mesh& mesh, const ConformalMetric& metric) {
    const SteklovSpectrum spec = steklov_spectrum(mesh, metric, 1);
    return spec.eigenvalues.at(1) * spec.boundary_length;
}

}  // namespace steklov
