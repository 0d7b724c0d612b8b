#include "steklov/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "steklov/model_functions.hpp"
#include "steklov/quadrature.hpp"

namespace steklov {

namespace {

constexpr double kPi = std::numbers::pi;

double scale_factor(double y, const GlueParams& p) {
    // phi = scale_factor(y) * theta
    return std::sqrt(p.t) / (std::sqrt(p.epsilon) * std::sqrt(p.log_one_over_r()) * std::sqrt(y));
}

void check_grid(const ThetaGrid& grid, const GridField& field) {
    if (grid.rows < 2 || grid.cols < 2)
        throw QuadratureUnderflow("theta grid: need rows >= 2 and cols >= 2");
    if (static_cast<int>(field.size()) != grid.rows + 1)
        throw Error("theta grid: row count mismatch");
    for (const auto& row : field)
        if (static_cast<int>(row.size()) != grid.cols + 1)
            throw Error("theta grid: column count mismatch");
}

}  // namespace

GridField theta_of_phi(const GridField& phi, const ThetaGrid& grid, const GlueParams& params) {
    check_grid(grid, phi);
    const double r = params.r();
    GridField theta(phi.size(), std::vector<double>(phi.front().size()));
    for (int j = 0; j <= grid.rows; ++j) {
        const double y = std::pow(r, grid.v(j));
        const double c = scale_factor(y, params);
        for (int i = 0; i <= grid.cols; ++i)
            theta[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                phi[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] / c;
    }
    return theta;
}

GridField phi_of_theta(const GridField& theta, const ThetaGrid& grid, const GlueParams& params) {
    check_grid(grid, theta);
    const double r = params.r();
    GridField phi(theta.size(), std::vector<double>(theta.front().size()));
    for (int j = 0; j <= grid.rows; ++j) {
        const double y = std::pow(r, grid.v(j));
        const double c = scale_factor(y, params);
        for (int i = 0; i <= grid.cols; ++i)
            phi[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                c * theta[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    return phi;
}

EnergyIdentityResiduals energy_identity_residuals(const GridField& theta, const ThetaGrid& grid,
                                                  const GlueParams& params) {
    check_grid(grid, theta);
    const double r = params.r();
    const double L = params.log_one_over_r();
    const double eps = params.epsilon;
    const double t = params.t;
    const int R = grid.rows, C = grid.cols;
    const double dv = 1.0 / R;
    const double dxi = 2.0 / C;

    auto th = [&](int j, int i) { return theta[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]; };
    auto yv = [&](int j) { return std::pow(r, grid.v(j)); };
    auto width = [&](int j) { const double y = yv(j); return y * y; };

    // Grid derivatives: xi derivative (uniform dxi) and v derivative along
    // columns (uniform dv); theta_v at fixed x needs the chain-rule correction.
    auto d_xi = [&](int j, int i) {
        if (i == 0) return (th(j, 1) - th(j, 0)) / dxi;
        if (i == C) return (th(j, C) - th(j, C - 1)) / dxi;
        return (th(j, i + 1) - th(j, i - 1)) / (2 * dxi);
    };
    auto d_v_col = [&](int j, int i) {
        if (j == 0) return (th(1, i) - th(0, i)) / dv;
        if (j == R) return (th(R, i) - th(R - 1, i)) / dv;
        return (th(j + 1, i) - th(j - 1, i)) / (2 * dv);
    };
    auto theta_x = [&](int j, int i) { return d_xi(j, i) * 2.0 / width(j); };
    auto theta_v_fixed_x = [&](int j, int i) {
        // x = xi r^{2v}/2 -> dx/dv|_xi = xi w ln r
        const double dxdv = grid.xi(i) * width(j) * std::log(r);
        return d_v_col(j, i) - theta_x(j, i) * dxdv;
    };

    auto trap_v = [&](const std::function<double(int)>& g) {
        double s = 0.5 * (g(0) + g(R));
        for (int j = 1; j < R; ++j) s += g(j);
        return s * dv;
    };
    auto trap_y = [&](const std::function<double(int)>& g) {
        // nodes y_j descending from 1 to r
        double s = 0.0;
        for (int j = 0; j < R; ++j) s += 0.5 * (g(j) + g(j + 1)) * (yv(j) - yv(j + 1));
        return s;
    };
    auto trap_xi = [&](int j, const std::function<double(int)>& g) {
        double s = 0.5 * (g(0) + g(C));
        for (int i = 1; i < C; ++i) s += g(i);
        return s * dxi;
    };

    EnergyIdentityResiduals res;

    // (1) boundary square and (2) boundary mean identities, per side.
    for (int side = 0; side < 2; ++side) {
        const int i = side == 0 ? C : 0;
        auto phi_side = [&](int j) { return scale_factor(yv(j), params) * th(j, i); };
        const double lhs_sq = trap_y([&](int j) {
            const double y = yv(j);
            return phi_side(j) * phi_side(j) * (eps / t) * std::sqrt(1 + eps * eps * y * y);
        });
        const double rhs_sq = trap_v([&](int j) {
            const double y = yv(j);
            return th(j, i) * th(j, i) * std::sqrt(1 + eps * eps * y * y);
        });
        res.square += std::abs(lhs_sq - rhs_sq);

        const double lhs_mean = trap_y([&](int j) {
            const double y = yv(j);
            return phi_side(j) * (eps / t) * std::sqrt(1 + eps * eps * y * y);
        });
        const double rhs_mean = std::sqrt(L) * std::sqrt(eps) / std::sqrt(t) *
                                trap_v([&](int j) {
                                    const double y = yv(j);
                                    return std::pow(r, grid.v(j) / 2) * th(j, i) *
                                           std::sqrt(1 + eps * eps * y * y);
                                });
        res.mean += std::abs(lhs_mean - rhs_mean);
    }

    // (3) gradient identity. LHS integrates (phi_x^2/eps + eps phi_y^2) dxdy
    // in the paper chart; RHS is the rectangle form.
    const double lhs_grad = trap_v([&](int j) {
        const double y = yv(j);
        const double w = width(j);
        const double jac = 0.5 * w * y * L;  // |d(x,y)/d(xi,v)|
        return trap_xi(j, [&](int i) {
            const double c = scale_factor(y, params);
            const double phx = c * theta_x(j, i);
            const double phy = -c / y * (0.5 * th(j, i) + theta_v_fixed_x(j, i) / L);
            return (phx * phx / eps + eps * phy * phy) * jac;
        });
    });
    const double rhs_grad =
        t * (trap_v([&](int j) {
                 const double w = width(j);
                 return 0.5 * w / (eps * eps) * trap_xi(j, [&](int i) {
                            const double tx = theta_x(j, i);
                            return tx * tx;
                        });
             }) +
             trap_v([&](int j) {
                 return 0.5 * trap_xi(j, [&](int i) {
                            const double g = 0.5 * th(j, i) + theta_v_fixed_x(j, i) / L;
                            return g * g;
                        });
             }));
    res.gradient = std::abs(lhs_grad - rhs_grad);
    return res;
}

EnergyIdentityResiduals energy_identity_residuals(const std::function<double(double, double)>& theta,
                                                  const std::function<double(double, double)>& theta_x,
                                                  const std::function<double(double, double)>& theta_v,
                                                  const GlueParams& params, int panels) {
    const double r = params.r();
    const double L = params.log_one_over_r();
    const double eps = params.epsilon;
    const double t = params.t;

    auto v_of_y = [&](double y) { return std::log(y) / std::log(r); };

    // Composite Gauss in y over panels geometric in y (uniform in v), and in
    // v over uniform panels: two distinct quadrature routes of equal integrals.
    auto integrate_y = [&](const std::function<double(double)>& g) {
        double sum = 0.0;
        for (int k = 0; k < panels; ++k) {
            const double ya = std::pow(r, static_cast<double>(k + 1) / panels);
            const double yb = std::pow(r, static_cast<double>(k) / panels);
            sum += integrate(g, ya, yb, 1e-15, 8);
        }
        return sum;
    };
    auto integrate_v = [&](const std::function<double(double)>& g) {
        double sum = 0.0;
        for (int k = 0; k < panels; ++k)
            sum += integrate(g, static_cast<double>(k) / panels, static_cast<double>(k + 1) / panels,
                             1e-15, 8);
        return sum;
    };

    EnergyIdentityResiduals res;
    for (int side = 0; side < 2; ++side) {
        const double sgn = side == 0 ? 1.0 : -1.0;
        auto edge_x = [&](double y) { return sgn * 0.5 * y * y; };
        const double lhs_sq = integrate_y([&](double y) {
            const double ph = scale_factor(y, params) * theta(edge_x(y), v_of_y(y));
            return ph * ph * (eps / t) * std::sqrt(1 + eps * eps * y * y);
        });
        const double rhs_sq = integrate_v([&](double v) {
            const double w = std::pow(r, 2 * v);
            const double th = theta(sgn * 0.5 * w, v);
            return th * th * std::sqrt(1 + eps * eps * w);
        });
        res.square += std::abs(lhs_sq - rhs_sq);

        const double lhs_mean = integrate_y([&](double y) {
            return scale_factor(y, params) * theta(edge_x(y), v_of_y(y)) * (eps / t) *
                   std::sqrt(1 + eps * eps * y * y);
        });
        const double rhs_mean = std::sqrt(L) * std::sqrt(eps) / std::sqrt(t) *
                                integrate_v([&](double v) {
                                    const double w = std::pow(r, 2 * v);
                                    return std::pow(r, v / 2) * theta(sgn * 0.5 * w, v) *
                                           std::sqrt(1 + eps * eps * w);
                                });
        res.mean += std::abs(lhs_mean - rhs_mean);
    }

    const double lhs_grad = integrate_y([&](double y) {
        const double c = scale_factor(y, params);
        const double v = v_of_y(y);
        return integrate(
            [&](double x) {
                const double phx = c * theta_x(x, v);
                const double phy = -c / y * (0.5 * theta(x, v) + theta_v(x, v) / L);
                return phx * phx / eps + eps * phy * phy;
            },
            -0.5 * y * y, 0.5 * y * y, 1e-16, 6);
    });
    const double rhs_grad =
        t * integrate_v([&](double v) {
            const double w = std::pow(r, 2 * v);
            const double inner_x = integrate(
                [&](double x) {
                    const double tx = theta_x(x, v);
                    return tx * tx;
                },
                -0.5 * w, 0.5 * w, 1e-16, 6);
            const double inner_mean = integrate(
                                          [&](double x) {
                                              const double g = 0.5 * theta(x, v) + theta_v(x, v) / L;
                                              return g * g;
                                          },
                                          -0.5 * w, 0.5 * w, 1e-16, 6) /
                                      w;
            return inner_x / (eps * eps) + inner_mean;
        });
    res.gradient = std::abs(lhs_grad - rhs_grad);
    return res;
}

// The O() terms of the bounds are relative smallness factors; the reported
// error scales carry the eigenvalue magnitude of the branch they perturb
// (the boundary is normalized to unit length, so sigma sets the only scale).
UpperBoundFirst upper_bound_first(const GlueParams& params, double sigma_star) {
    const double L = params.log_one_over_r();
    const double eps = params.epsilon;
    UpperBoundFirst out;
    out.branch_star = sigma_star;
    out.branch_cusp = params.t / 8.0 + params.t * kPi * kPi / (2.0 * L * L);
    out.err_scale_star = out.branch_star * (eps / (L * L) + eps * eps);
    out.err_scale_cusp = out.branch_cusp * (eps / (L * L * L) + eps * eps);
    if (out.branch_star <= out.branch_cusp) {
        out.bound = out.branch_star;
        out.err_scale = out.err_scale_star;
    } else {
        out.bound = out.branch_cusp;
        out.err_scale = out.err_scale_cusp;
    }
    return out;
}

UpperBoundKplus1 upper_bound_Kplus1(const GlueParams& params, double sigma_star) {
    const double L = params.log_one_over_r();
    const double eps = params.epsilon;
    UpperBoundKplus1 out;
    out.value = std::max(sigma_star, params.t / 8.0 + params.t * kPi * kPi / (2.0 * L * L));
    out.err_scale = out.value * (eps / L + std::sqrt(eps) / std::pow(L, 1.5) + eps * eps);
    return out;
}

ExpansionSigma expansion_sigma(const ExpansionInput& input) {
    if (!(input.c0 > 0.0) || input.c0 > 1.0) throw Error("expansion: c0 must lie in (0,1]");
    const double L = input.params.log_one_over_r();
    const double eps = input.params.epsilon;
    // Recover the truncation exponent from L = eps^{-alpha} when r was set directly.
    const double alpha = input.params.r_value ? std::log(L) / std::log(1.0 / eps) : input.params.alpha;
    ExpansionSigma out;
    out.value = input.params.t * (1.0 / 8.0 + kPi * kPi / (2.0 * L * L) -
                                  (input.c1 / input.c0) * kPi / (L * L));
    const double logeps = std::log(1.0 / eps);
    out.err_scale = input.params.t * (std::pow(eps, 0.5 * (3.0 + alpha)) * logeps * logeps * logeps /
                                          (input.c0 * input.c0 * input.c0) +
                                      std::pow(eps, 1.0 + alpha));
    return out;
}

ExpansionTheta expansion_theta(const std::vector<double>& v_grid, const ExpansionInput& input) {
    if (!(input.c0 > 0.0)) throw Error("expansion: c0 must be positive");
    const double q = input.c1 / input.c0;
    ExpansionTheta out;
    out.theta_bar.reserve(v_grid.size());
    out.theta_bar_v.reserve(v_grid.size());
    for (double v : v_grid) {
        out.theta_bar.push_back(input.c0 * (model::f(v) + q * model::f1(v) + q * q * model::f2(v)));
        out.theta_bar_v.push_back(
            input.c0 * (model::f_prime(v) + q * model::f1_prime(v) + q * q * model::f2_prime(v)));
    }
    return out;
}

}  // namespace steklov
