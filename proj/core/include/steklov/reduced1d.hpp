#pragma once

#include <optional>
#include <vector>

#include "steklov/geometry.hpp"
#include "steklov/spectrum.hpp"

namespace steklov {

// End conditions of the reduced operator. nullopt = homogeneous Dirichlet;
// a value beta adds the Robin spring beta*w(end)^2 to the energy
// (w'(0) = beta w(0), resp. -w'(1) = beta w(1)).
struct ReducedBC {
    std::optional<double> robin0;  // v = 0, the p0 end
    std::optional<double> robin1;  // v = 1, the p1 end

    static ReducedBC dirichlet_dirichlet() { return {}; }
    static ReducedBC dirichlet_robin(double beta0) { return {beta0, std::nullopt}; }
};

struct ReducedOptions {
    int grid_points = 1024;           // number of panels of the v grid
    bool epsilon_correction = true;   // keep the sqrt(1+eps^2 r^{2v}) weight
};

// Discretized thin-part state: profiles of theta_bar and theta_bar_v on a v
// grid, the eigenvalue, the mass/boundary scalars, and diagnostics.
struct ReducedState {
    GlueParams params;
    std::vector<double> grid;
    std::vector<double> theta_bar;
    std::vector<double> theta_bar_v;
    double sigma = 0.0;
    double c0 = 1.0;   // sqrt of the thin boundary mass
    double c1 = 0.0;   // theta_bar(0)
    double delta_eps = 0.0;      // thick-part energy defect (0 for standalone solves)
    double b_eps = 0.0;          // (eps/pi) * mean y-derivative at the top
    double mu_norm_bound = 0.0;  // L2 bound on the horizontal deviation

    double thin_mass() const;    // 2 int theta_bar^2 sqrt(1+eps^2 r^{2v}) dv
    double thin_energy() const;  // t int (theta_bar/2 + theta_bar_v/ln(1/r))^2 dv
};

// Lowest eigenpairs of -w'' = ln(r)^2 [ (2 sigma/t - 1/4)
//   + (2 sigma/t)(sqrt(1+eps^2 r^{2v}) - 1) ] w on [0,1], as the linear
// pencil (-d^2/dv^2 + L^2/4) w = sigma (2L^2/t) sqrt(1+eps^2 r^{2v}) w.
// Profiles are normalized to unit thin mass (c0 = 1).
std::vector<ReducedState> solve_reduced(const GlueParams& params, const ReducedBC& bc,
                                        int count = 3, const ReducedOptions& opts = {});

// Closed form of the truncated (eps-correction dropped) Dirichlet model:
// sigma_k = t/8 + t k^2 pi^2 / (2 ln(r)^2).
double reduced_dirichlet_sigma(const GlueParams& params, int mode);

// Thin-part state measured from a glued-mesh eigenfunction: horizontal means
// of the transformed eigenfunction over the cusp grid rows.
ReducedState reduced_state_from_fem(const GlueResult& glued, const SteklovSpectrum& spectrum,
                                    int eigen_index);

// Mode choice for the combined test function: among nonzero modes 2..K+1 pick
// one with thin mass >= 1/(4K), largest thin mass as tie-break.
struct SecondModeChoice {
    int mode = -1;  // index l, counting nonzero eigenvalues (sigma^l = eigenvalues[l])
    double thin_mass = 0.0;
    bool meets_threshold = false;
};
SecondModeChoice select_second_mode(const GlueResult& glued, const SteklovSpectrum& spectrum, int K);

// Combined test function Psi = u^l + gamma u^1 with gamma = -d1/c1; evaluates
// the A/B split of the improved Rayleigh bound. Throws DegenerateC1 when
// |c1| <= 1e-12.
struct CombinedTestResult {
    double gamma = 0.0;
    double leading = 0.0;  // (gamma^2 sigma^1 + sigma^l) / (1 + gamma^2)
    double A = 0.0;        // (gamma^2 s1 + sl) thinmass(Psi) - (gamma^2+1) thin-energy(Psi)
    double B = 0.0;        // gamma^2 + 1 - thinmass(Psi)
    double improved_bound = 0.0;
    double single_bound = 0.0;  // (sigma^1 - E_1)/(1 - M_1), the one-function bound
    double thin_mass_combined = 0.0;
};
CombinedTestResult combined_test_function(const ReducedState& first, const ReducedState& second);

}  // namespace steklov
