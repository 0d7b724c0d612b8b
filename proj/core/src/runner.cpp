#include "steklov/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "steklov/asymptotics.hpp"
#include "steklov/model_functions.hpp"
#include "steklov/quadrature.hpp"
#include "steklov/shapeopt.hpp"

namespace steklov {

namespace {

namespace fs = std::filesystem;

class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::uint64_t config_hash, const std::vector<std::string>& columns)
        : os_(path) {
        if (!os_) throw Error("cannot open '" + path.string() + "' for writing");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash));
        os_ << "# config_hash=" << buf << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            os_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            os_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

private:
    std::ofstream os_;
};

std::string fmt(double x) { return format_double_17(x); }
std::string fmt(int x) { return std::to_string(x); }

double chart_boundary_length(const Mesh& mesh) {
    double total = 0.0;
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e)
        total += boundary_edge_chart_length(mesh, static_cast<int>(e));
    return total;
}

Mesh build_base_mesh(const RunConfig& cfg, const std::string& shape) {
    if (shape == "disk") return build_disk_mesh(cfg.get_int("geometry", "refinement", 4));
    if (shape == "annulus")
        return build_annulus_mesh(cfg.get_int("geometry", "n_radial", 8),
                                  cfg.get_int("geometry", "n_angular", 48),
                                  cfg.get_double("geometry", "inner", 0.5),
                                  cfg.get_double("geometry", "outer", 1.0));
    if (shape == "square")
        return build_square_mesh(cfg.get_int("geometry", "nx", 16), cfg.get_int("geometry", "ny", 16),
                                 cfg.get_double("geometry", "width", 1.0),
                                 cfg.get_double("geometry", "height", 1.0));
    if (shape == "file") return load_mesh(cfg.require("geometry", "path"));
    throw ConfigError("key [geometry] shape: unknown shape '" + shape + "'");
}

}  // namespace

GlueParams glue_params_from(const RunConfig& cfg, const Mesh& base) {
    GlueParams p;
    p.epsilon = cfg.get_double("glue", "epsilon", 0.1);
    p.alpha = cfg.get_double("glue", "alpha", 0.45);
    if (cfg.has("glue", "r")) p.r_value = cfg.get_double("glue", "r", 0.0);
    p.t = cfg.get_double("glue", "t", 1.0);
    p.flip0 = cfg.get_bool("glue", "flip0", false);
    p.flip1 = cfg.get_bool("glue", "flip1", false);
    p.require_orientable = cfg.get_bool("glue", "require_orientable", false);
    p.cusp_layers = cfg.get_int("glue", "layers", 40);
    p.min_columns = cfg.get_int("glue", "min_columns", 6);
    const double total = chart_boundary_length(base);
    p.p0 = cfg.has("glue", "p0") ? cfg.get_double("glue", "p0", 0.0)
                                 : cfg.get_double("glue", "p0_frac", 0.0) * total;
    p.p1 = cfg.has("glue", "p1") ? cfg.get_double("glue", "p1", 0.0)
                                 : cfg.get_double("glue", "p1_frac", 0.5) * total;
    return p;
}

BuiltGeometry build_geometry(const RunConfig& cfg) {
    const std::string shape = cfg.get("geometry", "shape", "disk");
    BuiltGeometry out;
    if (shape == "cusp") {
        GlueParams p;
        p.epsilon = cfg.get_double("glue", "epsilon", 0.1);
        p.alpha = cfg.get_double("glue", "alpha", 0.45);
        if (cfg.has("glue", "r")) p.r_value = cfg.get_double("glue", "r", 0.0);
        p.t = cfg.get_double("glue", "t", 1.0);
        p.cusp_layers = cfg.get_int("glue", "layers", 40);
        p.min_columns = cfg.get_int("glue", "min_columns", 6);
        out.mesh = build_cusp_mesh(p);
        out.metric = cusp_metric(out.mesh, p);
        return out;
    }
    if (shape == "glued") {
        const std::string base_shape = cfg.get("geometry", "base", "disk");
        Mesh base = build_base_mesh(cfg, base_shape);
        ConformalMetric metric =
            ConformalMetric::constant(base.num_vertices(), cfg.get_double("geometry", "omega", 0.0));
        if (cfg.get_bool("geometry", "normalize_length", true)) {
            const double c = std::log(boundary_length(base, metric));
            for (auto& w : metric.log_factor) w -= c;
        }
        GlueParams p = glue_params_from(cfg, base);
        GlueResult g = glue(base, metric, p);
        out.mesh = g.mesh;
        out.metric = g.metric;
        out.glued = std::move(g);
        return out;
    }
    out.mesh = build_base_mesh(cfg, shape);
    out.metric =
        ConformalMetric::constant(out.mesh.num_vertices(), cfg.get_double("geometry", "omega", 0.0));
    if (cfg.get_bool("geometry", "normalize_length", false)) {
        const double c = std::log(boundary_length(out.mesh, out.metric));
        for (auto& w : out.metric.log_factor) w -= c;
    }
    return out;
}

namespace {

SpectrumOptions solver_options(const RunConfig& cfg) {
    SpectrumOptions opts;
    const std::string mass = cfg.get("solver", "mass", "consistent");
    if (mass == "lumped")
        opts.mass = MassScheme::Lumped;
    else if (mass != "consistent")
        throw ConfigError("key [solver] mass: expected consistent|lumped, got '" + mass + "'");
    const std::string route = cfg.get("solver", "route", "schur");
    if (route == "full")
        opts.route = SpectrumOptions::Route::FullPencil;
    else if (route != "schur")
        throw ConfigError("key [solver] route: expected schur|full, got '" + route + "'");
    opts.cluster_rtol = cfg.get_double("solver", "cluster_rtol", 1e-6);
    return opts;
}

void run_mesh(const RunConfig& cfg, const fs::path& out, RunOutcome& outcome) {
    const BuiltGeometry geo = build_geometry(cfg);
    const fs::path mesh_path = out / "mesh.txt";
    save_mesh(mesh_path.string(), geo.mesh);
    outcome.artifacts.push_back(mesh_path.string());

    const TopologySummary topo = topology_invariants(geo.mesh);
    CsvWriter csv(out / "mesh_summary.csv", cfg.hash(),
                  {"vertices", "triangles", "boundary_edges", "euler_characteristic", "genus",
                   "boundary_components", "orientable", "chart_boundary_length", "metric_boundary_length"});
    csv.row({fmt(geo.mesh.num_vertices()), fmt(geo.mesh.num_triangles()),
             fmt(static_cast<int>(geo.mesh.boundary_edges.size())), fmt(euler_characteristic(geo.mesh)),
             fmt(topo.genus), fmt(topo.boundary_components), topo.orientable ? "1" : "0",
             fmt(chart_boundary_length(geo.mesh)), fmt(boundary_length(geo.mesh, geo.metric))});
    outcome.artifacts.push_back((out / "mesh_summary.csv").string());
}

void run_spectrum(const RunConfig& cfg, const fs::path& out, RunOutcome& outcome) {
    const BuiltGeometry geo = build_geometry(cfg);
    const int count = cfg.get_int("solver", "count", 8);
    const SteklovSpectrum spec = steklov_spectrum(geo.mesh, geo.metric, count, solver_options(cfg));

    CsvWriter csv(out / "spectrum.csv", cfg.hash(),
                  {"index", "sigma", "cluster_id", "boundary_norm_residual"});
    for (int k = 0; k < spec.size(); ++k) {
        int cluster_id = 0;
        for (std::size_t c = 0; c < spec.clusters.size(); ++c)
            if (k >= spec.clusters[c].first && k < spec.clusters[c].second)
                cluster_id = static_cast<int>(c);
        csv.row({fmt(k), fmt(spec.sigma(k)), fmt(cluster_id), fmt(spec.boundary_norm_residuals[static_cast<std::size_t>(k)])});
    }
    outcome.artifacts.push_back((out / "spectrum.csv").string());

    if (cfg.get_bool("solver", "dump_eigenfunctions", false)) {
        std::vector<std::string> cols{"vertex"};
        for (int k = 0; k < spec.size(); ++k) cols.push_back("u" + std::to_string(k));
        CsvWriter ef(out / "eigenfunctions.csv", cfg.hash(), cols);
        for (int v = 0; v < geo.mesh.num_vertices(); ++v) {
            std::vector<std::string> cells{fmt(v)};
            for (int k = 0; k < spec.size(); ++k) cells.push_back(fmt(spec.eigenfunctions(v, k)));
            ef.row(cells);
        }
        outcome.artifacts.push_back((out / "eigenfunctions.csv").string());
    }
}

void run_glue(const RunConfig& cfg, const fs::path& out, RunOutcome& outcome) {
    RunConfig cfg2 = cfg;
    cfg2.set("geometry", "shape", "glued");
    const BuiltGeometry geo = build_geometry(cfg2);
    const GlueResult& g = *geo.glued;

    const fs::path mesh_path = out / "glued_mesh.txt";
    save_mesh(mesh_path.string(), g.mesh);
    outcome.artifacts.push_back(mesh_path.string());

    CsvWriter csv(out / "glue_summary.csv", cfg.hash(),
                  {"genus", "boundary_components", "orientable", "euler_characteristic",
                   "removed_chart_length0", "removed_chart_length1", "removed_metric_length0",
                   "removed_metric_length1", "added_side_metric_length", "boundary_length"});
    csv.row({fmt(g.topology.genus), fmt(g.topology.boundary_components), g.topology.orientable ? "1" : "0",
             fmt(euler_characteristic(g.mesh)), fmt(g.removed_chart_length0), fmt(g.removed_chart_length1),
             fmt(g.removed_metric_length0), fmt(g.removed_metric_length1), fmt(g.added_side_metric_length),
             fmt(boundary_length(g.mesh, g.metric))});
    outcome.artifacts.push_back((out / "glue_summary.csv").string());
}

// One (epsilon, alpha) working point of the reduce experiment.
struct ReduceRow {
    double epsilon, alpha, t;
    double sigma_reduced, sigma_coupled, sigma_fem;
    double c0, c1, gamma, improved_bound;
};

ReduceRow reduce_point(const Mesh& base, const ConformalMetric& metric, GlueParams params,
                       std::optional<double> xi, double tau, int spectrum_count) {
    ReduceRow row{};
    row.epsilon = params.epsilon;
    row.alpha = params.alpha;

    if (xi) {
        MassBalanceOptions mb_opts;
        mb_opts.tau = tau;
        const MassBalanceResult mb = choose_t_for_mass(base, metric, params, *xi, mb_opts);
        params.t = mb.t;
    }
    row.t = params.t;

    row.sigma_reduced = reduced_dirichlet_sigma(params, 1);

    const CoupledResult coupled = coupled_solve(base, metric, params);
    row.sigma_coupled = coupled.sigma;

    const GlueResult glued = glue(base, metric, params);
    const SteklovSpectrum spec = steklov_spectrum(glued.mesh, glued.metric, spectrum_count);
    row.sigma_fem = spec.sigma(1);

    const SteklovSpectrum base_spec = steklov_spectrum(base, metric, 4);
    const int K = base_spec.multiplicity(1);
    const ReducedState first = reduced_state_from_fem(glued, spec, 1);
    row.c0 = first.c0;
    row.c1 = first.c1;
    const SecondModeChoice choice = select_second_mode(glued, spec, K);
    const ReducedState second = reduced_state_from_fem(glued, spec, choice.mode);
    if (std::abs(first.c1) > 1e-12) {
        const CombinedTestResult comb = combined_test_function(first, second);
        row.gamma = comb.gamma;
        row.improved_bound = comb.improved_bound;
    } else {
        row.gamma = std::numeric_limits<double>::quiet_NaN();
        row.improved_bound = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

void run_reduce(const RunConfig& cfg, const fs::path& out, RunOutcome& outcome) {
    RunConfig base_cfg = cfg;
    base_cfg.set("geometry", "shape", cfg.get("geometry", "base", cfg.get("geometry", "shape", "disk")));
    if (base_cfg.get("geometry", "shape", "disk") == "glued")
        throw ConfigError("key [geometry] shape: reduce expects a base shape, not 'glued'");
    if (!cfg.has("geometry", "normalize_length")) base_cfg.set("geometry", "normalize_length", "true");
    const BuiltGeometry geo = build_geometry(base_cfg);

    const std::vector<double> eps_grid = cfg.get_list("sweep", "epsilon", {0.1});
    const std::vector<double> alpha_grid = cfg.get_list("sweep", "alpha", {0.45});
    std::optional<double> xi;
    if (cfg.has("sweep", "xi")) xi = cfg.get_double("sweep", "xi", 0.5);
    const double tau = cfg.get_double("sweep", "tau", 0.0);
    const int count = cfg.get_int("solver", "count", 8);

    CsvWriter csv(out / "reduce.csv", cfg.hash(),
                  {"epsilon", "alpha", "t", "sigma_reduced", "sigma_coupled", "sigma_fem", "c0", "c1",
                   "gamma", "improved_bound"});
    for (double al : alpha_grid)
        for (double ep : eps_grid) {
            GlueParams p = glue_params_from(cfg, geo.mesh);
            p.epsilon = ep;
            p.alpha = al;
            p.r_value.reset();
            const ReduceRow r = reduce_point(geo.mesh, geo.metric, p, xi, tau, count);
            csv.row({fmt(r.epsilon), fmt(r.alpha), fmt(r.t), fmt(r.sigma_reduced), fmt(r.sigma_coupled),
                     fmt(r.sigma_fem), fmt(r.c0), fmt(r.c1), fmt(r.gamma), fmt(r.improved_bound)});
        }
    outcome.artifacts.push_back((out / "reduce.csv").string());
}

void run_verify_asymptotics(const RunConfig& cfg, const fs::path& out, RunOutcome& outcome) {
    RunConfig base_cfg = cfg;
    base_cfg.set("geometry", "shape", cfg.get("geometry", "base", "disk"));
    if (!cfg.has("geometry", "normalize_length")) base_cfg.set("geometry", "normalize_length", "true");
    const BuiltGeometry geo = build_geometry(base_cfg);
    const SteklovSpectrum base_spec = steklov_spectrum(geo.mesh, geo.metric, 4);
    const double sigma_star = base_spec.sigma(1);
    const int K = base_spec.multiplicity(1);

    // Model-function residuals are parameter free; evaluated once.
    double ode_f1 = 0.0, ode_f2 = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = static_cast<double>(i) / 1000;
        const double h = 1e-4;
        auto dd = [&](const std::function<double(double)>& g) {
            const double vv = std::min(std::max(v, 2 * h), 1.0 - 2 * h);
            return (-g(vv + 2 * h) + 16 * g(vv + h) - 30 * g(vv) + 16 * g(vv - h) - g(vv - 2 * h)) /
                   (12 * h * h);
        };
        ode_f1 = std::max(ode_f1, std::abs(-dd(model::f1) - std::pow(std::numbers::pi, 2) * model::f1(v) +
                                           2 * std::numbers::pi * model::f(v)));
        ode_f2 = std::max(ode_f2, std::abs(-dd(model::f2) - std::pow(std::numbers::pi, 2) * model::f2(v) +
                                           2 * std::numbers::pi * model::f1(v)));
    }
    const double orth_ff1 = std::abs(integrate([](double v) { return model::f(v) * model::f1(v); }, 0, 1));
    const double orth_ff2 = std::abs(integrate([](double v) { return model::f(v) * model::f2(v); }, 0, 1) +
                                     0.5 * integrate([](double v) { return model::f1(v) * model::f1(v); }, 0, 1));

    const std::vector<double> eps_grid = cfg.get_list("sweep", "epsilon", {0.2, 0.1, 0.05});
    const std::vector<double> alpha_grid = cfg.get_list("sweep", "alpha", {0.35, 0.4, 0.45});
    const std::vector<double> t_grid = cfg.get_list("sweep", "t", {cfg.get_double("glue", "t", 1.0)});
    const int count = cfg.get_int("solver", "count", 8);

    CsvWriter csv(out / "verify_asymptotics.csv", cfg.hash(),
                  {"epsilon", "alpha", "t", "sigma_star", "branch_star", "branch_cusp", "bound1",
                   "err_scale1", "boundK1", "err_scaleK1", "sigma1_fem", "sigmaK1_fem",
                   "expansion_sigma", "expansion_err_scale", "c0", "c1", "integral_I_residual",
                   "ode_f1_residual", "ode_f2_residual", "orth_ff1", "orth_ff2"});
    for (double al : alpha_grid)
        for (double ep : eps_grid)
            for (double tv : t_grid) {
                GlueParams p = glue_params_from(cfg, geo.mesh);
                p.epsilon = ep;
                p.alpha = al;
                p.r_value.reset();
                p.t = tv;
                const UpperBoundFirst ub1 = upper_bound_first(p, sigma_star);
                const UpperBoundKplus1 ubK = upper_bound_Kplus1(p, sigma_star);

                const GlueResult glued = glue(geo.mesh, geo.metric, p);
                const SteklovSpectrum spec =
                    steklov_spectrum(glued.mesh, glued.metric, std::max(count, K + 2));
                const double sigma1_fem = spec.sigma(1);
                const double sigmaK1_fem = spec.sigma(K + 1);

                const ReducedState first = reduced_state_from_fem(glued, spec, 1);
                ExpansionInput input;
                input.params = p;
                input.c0 = first.c0;
                input.c1 = first.c1;
                const ExpansionSigma exp_sigma = expansion_sigma(input);

                const double iq = integrate([&](double v) {
                    return std::pow(p.r(), v / 2.0) * std::sin(std::numbers::pi * v);
                }, 0.0, 1.0);
                const double i_res = std::abs(integral_I(p.r()) - iq);

                csv.row({fmt(ep), fmt(al), fmt(tv), fmt(sigma_star), fmt(ub1.branch_star),
                         fmt(ub1.branch_cusp), fmt(ub1.bound), fmt(ub1.err_scale), fmt(ubK.value),
                         fmt(ubK.err_scale), fmt(sigma1_fem), fmt(sigmaK1_fem), fmt(exp_sigma.value),
                         fmt(exp_sigma.err_scale), fmt(first.c0), fmt(first.c1), fmt(i_res),
                         fmt(ode_f1), fmt(ode_f2), fmt(orth_ff1), fmt(orth_ff2)});
            }
    outcome.artifacts.push_back((out / "verify_asymptotics.csv").string());
}

void run_optimize(const RunConfig& cfg, const fs::path& out, RunOutcome& outcome) {
    const BuiltGeometry geo = build_geometry(cfg);
    OptimizeOptions opts;
    opts.fourier_modes = cfg.get_int("optimize", "modes", 16);
    opts.max_iterations = cfg.get_int("optimize", "iterations", 400);
    opts.spectrum_count = cfg.get_int("solver", "count", 6);

    const std::uint64_t seed =
        static_cast<std::uint64_t>(cfg.get_double("run", "seed", 0.0));
    const double amplitude = cfg.get_double("optimize", "amplitude", 0.0);
    ConformalMetric init = amplitude > 0.0
                               ? random_fourier_density(geo.mesh, std::max(opts.fourier_modes, 1),
                                                        amplitude, seed)
                               : project_unit_length(geo.mesh, geo.metric);

    const OptimizeResult result = optimize_density(geo.mesh, init, opts);

    CsvWriter hist(out / "history.csv", cfg.hash(), {"iter", "sigma1L", "clustersize", "stepsize"});
    for (const auto& row : result.history)
        hist.row({fmt(row.iteration), fmt(row.sigma1L), fmt(row.cluster_size), fmt(row.step)});
    outcome.artifacts.push_back((out / "history.csv").string());

    CsvWriter dens(out / "density.csv", cfg.hash(), {"vertex", "log_density"});
    for (int v : boundary_vertex_list(geo.mesh)) dens.row({fmt(v), fmt(result.density[v])});
    outcome.artifacts.push_back((out / "density.csv").string());

    const SteklovSpectrum spec = steklov_spectrum(geo.mesh, result.density, opts.spectrum_count);
    const Immersion im = extract_immersion(geo.mesh, result.density, spec);
    std::vector<std::string> cols{"vertex"};
    for (int j = 0; j < im.N; ++j) cols.push_back("phi" + std::to_string(j));
    CsvWriter imcsv(out / "immersion.csv", cfg.hash(), cols);
    for (int v = 0; v < geo.mesh.num_vertices(); ++v) {
        std::vector<std::string> cells{fmt(v)};
        for (int j = 0; j < im.N; ++j) cells.push_back(fmt(im.coordinates(v, j)));
        imcsv.row(cells);
    }
    outcome.artifacts.push_back((out / "immersion.csv").string());
}

void run_sweep(const RunConfig& cfg, const fs::path& out, RunOutcome& outcome) {
    RunConfig base_cfg = cfg;
    base_cfg.set("geometry", "shape", cfg.get("geometry", "base", "disk"));
    if (!cfg.has("geometry", "normalize_length")) base_cfg.set("geometry", "normalize_length", "true");
    const BuiltGeometry geo = build_geometry(base_cfg);
    const SteklovSpectrum base_spec = steklov_spectrum(geo.mesh, geo.metric, 4);
    const double sigma_star = base_spec.sigma(1);
    const int K = base_spec.multiplicity(1);

    const std::vector<double> eps_grid = cfg.get_list("sweep", "epsilon", {0.1});
    const std::vector<double> alpha_grid = cfg.get_list("sweep", "alpha", {0.45});
    const std::vector<double> t_grid = cfg.get_list("sweep", "t", {cfg.get_double("glue", "t", 1.0)});
    if (eps_grid.empty() || alpha_grid.empty() || t_grid.empty())
        throw ConfigError("key [sweep]: sweep grids must be nonempty");

    struct Point {
        double eps, alpha, t;
    };
    std::vector<Point> points;
    for (double al : alpha_grid)
        for (double ep : eps_grid)
            for (double tv : t_grid) points.push_back({ep, al, tv});

    struct Row {
        Point p;
        double sigma1, sigmaK1, sigma1L, bound1, boundK1, thin_mass;
    };
    std::vector<Row> rows(points.size());

    const int threads = std::max(1, cfg.get_int("run", "threads", 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            const Point pt = points[i];
            GlueParams p = glue_params_from(cfg, geo.mesh);
            p.epsilon = pt.eps;
            p.alpha = pt.alpha;
            p.r_value.reset();
            p.t = pt.t;
            const GlueResult glued = glue(geo.mesh, geo.metric, p);
            const SteklovSpectrum spec = steklov_spectrum(glued.mesh, glued.metric, K + 3);
            Row row;
            row.p = pt;
            row.sigma1 = spec.sigma(1);
            row.sigmaK1 = spec.sigma(K + 1);
            row.sigma1L = spec.sigma(1) * spec.boundary_length;
            row.bound1 = upper_bound_first(p, sigma_star).bound;
            row.boundK1 = upper_bound_Kplus1(p, sigma_star).value;
            row.thin_mass = thin_mass_fraction(glued, spec);
            rows[i] = row;
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    CsvWriter csv(out / "sweep.csv", cfg.hash(),
                  {"row", "epsilon", "alpha", "t", "sigma1", "sigmaK1", "sigma1L", "bound1", "boundK1",
                   "thin_mass"});
    double mean_sigma1 = 0.0, max_gap1 = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        csv.row({fmt(static_cast<int>(i)), fmt(r.p.eps), fmt(r.p.alpha), fmt(r.p.t), fmt(r.sigma1),
                 fmt(r.sigmaK1), fmt(r.sigma1L), fmt(r.bound1), fmt(r.boundK1), fmt(r.thin_mass)});
        mean_sigma1 += r.sigma1 / static_cast<double>(rows.size());
        max_gap1 = std::max(max_gap1, r.sigma1 - r.bound1);
    }
    csv.row({"summary", "", "", "", fmt(mean_sigma1), "", "", "", "", fmt(max_gap1)});
    outcome.artifacts.push_back((out / "sweep.csv").string());
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
    RunOutcome outcome;
    try {
        const std::string kind = cfg.require("run", "kind");
        const fs::path out = cfg.get("run", "out", "out");
        fs::create_directories(out);

        if (kind == "mesh")
            run_mesh(cfg, out, outcome);
        else if (kind == "spectrum")
            run_spectrum(cfg, out, outcome);
        else if (kind == "glue")
            run_glue(cfg, out, outcome);
        else if (kind == "reduce")
            run_reduce(cfg, out, outcome);
        else if (kind == "verify-asymptotics")
            run_verify_asymptotics(cfg, out, outcome);
        else if (kind == "optimize")
            run_optimize(cfg, out, outcome);
        else if (kind == "sweep")
            run_sweep(cfg, out, outcome);
        else
            throw ConfigError("key [run] kind: unknown experiment kind '" + kind + "'");
    } catch (const ConfigError& e) {
        outcome.exit_code = 2;
        outcome.message = e.what();
    } catch (const Error& e) {
        outcome.exit_code = 3;
        outcome.message = e.what();
    }
    return outcome;
}

}  // namespace steklov
