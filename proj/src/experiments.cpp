#include "sectorhomog/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "sectorhomog/cell_problems.hpp"
#include "sectorhomog/csv.hpp"
#include "sectorhomog/div_extension.hpp"
#include "sectorhomog/error.hpp"
#include "sectorhomog/metrics.hpp"
#include "sectorhomog/sector_correctors.hpp"
#include "sectorhomog/singular_basis.hpp"
#include "sectorhomog/two_scale.hpp"

namespace sectorhomog {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

json fit_json(const SlopeFit& f)
{
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"slope", num(f.slope)}, {"half_width", num(f.half_width)}, {"points", f.points}};
}

class Timer {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Context {
    const RunConfig& config;
    fs::path dir;
    std::ostream& log;
    RunResult& result;

    std::ofstream csv(const std::string& name, const CsvMeta& meta = {})
    {
        result.files.push_back(dir / name);
        return open_csv(dir / name, config.hash, meta);
    }
};

void write_fits_header(std::ostream& out) { out << "epsilon,quantity,slope,half_width,points\n"; }

void write_fit_row(std::ostream& out, double eps, const std::string& what, const SlopeFit& f)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%zu\n", eps, what.c_str(), f.slope, f.half_width, f.points);
    out << buf;
}

void run_cell(Context& ctx)
{
    const auto& c = ctx.config;
    const int n = c.coeff.cell_grid;
    CoeffField field = make_field(c.coeff, 1.0);
    CellCorrectors cc = solve_cell_problems(field, n, c.solver);
    ctx.log << "cell: grid " << n << ", abar = [" << cc.abar(0, 0) << ", " << cc.abar(0, 1) << "; " << cc.abar(1, 0)
            << ", " << cc.abar(1, 1) << "]\n";
    const Mat2 raw = cc.abar;
    if (c.coeff.normalize && !field.is_constant()) {
        field = normalize_to_identity(field, raw);
        cc = solve_cell_problems(field, n, c.solver);
        ctx.log << "cell: normalized abar deviation " << (cc.abar - Mat2::Identity()).cwiseAbs().maxCoeff() << "\n";
    }
    const CsvMeta meta = {{"grid_n", std::to_string(n)},
                          {"coeff", field.describe()},
                          {"phi_residual_1", fmt(cc.phi_reports[0].relative_residual)},
                          {"phi_residual_2", fmt(cc.phi_reports[1].relative_residual)}};
    auto write_abar = [&](const std::string& name, const Mat2& a) {
        auto out = ctx.csv(name, meta);
        out << "row,col,value\n";
        char buf[96];
        for (int r = 0; r < 2; ++r) {
            for (int s = 0; s < 2; ++s) {
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", r + 1, s + 1, a(r, s));
                out << buf;
            }
        }
    };
    write_abar("abar.csv", cc.abar);
    write_abar("abar_raw.csv", raw);
    for (int i = 0; i < 2; ++i) {
        auto phi = ctx.csv("phi_" + std::to_string(i + 1) + ".csv", meta);
        write_periodic_field_csv(phi, cc.phi[i]);
        auto sig = ctx.csv("sigma_" + std::to_string(i + 1) + ".csv", meta);
        write_periodic_field_csv(sig, cc.sigma[i]);
    }
    const auto rows = sublinearity_report(cc, c.experiment.sublinearity_radii);
    {
        auto out = ctx.csv("sublinearity.csv", meta);
        out << "r,rms\n";
        char buf[96];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.r, r.rms);
            out << buf;
        }
    }
    json s;
    s["abar"] = {{cc.abar(0, 0), cc.abar(0, 1)}, {cc.abar(1, 0), cc.abar(1, 1)}};
    s["abar_raw"] = {{raw(0, 0), raw(0, 1)}, {raw(1, 0), raw(1, 1)}};
    s["abar_deviation_from_identity"] = (cc.abar - Mat2::Identity()).cwiseAbs().maxCoeff();
    s["decomposition_residual"] = {decomposition_residual(field, cc, 0), decomposition_residual(field, cc, 1)};
    s["energy_identity_defect"] = {energy_identity_defect(field, cc, 0), energy_identity_defect(field, cc, 1)};
    ctx.result.summary = s;
}

void run_gain(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& x = c.experiment;
    std::vector<GainRow> all;
    std::vector<ExpansionSummary> summaries;
    auto fits = ctx.csv("fits.csv");
    write_fits_header(fits);
    json per_eps = json::array();
    for (double eps : x.epsilons) {
        Timer t;
        const CoeffField field = prepared_field(c.coeff, eps);
        const MeshPtr mesh = experiment_mesh(c, eps);
        ctx.log << "gain: epsilon " << eps << ", " << mesh->num_vertices() << " nodes, " << mesh->num_elements()
                << " elements\n";
        ExpansionOptions opt;
        opt.N = x.N;
        opt.r0 = x.r0;
        opt.cutoff_expansion = x.cutoff_expansion;
        opt.solver = c.solver;
        const auto bundle = build_expansions(mesh, field, default_forcing(), opt);
        auto rows = gain_rows(bundle, x.radii);
        const auto report = gain_report(rows, x.fit_min, x.fit_max);
        write_fit_row(fits, eps, "gain", report.slope_gain);
        write_fit_row(fits, eps, "E0", report.slope_E0);
        write_fit_row(fits, eps, "E1", report.slope_E1);
        if (x.write_fields) {
            const auto g = recover_gradient_nodal(bundle.u_eps);
            FEFunction magnitude(mesh);
            for (std::size_t i = 0; i < magnitude.size(); ++i) {
                magnitude.set(i, std::hypot(g.dx[i], g.dy[i]));
            }
            const CsvMeta meta = {{"epsilon", fmt(eps)}, {"coeff", field.describe()}};
            auto grad_out = ctx.csv("grad_u_eps" + fmt(eps) + ".csv", meta);
            write_fefunction_csv(grad_out, magnitude);
            auto coeff_out = ctx.csv("coeff_eps" + fmt(eps) + ".csv", meta);
            write_fefunction_csv(coeff_out, interpolate(mesh, [&field](const Point& p) { return field(p)(0, 0); }));
        }
        summaries.push_back(summarize(bundle));
        all.insert(all.end(), rows.begin(), rows.end());
        per_eps.push_back({{"epsilon", eps},
                           {"nodes", mesh->num_vertices()},
                           {"max_edge", mesh->max_edge_length()},
                           {"gamma", bundle.gamma},
                           {"slope_gain", fit_json(report.slope_gain)},
                           {"energy_err_hybrid", summaries.back().energy_err_hybrid},
                           {"energy_err_classical", summaries.back().energy_err_classical}});
        ctx.log << "gain: epsilon " << eps << " done in " << t.seconds() << " s, gain slope "
                << report.slope_gain.slope << "\n";
    }
    {
        auto out = ctx.csv("gain.csv", {{"omega", fmt(c.domain.omega)}});
        write_gain_csv(out, all);
    }
    {
        auto out = ctx.csv("expansions.csv");
        write_expansion_summary_csv(out, summaries);
    }
    ctx.result.summary = {{"runs", per_eps}};
}

void run_growth(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& x = c.experiment;
    auto fits = ctx.csv("fits.csv");
    write_fits_header(fits);
    json per_eps = json::array();
    const double rho = SectorDomain(c.domain.omega, c.domain.R).rho_bar(x.N);
    for (double eps : x.epsilons) {
        const CoeffField field = prepared_field(c.coeff, eps);
        const MeshPtr mesh = experiment_mesh(c, eps);
        ctx.log << "corrector-growth: epsilon " << eps << ", " << mesh->num_vertices() << " nodes\n";
        CgReport rep;
        const FEFunction phi = solve_corner_corrector(mesh, field, x.N, c.solver, &rep);
        const auto radii = log_spaced(x.radii_min_eps * eps, x.fit_max, x.radii_count);
        const auto rows = growth_profile(phi, radii);
        {
            auto out = ctx.csv("growth_eps" + fmt(eps) + ".csv",
                               {{"epsilon", fmt(eps)}, {"n", std::to_string(x.N)}, {"cg_iterations", std::to_string(rep.iterations)}});
            write_growth_csv(out, rows);
        }
        std::vector<double> R, l2;
        for (const auto& r : rows) {
            R.push_back(r.R);
            l2.push_back(r.shell_l2);
        }
        json fj = nullptr;
        if (field.is_constant()) {
            ctx.log << "corrector-growth: constant field, corrector is " << phi.max_abs() << " in max norm\n";
        } else {
            const auto fit = loglog_slope(R, l2);
            write_fit_row(fits, eps, "shell_l2", fit);
            fj = fit_json(fit);
        }
        per_eps.push_back({{"epsilon", eps}, {"slope_shell_l2", fj}, {"target", rho - 1.0}});
    }
    ctx.result.summary = {{"runs", per_eps}};
}

void run_excess(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& x = c.experiment;
    auto fits = ctx.csv("fits.csv");
    write_fits_header(fits);
    json per_eps = json::array();
    for (double eps : x.epsilons) {
        const CoeffField field = prepared_field(c.coeff, eps);
        const MeshPtr mesh = experiment_mesh(c, eps);
        ctx.log << "excess-decay: epsilon " << eps << ", " << mesh->num_vertices() << " nodes\n";
        ExcessDecayOptions opt;
        opt.N = x.N;
        opt.boundary_seed = c.seed;
        opt.radii = x.radii;
        opt.fit_min = x.fit_min_eps * eps;
        opt.fit_max = x.fit_max;
        opt.solver = c.solver;
        const auto rep = excess_decay_experiment(mesh, field, opt);
        {
            auto out = ctx.csv("excess_eps" + fmt(eps) + ".csv",
                               {{"epsilon", fmt(eps)}, {"N", std::to_string(x.N)}, {"boundary_seed", std::to_string(c.seed)}});
            write_excess_csv(out, rep.rows, x.N);
        }
        write_fit_row(fits, eps, "excess", rep.fit);
        per_eps.push_back({{"epsilon", eps}, {"fit", fit_json(rep.fit)}, {"predicted", rep.predicted}});
    }
    ctx.result.summary = {{"runs", per_eps}};
}

void run_gamma(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& x = c.experiment;
    const SectorDomain domain(c.domain.omega, c.domain.R);
    auto out = ctx.csv("gamma.csv", {{"r0", fmt(x.r0)}});
    out << "h,n,exact,recovered,error\n";
    json rows = json::array();
    const int N = static_cast<int>(x.coefficients.size());
    for (double h : x.mesh_sizes) {
        const MeshPtr mesh = make_sector_mesh(domain, h, c.mesh.grading);
        std::vector<SingularFunction> taus;
        for (int n = 1; n <= N; ++n) {
            taus.emplace_back(n, domain.omega());
        }
        const FEFunction u = interpolate(mesh, [&](const Point& p) {
            double s = 0.0;
            for (int n = 0; n < N; ++n) {
                s += x.coefficients[n] * taus[n].value(p);
            }
            return s;
        });
        // a discretely prescribed u_bar has no forcing, so any cutoff inside the domain is valid
        const auto gamma = extract_gammas(u, N, x.r0, domain.outer_radius());
        for (int n = 0; n < N; ++n) {
            char buf[160];
            const double err = std::abs(gamma[n] - x.coefficients[n]);
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g\n", h, n + 1, x.coefficients[n], gamma[n], err);
            out << buf;
            rows.push_back({{"h", h}, {"n", n + 1}, {"error", err}});
        }
        ctx.log << "gamma-recovery: h " << h << ", " << mesh->num_vertices() << " nodes\n";
    }
    ctx.result.summary = {{"rows", rows}};
}

ExtendedField extend_test_field(const std::string& kind, double omega)
{
    if (kind == "vortex") {
        return extend(PolarField([](double r, double) { return PolarVector{0.0, 1.0 / r}; }, omega));
    }
    if (kind == "radial") {
        return extend(PolarField([](double, double) { return PolarVector{1.0, 0.0}; }, omega));
    }
    // rotated gradient of psi(x) = exp(-|x - x0|^2) with x0 inside the sector
    const Point x0 = 0.6 * Point(std::cos(0.3 * omega), std::sin(0.3 * omega));
    auto h = [x0](const Point& p) -> Vec2 {
        const Vec2 d = p - x0;
        const double e = std::exp(-d.squaredNorm());
        const Vec2 g = -2.0 * e * d;
        return {-g.y(), g.x()};
    };
    return extend(PolarField(polar_sampler(h), omega));
}

void run_extend(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& x = c.experiment;
    const ExtendedField field = extend_test_field(x.test_field, c.domain.omega);
    const auto rows = flux_check(field, x.radii, x.n_theta);
    {
        auto out = ctx.csv("flux.csv", {{"n_theta", std::to_string(x.n_theta)}, {"test_field", x.test_field}});
        write_flux_csv(out, rows);
    }
    double max_flux = 0.0;
    for (const auto& r : rows) {
        max_flux = std::max(max_flux, std::abs(r.flux));
    }
    const double r_min = *std::min_element(x.radii.begin(), x.radii.end());
    const double r_max = *std::max_element(x.radii.begin(), x.radii.end());
    const auto div = divergence_report(field, r_min, std::max(r_max, 1.01 * r_min), 64, 1024);
    const auto seam = seam_check(field, x.radii);
    ctx.result.summary = {{"alpha", field.base().alpha()},
                          {"max_abs_flux", max_flux},
                          {"divergence_max", div.max_abs},
                          {"divergence_rms", div.rms},
                          {"divergence_relative", div.relative},
                          {"seam_jump_omega", seam.omega_jump},
                          {"seam_jump_zero", seam.zero_jump}};
    ctx.log << "extend-check: max |flux| " << max_flux << ", max |div| " << div.max_abs << "\n";
}

}  // namespace

CoeffField prepared_field(const CoeffConfig& coeff, double epsilon, Mat2* abar_raw)
{
    CoeffField field = make_field(coeff, epsilon);
    if (abar_raw != nullptr) {
        *abar_raw = Mat2::Identity();
    }
    if (!coeff.normalize || field.is_constant()) {
        return field;
    }
    const CellCorrectors cc = solve_cell_problems(field, coeff.cell_grid);
    if (abar_raw != nullptr) {
        *abar_raw = cc.abar;
    }
    return normalize_to_identity(field, cc.abar);
}

MeshPtr experiment_mesh(const RunConfig& config, double epsilon)
{
    const SectorDomain domain(config.domain.omega, config.domain.R);
    if (config.mesh.h) {
        return make_sector_mesh(domain, *config.mesh.h, config.mesh.grading);
    }
    return resolved_sector_mesh(domain, epsilon, config.mesh.grading, config.mesh.cells_per_epsilon);
}

RunResult run(const RunConfig& config, std::ostream& log)
{
    RunResult result;
    result.directory = fs::path(config.output) / config.hash;
    std::error_code ec;
    fs::create_directories(result.directory, ec);
    if (ec) {
        throw Error(ErrorKind::Io, "cannot create " + result.directory.string() + ": " + ec.message());
    }
    {
        std::ofstream out(result.directory / "config.json");
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write config snapshot");
        }
        out << config.resolved.dump(2) << '\n';
        result.files.push_back(result.directory / "config.json");
    }
    Context ctx{config, result.directory, log, result};
    const auto& kind = config.experiment.kind;
    if (kind == "cell") {
        run_cell(ctx);
    } else if (kind == "gain") {
        run_gain(ctx);
    } else if (kind == "corrector-growth") {
        run_growth(ctx);
    } else if (kind == "excess-decay") {
        run_excess(ctx);
    } else if (kind == "gamma-recovery") {
        run_gamma(ctx);
    } else if (kind == "extend-check") {
        run_extend(ctx);
    } else {
        throw Error(ErrorKind::Config, "unknown experiment '" + kind + "'");
    }
    result.summary["config_hash"] = config.hash;
    result.summary["experiment"] = kind;
    std::ofstream out(result.directory / "summary.json");
    out << result.summary.dump(2) << '\n';
    result.files.push_back(result.directory / "summary.json");
    return result;
}

}  // namespace sectorhomog
