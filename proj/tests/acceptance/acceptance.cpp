// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is 1 if any criterion fails. An optional argument runs a single criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sectorhomog/cell_problems.hpp"
#include "sectorhomog/config.hpp"
#include "sectorhomog/div_extension.hpp"
#include "sectorhomog/error.hpp"
#include "sectorhomog/experiments.hpp"
#include "sectorhomog/metrics.hpp"
#include "sectorhomog/sector_correctors.hpp"
#include "sectorhomog/two_scale.hpp"

using namespace sectorhomog;

namespace {

const double omega_ref = 1.95 * pi;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double rho(int n, double omega = omega_ref) { return n * pi / omega; }

double max_entry(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

RunConfig reference_setup()
{
    RunConfig c;  // default coefficient: rotated exp-sine cell, normalized
    return c;
}

// The three expansions for the gain and error-trend criteria are shared.
std::map<double, ExpansionBundle>& bundles()
{
    static std::map<double, ExpansionBundle> cache;
    return cache;
}

const ExpansionBundle& bundle_at(double eps)
{
    auto& cache = bundles();
    auto it = cache.find(eps);
    if (it == cache.end()) {
        const RunConfig c = reference_setup();
        const CoeffField field = prepared_field(c.coeff, eps);
        const MeshPtr mesh = experiment_mesh(c, eps);
        ExpansionOptions opt;
        opt.N = 1;
        it = cache.emplace(eps, build_expansions(mesh, field, default_forcing(), opt)).first;
    }
    return it->second;
}

Outcome normalization()
{
    const RunConfig c = reference_setup();
    Mat2 raw;
    const CoeffField field = prepared_field(c.coeff, 1.0, &raw);
    const auto cell = solve_cell_problems(field, 256, c.solver);
    const double dev = (cell.abar - Mat2::Identity()).norm();
    return {dev <= 1e-3, "|abar - Id|_F = " + fmt(dev) + " (raw trace/2 " + fmt(0.5 * raw.trace()) + ")"};
}

Outcome checkerboard()
{
    const CoeffField field = CoeffField::checkerboard(4.0, 1.0, 0);
    const auto cell = solve_cell_problems(field, 512);
    // Dykhne: abar = sqrt(sqrt(c) * 1/sqrt(c)) Id = Id
    const double dev = max_entry(cell.abar - Mat2::Identity());
    return {dev <= 1e-2, "max |abar - Id| = " + fmt(dev)};
}

Outcome laminate()
{
    const double a1 = 2.0, a2 = 0.5;
    const CoeffField field = CoeffField::rotated_periodic(laminate_cell(a1, a2), 0.0, 1.0);
    const auto cell = solve_cell_problems(field, 256);
    Mat2 expected = Mat2::Zero();
    expected(0, 0) = 1.0 / (0.5 / a1 + 0.5 / a2);
    expected(1, 1) = 0.5 * (a1 + a2);
    const double dev = max_entry(cell.abar - expected);
    return {dev <= 1e-3, "max |abar - diag(harm, arith)| = " + fmt(dev)};
}

Outcome gamma_recovery()
{
    const SectorDomain domain(omega_ref, 1.0);
    const std::vector<double> c{1.0, 0.3, -0.2};
    std::vector<std::vector<double>> errors;
    for (double h : {0.01, 0.005}) {
        const MeshPtr mesh = make_sector_mesh(domain, h, 2.0);
        const FEFunction u = interpolate(mesh, [&](const Point& x) {
            double s = 0.0;
            for (int n = 1; n <= 3; ++n) {
                const double r = x.norm();
                double t = std::atan2(x.y(), x.x());
                if (t < 0) {
                    t += 2 * pi;
                }
                s += c[n - 1] * std::pow(r, rho(n)) * std::sin(rho(n) * t);
            }
            return s;
        });
        std::vector<double> e;
        for (int n = 1; n <= 3; ++n) {
            e.push_back(std::abs(extract_gamma(u, n, 0.35, 1.0) - c[n - 1]));
        }
        errors.push_back(e);
    }
    bool ok = true;
    std::ostringstream d;
    for (int n = 0; n < 3; ++n) {
        ok = ok && errors[1][n] <= 5e-3 && errors[1][n] <= 0.5 * errors[0][n];
        d << "n=" << n + 1 << ": " << fmt(errors[0][n]) << " -> " << fmt(errors[1][n]) << "  ";
    }
    return {ok, d.str()};
}

Outcome remainder_scaling()
{
    const SectorDomain domain(omega_ref, 1.0);
    const MeshPtr mesh = make_sector_mesh(domain, 0.005, 2.0);
    const FEFunction u = solve_arc_problem(mesh, CoeffField::identity(), random_arc_data(omega_ref, 1));
    const auto gamma = extract_gammas(u, 1, 0.35, domain.outer_radius());
    const FEFunction reg = build_u_reg(u, gamma, CutoffBump(0.35));
    const auto radii = log_spaced(0.01, 0.1, 8);
    std::vector<double> l2;
    for (const auto& row : growth_profile(reg, radii)) {
        l2.push_back(row.shell_l2);
    }
    const auto fit = loglog_slope(radii, l2);
    const double target = rho(2);
    return {std::abs(fit.slope - target) <= 0.1,
            "slope " + fmt(fit.slope) + " +- " + fmt(fit.half_width) + ", target " + fmt(target) + ", gamma_1 " +
                fmt(gamma[0])};
}

Outcome gain()
{
    const double eps = 0.05;
    const auto& b = bundle_at(eps);
    const auto radii = dyadic_radii(1, 8);
    const auto report = gain_report(gain_rows(b, radii), std::ldexp(1.0, -8), 0.5);
    bool all_above_one = true;
    bool inner_above_five = true;
    double min_gain = 1e300;
    double inner_min = 1e300;
    for (const auto& r : report.rows) {
        all_above_one = all_above_one && r.gain >= 1.0;
        min_gain = std::min(min_gain, r.gain);
        if (r.R <= 0.02) {
            inner_above_five = inner_above_five && r.gain > 5.0;
            inner_min = std::min(inner_min, r.gain);
        }
    }
    const double s = report.slope_gain.slope;
    const bool slope_ok = s >= -0.85 && s <= -0.35;
    return {all_above_one && inner_above_five && slope_ok,
            std::string("(a) min gain ") + fmt(min_gain) + (all_above_one ? " ok" : " FAIL") + "; (b) min gain R<=0.02 " +
                fmt(inner_min) + (inner_above_five ? " ok" : " FAIL") + "; (c) slope " + fmt(s) + " +- " +
                fmt(report.slope_gain.half_width) + (slope_ok ? " ok" : " FAIL")};
}

Outcome error_trend()
{
    std::vector<double> errs;
    for (double eps : {0.2, 0.1, 0.05}) {
        errs.push_back(summarize(bundle_at(eps)).energy_err_hybrid);
    }
    const double f1 = errs[0] / errs[1];
    const double f2 = errs[1] / errs[2];
    return {f1 >= 1.6 && f2 >= 1.6, "energy errors " + fmt(errs[0]) + ", " + fmt(errs[1]) + ", " + fmt(errs[2]) +
                                        "; factors " + fmt(f1) + ", " + fmt(f2)};
}

Outcome corrector_growth()
{
    const double eps = 0.05;
    const RunConfig c = reference_setup();
    const CoeffField field = prepared_field(c.coeff, eps);
    const MeshPtr mesh = experiment_mesh(c, eps);
    const FEFunction phi = solve_corner_corrector(mesh, field, 1, c.solver);
    const auto radii = log_spaced(4.0 * eps, 0.5, 8);
    std::vector<double> l2;
    for (const auto& row : growth_profile(phi, radii)) {
        l2.push_back(row.shell_l2);
    }
    const auto fit = loglog_slope(radii, l2);
    const double lo = rho(1) - 1.15, hi = rho(1) - 0.75;
    return {fit.slope >= lo && fit.slope <= hi,
            "slope " + fmt(fit.slope) + " +- " + fmt(fit.half_width) + " in [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

Outcome excess_decay()
{
    const SectorDomain domain(omega_ref, 1.0);
    const auto radii = log_spaced(0.01, 0.5, 12);
    bool ok = true;
    std::ostringstream d;
    {
        // u = tau_1 + tau_2/2 + tau_3/4 truncated after mode N+1
        const MeshPtr mesh = make_sector_mesh(domain, 0.005, 2.0);
        const auto tau = [&](int n) {
            return interpolate(mesh, [n](const Point& x) {
                double t = std::atan2(x.y(), x.x());
                if (t < 0) {
                    t += 2 * pi;
                }
                return std::pow(x.norm(), rho(n)) * std::sin(rho(n) * t);
            });
        };
        std::vector<FEFunction> basis;
        FEFunction u(mesh);
        for (int N = 0; N <= 2; ++N) {
            u += std::ldexp(1.0, -N) * tau(N + 1);
            const auto rep = excess_decay_of(u, N, basis, radii, 0.0, 1e300);
            basis.push_back(tau(N + 1));
            const double target = 2.0 * (rho(N + 1) - 1.0);
            const bool pass = std::abs(rep.fit.slope - target) <= 0.05;
            ok = ok && pass;
            d << "Id N=" << N << ": " << fmt(rep.fit.slope) << " vs " << fmt(target) << (pass ? "" : " FAIL") << "; ";
        }
    }
    {
        const double eps = 0.05;
        const RunConfig c = reference_setup();
        ExcessDecayOptions opt;
        opt.N = 0;
        opt.radii = radii;
        opt.fit_min = 2.0 * eps;
        opt.fit_max = 0.5;
        const auto rep = excess_decay_experiment(experiment_mesh(c, eps), prepared_field(c.coeff, eps), opt);
        const double bound = 2.0 * (rho(1) - 1.0) + 0.3;
        const bool pass = rep.fit.slope <= bound;
        ok = ok && pass;
        d << "periodic N=0: " << fmt(rep.fit.slope) << " <= " << fmt(bound) << (pass ? "" : " FAIL");
    }
    return {ok, d.str()};
}

Outcome div_extension()
{
    const std::vector<double> radii{0.1, 0.25, 0.5, 1.0};
    const Point x0 = 0.6 * Point(std::cos(0.3 * omega_ref), std::sin(0.3 * omega_ref));
    // rotated gradient of a Gaussian bump: div-free
    const auto bump = [x0](const Point& p) -> Vec2 {
        const Vec2 d = p - x0;
        const double g = std::exp(-d.squaredNorm());
        return Vec2(2.0 * d.y() * g, -2.0 * d.x() * g);
    };
    const ExtendedField rotated = extend(PolarField(polar_sampler(bump), omega_ref));
    const ExtendedField vortex = extend(PolarField([](double r, double) { return PolarVector{0.0, 1.0 / r}; }, omega_ref));
    const ExtendedField source = extend(PolarField([](double, double) { return PolarVector{1.0, 0.0}; }, omega_ref));

    double flux = 0.0, seam = 0.0, div_free = 0.0;
    for (const auto* f : {&rotated, &vortex}) {
        for (const auto& row : flux_check(*f, radii, 4096)) {
            flux = std::max(flux, std::abs(row.flux));
        }
        const auto s = seam_check(*f, radii);
        seam = std::max({seam, s.omega_jump, s.zero_jump});
        div_free = std::max(div_free, divergence_report(*f, 0.1, 1.0, 32, 4096).relative);
    }
    const double detected = divergence_report(source, 0.1, 1.0, 32, 4096).relative;
    const double threshold = 1e-2;
    const bool ok = flux <= 1e-6 && seam == 0.0 && div_free < threshold && detected > threshold;
    return {ok, "max flux " + fmt(flux) + ", seam jump " + fmt(seam) + ", relative divergence " + fmt(div_free) +
                    " (div-free) vs " + fmt(detected) + " (source)"};
}

Outcome degenerate()
{
    const SectorDomain domain(omega_ref, 1.0);
    const MeshPtr mesh = make_sector_mesh(domain, 0.02, 2.0);
    ExpansionOptions opt;
    opt.N = 2;
    const auto b = build_expansions(mesh, CoeffField::identity(), default_forcing(), opt);
    double corr = 0.0;
    for (const auto& p : b.correctors.dirichlet) {
        corr = std::max(corr, p.max_abs());
    }
    for (const auto& p : b.correctors.corner) {
        corr = std::max(corr, p.max_abs());
    }
    const double scale = b.u_bar.max_abs();
    const double d_eps = (b.u_eps - b.u_bar).max_abs();
    const double d_cl = (b.classical - b.u_bar).max_abs();
    const double d_hy = (b.hybrid - b.u_bar).max_abs();
    double err = 0.0;
    for (std::size_t e = 0; e < b.errors.classical.size(); ++e) {
        err = std::max({err, b.errors.classical[e].norm(), b.errors.hybrid[e].norm()});
    }
    const double tol = 1e-10;
    const bool ok = corr <= tol * scale && d_eps <= tol * scale && d_cl <= tol * scale && d_hy <= tol * scale &&
                    err <= tol;
    return {ok, "max |corrector| " + fmt(corr) + ", |u_eps - u_bar| " + fmt(d_eps) + ", |classical - u_bar| " +
                    fmt(d_cl) + ", |hybrid - u_bar| " + fmt(d_hy) + ", max |grad error| " + fmt(err)};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"homogenized-normalization", normalization},
        {"checkerboard-duality", checkerboard},
        {"laminate-means", laminate},
        {"gamma-recovery", gamma_recovery},
        {"remainder-scaling", remainder_scaling},
        {"gain-reproduction", gain},
        {"error-rate-trend", error_trend},
        {"corner-corrector-growth", corrector_growth},
        {"excess-decay", excess_decay},
        {"div-free-extension", div_extension},
        {"degenerate-identity", degenerate},
    };
    const std::string only = argc > 1 ? argv[1] : "";
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        if (!only.empty() && only != name) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const Error& e) {
            o = {false, std::string("error (") + std::string(to_string(e.kind())) + "): " + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s [%.1fs] %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
