#include "sectorhomog/two_scale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

ScalarFunction default_forcing()
{
    return [](const Point& x) {
        const double r = x.norm();
        return smoothstep((r - 0.4) / 0.1) * smoothstep((0.8 - r) / 0.1);
    };
}

SolutionPair solve_pair(const MeshPtr& mesh, const CoeffField& field, const ScalarFunction& f,
                        const SolverOptions& options)
{
    check_resolution(*mesh, field);
    const auto load = assemble_load_scalar(*mesh, f);
    CgReport eps_rep, bar_rep;
    auto eps_sys = dirichlet_system(*mesh, assemble_stiffness(*mesh, field), load);
    FEFunction u_eps = solve_cg(mesh, eps_sys, options, &eps_rep);
    auto bar_sys = dirichlet_system(*mesh, assemble_stiffness(*mesh, CoeffField::identity()), load);
    FEFunction u_bar = solve_cg(mesh, bar_sys, options, &bar_rep);
    return {std::move(u_eps), std::move(u_bar), std::move(eps_rep), std::move(bar_rep)};
}

double extract_gamma(const FEFunction& u_bar, int n, double r0, double inner_radius)
{
    if (!(r0 > 0.0) || !(r0 < inner_radius)) {
        std::ostringstream msg;
        msg << "cutoff radius " << r0 << " must lie in (0, " << inner_radius << ")";
        throw Error(ErrorKind::InvalidCutoff, msg.str());
    }
    const TriMesh& mesh = u_bar.mesh();
    const SingularFunction dual(n, mesh.domain().omega(), true);
    const CutoffBump eta(r0);
    double sum = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& g = mesh.geometry(e);
        // the integrand vanishes unless the element meets the band r0/2 < r < r0
        double rmin = 1e300, rmax = 0.0;
        for (auto v : mesh.triangles()[e]) {
            const double r = mesh.vertices()[v].norm();
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        const auto& t = mesh.triangles()[e];
        const auto& p = mesh.vertices();
        const double diam = std::max({(p[t[1]] - p[t[0]]).norm(), (p[t[2]] - p[t[1]]).norm(),
                                      (p[t[0]] - p[t[2]]).norm()});
        if (rmax <= 0.5 * r0 || rmin - diam >= r0) {
            continue;
        }
        const auto q = quadrature_points(mesh, e);
        for (int k = 0; k < 3; ++k) {
            const auto c = eta.eval(q[k]);
            if (c.gradient.squaredNorm() == 0.0 && c.laplacian == 0.0) {
                continue;
            }
            const auto d = dual.eval(q[k]);
            const double integrand = 2.0 * d.gradient.dot(c.gradient) + d.value * c.laplacian;
            sum += quadrature::weight * g.area * u_bar.value_at(e, quadrature::bary[k]) * integrand;
        }
    }
    return -sum / (n * pi);
}

std::vector<double> extract_gammas(const FEFunction& u_bar, int N, double r0, double inner_radius)
{
    std::vector<double> gamma;
    for (int n = 1; n <= N; ++n) {
        gamma.push_back(extract_gamma(u_bar, n, r0, inner_radius));
    }
    return gamma;
}

FEFunction build_u_reg(const FEFunction& u_bar, const std::vector<double>& gamma,
                       const std::optional<CutoffBump>& chi)
{
    const TriMesh& mesh = u_bar.mesh();
    const double omega = mesh.domain().omega();
    FEFunction u = u_bar;
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        if (gamma[k] == 0.0) {
            continue;
        }
        const SingularFunction tau(static_cast<int>(k) + 1, omega);
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
            const Point& x = mesh.vertices()[v];
            const double c = chi ? chi->value(x) : 1.0;
            if (c != 0.0) {
                u.set(v, u[v] - gamma[k] * tau.value(x) * c);
            }
        }
    }
    return u;
}

FEFunction classical_expansion(const FEFunction& u_bar, const std::vector<FEFunction>& dirichlet)
{
    if (dirichlet.size() != 2) {
        throw Error(ErrorKind::Config, "classical expansion needs both Dirichlet correctors");
    }
    const auto grad = recover_gradient_nodal(u_bar);
    FEFunction out = u_bar;
    for (std::size_t v = 0; v < out.size(); ++v) {
        out.set(v, out[v] + dirichlet[0][v] * grad.dx[v] + dirichlet[1][v] * grad.dy[v]);
    }
    return out;
}

FEFunction hybrid_expansion(const FEFunction& u_reg, const std::vector<double>& gamma,
                            const std::vector<FEFunction>& dirichlet, const std::vector<FEFunction>& corner,
                            const std::optional<CutoffBump>& chi)
{
    if (corner.size() < gamma.size()) {
        throw Error(ErrorKind::Config, "hybrid expansion needs one corner corrector per coefficient");
    }
    FEFunction out = classical_expansion(u_reg, dirichlet);
    const TriMesh& mesh = u_reg.mesh();
    const double omega = mesh.domain().omega();
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        if (gamma[k] == 0.0) {
            continue;
        }
        const SingularFunction tau(static_cast<int>(k) + 1, omega);
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
            const Point& x = mesh.vertices()[v];
            const auto c = chi ? chi->eval(x) : CutoffValue{1.0, Vec2::Zero(), 0.0};
            if (c.value == 0.0) {
                continue;
            }
            const double t = tau.value(x);
            const double commutator = dirichlet[0][v] * c.gradient.x() + dirichlet[1][v] * c.gradient.y();
            out.set(v, out[v] + gamma[k] * ((t + corner[k][v]) * c.value + t * commutator));
        }
    }
    return out;
}

ErrorFields error_fields(const FEFunction& u_eps, const FEFunction& classical, const FEFunction& hybrid)
{
    return {gradient_p0(u_eps - classical), gradient_p0(u_eps - hybrid)};
}

ExpansionBundle build_expansions(const MeshPtr& mesh, const CoeffField& field, const ScalarFunction& f,
                                 const ExpansionOptions& options)
{
    if (options.N < 0) {
        throw Error(ErrorKind::Config, "number of corner terms must be non-negative");
    }
    auto pair = solve_pair(mesh, field, f, options.solver);
    auto gamma = extract_gammas(pair.u_bar, options.N, options.r0);
    std::optional<CutoffBump> chi;
    if (options.cutoff_expansion) {
        chi.emplace(options.r0);
    }
    auto u_reg = build_u_reg(pair.u_bar, gamma, chi);
    auto correctors = solve_corrector_set(mesh, field, options.N, options.solver);
    correctors.residual_norms.push_back(pair.eps_report.relative_residual);
    correctors.residual_norms.push_back(pair.bar_report.relative_residual);
    auto classical = classical_expansion(pair.u_bar, correctors.dirichlet);
    auto hybrid = hybrid_expansion(u_reg, gamma, correctors.dirichlet, correctors.corner, chi);
    auto errors = error_fields(pair.u_eps, classical, hybrid);
    return {std::move(pair.u_eps), std::move(pair.u_bar), std::move(gamma),    std::move(u_reg),
            std::move(classical),  std::move(hybrid),     std::move(errors),   std::move(correctors)};
}

ExpansionSummary summarize(const ExpansionBundle& b)
{
    const TriMesh& mesh = b.u_eps.mesh();
    std::vector<std::size_t> all(mesh.num_elements());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return {b.correctors.epsilon,
            b.gamma,
            l2_norm_on(b.u_eps - b.classical, all, false),
            l2_norm_on(b.u_eps - b.hybrid, all, false),
            energy_seminorm(mesh, b.errors.classical),
            energy_seminorm(mesh, b.errors.hybrid)};
}

void write_expansion_summary_csv(std::ostream& out, const std::vector<ExpansionSummary>& rows)
{
    const std::size_t N = rows.empty() ? 0 : rows.front().gamma.size();
    out << "epsilon";
    for (std::size_t n = 1; n <= N; ++n) {
        out << ",gamma_" << n;
    }
    out << ",l2_err_classical,l2_err_hybrid,energy_err_classical,energy_err_hybrid\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (const auto& r : rows) {
        put(r.epsilon);
        for (double g : r.gamma) {
            out << ',';
            put(g);
        }
        for (double v : {r.l2_err_classical, r.l2_err_hybrid, r.energy_err_classical, r.energy_err_hybrid}) {
            out << ',';
            put(v);
        }
        out << '\n';
    }
}

}  // namespace sectorhomog
