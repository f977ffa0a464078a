#include "sectorhomog/sector_correctors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "sectorhomog/error.hpp"
#include "sectorhomog/singular_basis.hpp"

namespace sectorhomog {

void check_resolution(const TriMesh& mesh, const CoeffField& field, double cells_per_epsilon)
{
    if (field.is_constant()) {
        return;
    }
    const double limit = field.epsilon() / cells_per_epsilon;
    if (mesh.max_edge_length() > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "mesh does not resolve the coefficient: longest edge " << mesh.max_edge_length() << " > epsilon/"
            << cells_per_epsilon << " = " << limit;
        throw Error(ErrorKind::Resolution, msg.str());
    }
}

MeshPtr resolved_sector_mesh(const SectorDomain& domain, double epsilon, double grading_exponent,
                             double cells_per_epsilon)
{
    if (!(epsilon > 0.0) || !(cells_per_epsilon > 0.0)) {
        throw Error(ErrorKind::Config, "epsilon and cells per epsilon must be positive");
    }
    const double limit = epsilon / cells_per_epsilon;
    // the longest edges are the diagonals of the outermost layer, about sqrt(2) g h long
    double h = limit / (std::sqrt(2.0) * std::max(1.0, grading_exponent));
    for (int attempt = 0; attempt < 20; ++attempt) {
        auto mesh = make_sector_mesh(domain, h, grading_exponent);
        if (mesh->max_edge_length() <= limit) {
            return mesh;
        }
        h *= 0.98 * limit / mesh->max_edge_length();
    }
    throw Error(ErrorKind::Resolution, "could not build a mesh resolving epsilon");
}

namespace {

FEFunction solve_with_load(const MeshPtr& mesh, const CoeffField& field, const VectorFunction& g,
                           const SolverOptions& options, CgReport* report)
{
    check_resolution(*mesh, field);
    auto system = dirichlet_system(*mesh, assemble_stiffness(*mesh, field), assemble_load_div(*mesh, g));
    return solve_cg(mesh, system, options, report);
}

}  // namespace

// Loads use (a - Id) in place of a: the Id part tests to zero against H^1_0 functions
// (div e_i = 0, and tau_n is harmonic), and this way a = Id gives an exactly zero system.
FEFunction solve_dirichlet_corrector(const MeshPtr& mesh, const CoeffField& field, int i,
                                     const SolverOptions& options, CgReport* report)
{
    if (i != 0 && i != 1) {
        throw Error(ErrorKind::Config, "corrector direction must be 0 or 1");
    }
    const VectorFunction g = [&field, i](const Point& x) -> Vec2 {
        Vec2 v = field(x).col(i);
        v[i] -= 1.0;
        return v;
    };
    return solve_with_load(mesh, field, g, options, report);
}

FEFunction solve_corner_corrector(const MeshPtr& mesh, const CoeffField& field, int n, const SolverOptions& options,
                                  CgReport* report)
{
    const SingularFunction tau(n, mesh->domain().omega());
    const VectorFunction g = [&field, &tau](const Point& x) -> Vec2 {
        const Vec2 grad = tau.eval(x).gradient;
        return field(x) * grad - grad;
    };
    return solve_with_load(mesh, field, g, options, report);
}

CorrectorSet solve_corrector_set(const MeshPtr& mesh, const CoeffField& field, int num_corner,
                                 const SolverOptions& options)
{
    CorrectorSet set;
    set.epsilon = field.epsilon();
    for (int i = 0; i < 2; ++i) {
        CgReport rep;
        set.dirichlet.push_back(solve_dirichlet_corrector(mesh, field, i, options, &rep));
        set.residual_norms.push_back(rep.relative_residual);
    }
    for (int n = 1; n <= num_corner; ++n) {
        CgReport rep;
        set.corner.push_back(solve_corner_corrector(mesh, field, n, options, &rep));
        set.residual_norms.push_back(rep.relative_residual);
    }
    return set;
}

std::vector<GrowthRow> growth_profile(const FEFunction& u, const std::vector<double>& shell_radii)
{
    const auto grad = gradient_p0(u);
    std::vector<GrowthRow> rows;
    rows.reserve(shell_radii.size());
    for (double R : shell_radii) {
        const auto shell = shell_elements(u.mesh(), R);
        rows.push_back({R, l2_norm_on(u, shell, true), energy_seminorm_on(u.mesh(), shell, grad, true)});
    }
    return rows;
}

void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows)
{
    out << "R,shell_l2,shell_energy\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.R, r.shell_l2, r.shell_energy);
        out << buf;
    }
}

AnsatzCheckResult ansatz_residual_check(const TriMesh& mesh, const CoeffField& field, const Mat2& abar,
                                        const CorrectorPullback& correctors, const VectorFunction& f,
                                        const MatrixFunction& jacobian, const AnsatzCheckOptions& options)
{
    const auto& reg = options.region;
    const double omega = mesh.domain().omega();
    const double R = mesh.domain().outer_radius();
    const double t0 = reg.theta_min_fraction * omega;
    const double t1 = reg.theta_max_fraction * omega;
    const double margin = reg.margin;

    auto inside = [&](const Point& x) {
        const double r = x.norm();
        if (r < std::max(reg.r_min, margin) || r > std::min(reg.r_max, R - margin)) {
            return false;
        }
        const double t = polar_angle(x);
        if (t < t0 || t > t1) {
            return false;
        }
        // distance to the two edge rays
        const double d_lower = (t < 0.5 * pi) ? r * std::sin(t) : r;
        const double d_upper = (omega - t < 0.5 * pi) ? r * std::sin(omega - t) : r;
        return std::min(d_lower, d_upper) >= margin;
    };

    std::vector<std::uint8_t> test(mesh.num_vertices(), 0);
    const auto& boundary = mesh.boundary_vertex_mask();
    std::size_t count = 0;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (!boundary[v] && inside(mesh.vertices()[v])) {
            test[v] = 1;
            ++count;
        }
    }
    if (count == 0) {
        throw Error(ErrorKind::EmptyRegion, "no interior test nodes in the ansatz region");
    }

    const double period = field.period() > 0.0 ? field.period() : R;
    const double samples = options.samples_per_period > 0.0 ? options.samples_per_period : 2.0 * correctors.cell_grid();
    const double sub_h = period / samples;
    const Mat2 J = (Mat2() << 0.0, 1.0, -1.0, 0.0).finished();

    std::vector<double> res(mesh.num_vertices(), 0.0), ref(mesh.num_vertices(), 0.0);
    const auto& verts = mesh.vertices();
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.triangles()[e];
        if (!test[t[0]] && !test[t[1]] && !test[t[2]]) {
            continue;
        }
        const Point p0 = verts[t[0]], p1 = verts[t[1]], p2 = verts[t[2]];
        const double hT = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
        const int m = std::max(1, static_cast<int>(std::ceil(hT / sub_h)));
        const double sub_area = mesh.geometry(e).area / (m * m);

        Vec2 X = Vec2::Zero(), B = Vec2::Zero();
        auto accumulate = [&](const Point& a, const Point& b, const Point& c) {
            for (const auto& bq : quadrature::bary) {
                const Point x = bq[0] * a + bq[1] * b + bq[2] * c;
                const Mat2 ax = field(x);
                const Vec2 fx = f(x);
                const Mat2 Df = jacobian(x);
                Vec2 ref_term = ax * fx;
                Vec2 term = ax * fx - abar * fx;
                for (int i = 0; i < 2; ++i) {
                    const Vec2 grad_fi = Df.row(i).transpose();
                    const double phi = correctors.phi(i, x);
                    const Vec2 aphi_grad = ax * correctors.grad_phi(i, x);
                    ref_term += fx[i] * aphi_grad + phi * (ax * grad_fi);
                    // a grad(phi_i f_i) - a phi_i grad f_i
                    term += fx[i] * aphi_grad;
                    if (options.include_sigma) {
                        term += correctors.sigma(i, x) * (J * grad_fi);
                    }
                }
                X += quadrature::weight * sub_area * term;
                B += quadrature::weight * sub_area * ref_term;
            }
        };
        // uniform m x m subdivision in barycentric coordinates
        const Vec2 du = (p1 - p0) / m, dv = (p2 - p0) / m;
        for (int a = 0; a < m; ++a) {
            for (int b = 0; a + b < m; ++b) {
                const Point q = p0 + a * du + b * dv;
                accumulate(q, q + du, q + dv);
                if (a + b + 1 < m) {
                    accumulate(q + du, q + du + dv, q + dv);
                }
            }
        }
        const auto& gl = mesh.geometry(e).grad_lambda;
        for (int k = 0; k < 3; ++k) {
            res[t[k]] += gl[k].dot(X);
            ref[t[k]] += gl[k].dot(B);
        }
    }
    double rn = 0.0, bn = 0.0;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (test[v]) {
            rn += res[v] * res[v];
            bn += ref[v] * ref[v];
        }
    }
    rn = std::sqrt(rn);
    bn = std::sqrt(bn);
    return {bn > 0.0 ? rn / bn : rn, rn, bn, count};
}

}  // namespace sectorhomog
