#include "sectorhomog/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "sectorhomog/error.hpp"
#include "sectorhomog/sector_correctors.hpp"
#include "sectorhomog/singular_basis.hpp"

namespace sectorhomog {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void put(std::ostream& out, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

SlopeFit loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t min_points)
{
    if (xs.size() != ys.size()) {
        throw Error(ErrorKind::Fit, "slope fit needs equally many x and y values");
    }
    const std::size_t n = xs.size();
    if (n < std::max<std::size_t>(min_points, 2)) {
        std::ostringstream msg;
        msg << "slope fit needs at least " << std::max<std::size_t>(min_points, 2) << " points, got " << n;
        throw Error(ErrorKind::Fit, msg.str());
    }
    std::vector<double> X(n), Y(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(xs[k] > 0.0) || !(ys[k] > 0.0) || !std::isfinite(xs[k]) || !std::isfinite(ys[k])) {
            throw Error(ErrorKind::Fit, "slope fit needs positive finite data");
        }
        X[k] = std::log(xs[k]);
        Y[k] = std::log(ys[k]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += X[k];
        my += Y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (X[k] - mx) * (X[k] - mx);
        sxy += (X[k] - mx) * (Y[k] - my);
    }
    if (!(sxx > 0.0)) {
        throw Error(ErrorKind::Fit, "slope fit needs distinct x values");
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double half = 0.0;
    if (n > 2) {
        double ssr = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double r = Y[k] - intercept - slope * X[k];
            ssr += r * r;
        }
        const double se = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
        const boost::math::students_t dist(static_cast<double>(n - 2));
        half = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
    }
    return {slope, intercept, half, n};
}

std::vector<double> dyadic_radii(int k_min, int k_max)
{
    std::vector<double> r;
    for (int k = k_min; k <= k_max; ++k) {
        r.push_back(std::ldexp(1.0, -k));
    }
    return r;
}

std::vector<double> log_spaced(double a, double b, std::size_t count)
{
    if (!(a > 0.0) || !(b > 0.0) || count == 0) {
        throw Error(ErrorKind::Config, "log spacing needs positive end points and a positive count");
    }
    if (count == 1) {
        return {a};
    }
    std::vector<double> v(count);
    const double la = std::log(a), lb = std::log(b);
    for (std::size_t k = 0; k < count; ++k) {
        v[k] = std::exp(la + (lb - la) * static_cast<double>(k) / static_cast<double>(count - 1));
    }
    v.front() = a;
    v.back() = b;
    return v;
}

std::vector<double> shell_error_curve(const TriMesh& mesh, const std::vector<Vec2>& err,
                                      const std::vector<double>& radii)
{
    std::vector<double> E;
    E.reserve(radii.size());
    for (double R : radii) {
        E.push_back(energy_seminorm_on(mesh, shell_elements(mesh, R), err, true));
    }
    return E;
}

ExcessValue excess(const FEFunction& u, double r, int N, const std::vector<FEFunction>& basis)
{
    if (N < 0 || static_cast<std::size_t>(N) > basis.size()) {
        throw Error(ErrorKind::Config, "excess needs N corrected basis functions");
    }
    const TriMesh& mesh = u.mesh();
    const auto elems = disk_elements(mesh, r);
    if (elems.empty()) {
        throw Error(ErrorKind::EmptyRegion, "no elements in the disk for the excess");
    }
    const auto gu = gradient_p0(u);
    std::vector<std::vector<Vec2>> gb;
    for (int n = 0; n < N; ++n) {
        gb.push_back(gradient_p0(basis[n]));
    }
    double area = 0.0;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
    for (std::size_t e : elems) {
        const double a = mesh.geometry(e).area;
        area += a;
        for (int n = 0; n < N; ++n) {
            c[n] += a * gb[n][e].dot(gu[e]);
            for (int m = 0; m < N; ++m) {
                G(n, m) += a * gb[n][e].dot(gb[m][e]);
            }
        }
    }
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(N);
    if (N > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
        const double lmax = eig.eigenvalues().maxCoeff();
        const double lmin = eig.eigenvalues().minCoeff();
        if (!(lmax > 0.0) || lmin <= 1e-12 * lmax) {
            std::ostringstream msg;
            msg << "corrected basis is degenerate on D_r for r = " << r << " (Gram eigenvalues " << lmin << ", "
                << lmax << ")";
            throw Error(ErrorKind::Rank, msg.str());
        }
        gamma = G.ldlt().solve(c);
    }
    double value = 0.0;
    for (std::size_t e : elems) {
        Vec2 d = gu[e];
        for (int n = 0; n < N; ++n) {
            d -= gamma[n] * gb[n][e];
        }
        value += mesh.geometry(e).area * d.squaredNorm();
    }
    return {value / area, std::vector<double>(gamma.data(), gamma.data() + N)};
}

void write_excess_csv(std::ostream& out, const std::vector<ExcessRow>& rows, int N)
{
    out << "r,excess";
    for (int n = 1; n <= N; ++n) {
        out << ",gamma_" << n;
    }
    out << '\n';
    for (const auto& row : rows) {
        put(out, row.r);
        out << ',';
        put(out, row.excess.value);
        for (double g : row.excess.gamma) {
            out << ',';
            put(out, g);
        }
        out << '\n';
    }
}

double ArcData::operator()(double theta) const
{
    double s = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
        s += xi[k] * std::sin(static_cast<double>(k + 1) * pi * theta / omega);
    }
    return s;
}

ArcData random_arc_data(double omega, std::uint64_t seed, int modes)
{
    if (modes < 1) {
        throw Error(ErrorKind::Config, "arc data needs at least one mode");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ArcData d{omega, {1.0}};
    for (int k = 2; k <= modes; ++k) {
        d.xi.push_back(normal(rng) / (static_cast<double>(k) * k));
    }
    return d;
}

FEFunction solve_arc_problem(const MeshPtr& mesh, const CoeffField& field, const ArcData& data,
                             const SolverOptions& options)
{
    check_resolution(*mesh, field);
    auto system = dirichlet_system(*mesh, assemble_stiffness(*mesh, field),
                                   std::vector<double>(mesh->num_vertices(), 0.0));
    const double R = mesh->domain().outer_radius();
    for (std::size_t v = 0; v < mesh->num_vertices(); ++v) {
        const Point& x = mesh->vertices()[v];
        if (system.dirichlet_mask[v] && x.norm() >= R * (1.0 - 1e-9)) {
            system.dirichlet_values[v] = data(polar_angle(x));
        }
    }
    return solve_cg(mesh, system, options);
}

ExcessDecayReport excess_decay_of(const FEFunction& u, int N, const std::vector<FEFunction>& basis,
                                  const std::vector<double>& radii, double fit_min, double fit_max)
{
    ExcessDecayReport report;
    std::vector<double> xs, ys;
    for (double r : radii) {
        report.rows.push_back({r, excess(u, r, N, basis)});
        if (r >= fit_min && r <= fit_max) {
            xs.push_back(r);
            ys.push_back(report.rows.back().excess.value);
        }
    }
    report.fit = loglog_slope(xs, ys);
    const SectorDomain& d = u.mesh().domain();
    report.predicted = 2.0 * (d.rho_bar(N + 1) - 1.0);
    return report;
}

ExcessDecayReport excess_decay_experiment(const MeshPtr& mesh, const CoeffField& field,
                                          const ExcessDecayOptions& options)
{
    const double omega = mesh->domain().omega();
    const auto data = random_arc_data(omega, options.boundary_seed);
    const FEFunction u = solve_arc_problem(mesh, field, data, options.solver);
    std::vector<FEFunction> basis;
    for (int n = 1; n <= options.N; ++n) {
        const SingularFunction tau(n, omega);
        FEFunction b = interpolate(mesh, [&tau](const Point& x) { return tau.value(x); });
        b += solve_corner_corrector(mesh, field, n, options.solver);
        basis.push_back(std::move(b));
    }
    return excess_decay_of(u, options.N, basis, options.radii, options.fit_min, options.fit_max);
}

std::vector<GainRow> gain_rows(const ExpansionBundle& bundle, const std::vector<double>& radii)
{
    const TriMesh& mesh = bundle.u_eps.mesh();
    const auto E0 = shell_error_curve(mesh, bundle.errors.classical, radii);
    const auto E1 = shell_error_curve(mesh, bundle.errors.hybrid, radii);
    std::vector<GainRow> rows;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        rows.push_back({bundle.correctors.epsilon, radii[k], E0[k], E1[k], E0[k] > 0.0 && E1[k] > 0.0 ? E0[k] / E1[k] : nan});
    }
    return rows;
}

GainReport gain_report(std::vector<GainRow> rows, double fit_min, double fit_max)
{
    GainReport report;
    std::vector<double> R, g, e0, e1;
    for (const auto& row : rows) {
        if (row.R >= fit_min && row.R <= fit_max) {
            R.push_back(row.R);
            g.push_back(row.gain);
            e0.push_back(row.E0);
            e1.push_back(row.E1);
        }
    }
    if (R.size() < 4) {
        throw Error(ErrorKind::Fit, "gain fit needs at least 4 shells in the window");
    }
    auto fit = [&R](const std::vector<double>& y) {
        for (double v : y) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                return SlopeFit{nan, nan, nan, y.size()};
            }
        }
        return loglog_slope(R, y);
    };
    report.slope_gain = fit(g);
    report.slope_E0 = fit(e0);
    report.slope_E1 = fit(e1);
    report.rows = std::move(rows);
    return report;
}

void write_gain_csv(std::ostream& out, const std::vector<GainRow>& rows)
{
    out << "epsilon,R,E0,E1,gain\n";
    for (const auto& r : rows) {
        put(out, r.epsilon);
        for (double v : {r.R, r.E0, r.E1, r.gain}) {
            out << ',';
            put(out, v);
        }
        out << '\n';
    }
}

}  // namespace sectorhomog
