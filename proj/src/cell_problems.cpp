#include "sectorhomog/cell_problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

namespace {

// Triangle corners as (di, dj) offsets from the square's lower-left node.
constexpr int lower_offsets[3][2] = {{0, 0}, {1, 0}, {1, 1}};
constexpr int upper_offsets[3][2] = {{0, 0}, {1, 1}, {0, 1}};

int wrap(int k, int n) { return ((k % n) + n) % n; }

struct CellLocation {
    int i, j;
    bool upper;
    std::array<double, 3> bary;
};

CellLocation locate_in_cell(const Point& y, int n)
{
    const double yx = y.x() - std::floor(y.x());
    const double yy = y.y() - std::floor(y.y());
    const int i = std::min(n - 1, static_cast<int>(yx * n));
    const int j = std::min(n - 1, static_cast<int>(yy * n));
    const double fx = std::clamp(yx * n - i, 0.0, 1.0);
    const double fy = std::clamp(yy * n - j, 0.0, 1.0);
    if (fx >= fy) {
        return {i, j, false, {1.0 - fx, fx - fy, fy}};
    }
    return {i, j, true, {1.0 - fy, fx, fy - fx}};
}

std::array<std::array<Vec2, 3>, 2> reference_gradients(int n)
{
    const double s = n;
    return {{{Vec2(-s, 0.0), Vec2(s, -s), Vec2(0.0, s)}, {Vec2(0.0, -s), Vec2(s, 0.0), Vec2(-s, s)}}};
}

// Coefficient averaged over the quadrature points of every element.
std::vector<Mat2> element_coefficients(const PeriodicGrid& grid, const CoeffField& field)
{
    std::vector<Mat2> a(grid.num_elements());
    const auto ne = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t e = 0; e < ne; ++e) {
        Mat2 s = Mat2::Zero();
        for (const auto& q : grid.quadrature_points(static_cast<std::size_t>(e))) {
            s += field.cell_value(q);
        }
        a[e] = quadrature::weight * s;
    }
    return a;
}

CsrMatrix periodic_stiffness(const PeriodicGrid& grid, const std::vector<Mat2>* coeff)
{
    CsrMatrix A = p1_pattern(grid.num_nodes(), grid.triangles());
    const double area = grid.element_area();
    for (std::size_t e = 0; e < grid.num_elements(); ++e) {
        const auto& t = grid.triangles()[e];
        const auto& g = grid.grad_lambda(e);
        const Mat2 a = coeff ? (*coeff)[e] : Mat2::Identity();
        for (int i = 0; i < 3; ++i) {
            const Vec2 ag = area * (a * g[i]);
            for (int j = 0; j < 3; ++j) {
                A.ref(t[j], t[i]) += g[j].dot(ag);
            }
        }
    }
    return A;
}

Vec2 grad_on(const PeriodicGrid& grid, const std::vector<double>& v, std::size_t e)
{
    const auto& t = grid.triangles()[e];
    const auto& g = grid.grad_lambda(e);
    return v[t[0]] * g[0] + v[t[1]] * g[1] + v[t[2]] * g[2];
}

// Nodal average of an elementwise field (all elements have equal area).
std::vector<double> recover_nodal(const PeriodicGrid& grid, const std::vector<double>& elem)
{
    std::vector<double> nodal(grid.num_nodes(), 0.0);
    std::vector<int> count(grid.num_nodes(), 0);
    for (std::size_t e = 0; e < grid.num_elements(); ++e) {
        for (auto v : grid.triangles()[e]) {
            nodal[v] += elem[e];
            ++count[v];
        }
    }
    for (std::size_t k = 0; k < nodal.size(); ++k) {
        nodal[k] /= count[k];
    }
    return nodal;
}

void check_grid(int grid_n)
{
    if (grid_n < 32) {
        throw Error(ErrorKind::Config, "cell grid must have at least 32 nodes per direction");
    }
}

}  // namespace

PeriodicGrid::PeriodicGrid(int n) : n_(n)
{
    if (n < 3) {
        throw Error(ErrorKind::Config, "periodic grid needs at least 3 nodes per direction");
    }
    triangles_.reserve(num_elements());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (const auto* offs : {lower_offsets, upper_offsets}) {
                Triangle t;
                for (int k = 0; k < 3; ++k) {
                    t[k] = node(i + offs[k][0], j + offs[k][1]);
                }
                triangles_.push_back(t);
            }
        }
    }
    grads_ = reference_gradients(n);
}

std::size_t PeriodicGrid::node(int i, int j) const
{
    return static_cast<std::size_t>(wrap(i, n_)) * n_ + wrap(j, n_);
}

std::array<Point, 3> PeriodicGrid::element_vertices(std::size_t e) const
{
    const std::size_t sq = e / 2;
    const int i = static_cast<int>(sq / n_);
    const int j = static_cast<int>(sq % n_);
    const auto& offs = (e % 2 == 0) ? lower_offsets : upper_offsets;
    std::array<Point, 3> p;
    for (int k = 0; k < 3; ++k) {
        p[k] = Point(i + offs[k][0], j + offs[k][1]) * h();
    }
    return p;
}

std::array<Point, 3> PeriodicGrid::quadrature_points(std::size_t e) const
{
    const auto v = element_vertices(e);
    std::array<Point, 3> q;
    for (int k = 0; k < 3; ++k) {
        const auto& b = quadrature::bary[k];
        q[k] = b[0] * v[0] + b[1] * v[1] + b[2] * v[2];
    }
    return q;
}

std::size_t PeriodicGrid::locate(const Point& y, std::array<double, 3>& bary) const
{
    const auto loc = locate_in_cell(y, n_);
    bary = loc.bary;
    return 2 * (static_cast<std::size_t>(loc.i) * n_ + loc.j) + (loc.upper ? 1 : 0);
}

PeriodicField::PeriodicField(int n, std::vector<double> values) : n_(n), values_(std::move(values))
{
    if (n < 1 || values_.size() != static_cast<std::size_t>(n) * n) {
        throw Error(ErrorKind::Config, "periodic field size does not match the grid");
    }
}

double PeriodicField::at(int i, int j) const
{
    return values_[static_cast<std::size_t>(wrap(i, n_)) * n_ + wrap(j, n_)];
}

double PeriodicField::value(const Point& y) const
{
    const auto loc = locate_in_cell(y, n_);
    const auto& offs = loc.upper ? upper_offsets : lower_offsets;
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        s += loc.bary[k] * at(loc.i + offs[k][0], loc.j + offs[k][1]);
    }
    return s;
}

Vec2 PeriodicField::element_gradient(std::size_t e) const
{
    const std::size_t sq = e / 2;
    const int i = static_cast<int>(sq / n_);
    const int j = static_cast<int>(sq % n_);
    const double v00 = at(i, j);
    const double v11 = at(i + 1, j + 1);
    if (e % 2 == 0) {
        const double v10 = at(i + 1, j);
        return Vec2((v10 - v00) * n_, (v11 - v10) * n_);
    }
    const double v01 = at(i, j + 1);
    return Vec2((v11 - v01) * n_, (v01 - v00) * n_);
}

Vec2 PeriodicField::gradient(const Point& y) const
{
    const auto loc = locate_in_cell(y, n_);
    return element_gradient(2 * (static_cast<std::size_t>(loc.i) * n_ + loc.j) + (loc.upper ? 1 : 0));
}

double PeriodicField::mean() const
{
    double s = 0.0;
    for (double v : values_) {
        s += v;
    }
    return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
}

double PeriodicField::max_abs() const
{
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

PeriodicField solve_cell_corrector(const CoeffField& field, int grid_n, int i, const SolverOptions& options,
                                   CellSolveReport* report)
{
    check_grid(grid_n);
    if (i != 0 && i != 1) {
        throw Error(ErrorKind::Config, "corrector direction must be 0 or 1");
    }
    const PeriodicGrid grid(grid_n);
    const auto coeff = element_coefficients(grid, field);
    const CsrMatrix A = periodic_stiffness(grid, &coeff);

    // weak form of div (a - Id) e_i; the Id part integrates to zero on the torus
    std::vector<double> b(grid.num_nodes(), 0.0);
    const double area = grid.element_area();
    for (std::size_t e = 0; e < grid.num_elements(); ++e) {
        Vec2 g = coeff[e].col(i);
        g[i] -= 1.0;
        const auto& t = grid.triangles()[e];
        const auto& gl = grid.grad_lambda(e);
        for (int k = 0; k < 3; ++k) {
            b[t[k]] -= area * g.dot(gl[k]);
        }
    }
    std::vector<double> x(grid.num_nodes(), 0.0);
    const CgReport rep = pcg(A, b, x, options, true);
    if (report != nullptr) {
        *report = {rep.iterations, rep.relative_residual};
    }
    return PeriodicField(grid_n, std::move(x));
}

Mat2 homogenized_matrix(const CoeffField& field, const PeriodicField& phi_1, const PeriodicField& phi_2)
{
    if (phi_1.n() != phi_2.n()) {
        throw Error(ErrorKind::Config, "correctors were solved on different grids");
    }
    const PeriodicGrid grid(phi_1.n());
    const auto coeff = element_coefficients(grid, field);
    const double area = grid.element_area();
    Mat2 abar = Mat2::Zero();
    const PeriodicField* phi[2] = {&phi_1, &phi_2};
    for (std::size_t e = 0; e < grid.num_elements(); ++e) {
        for (int i = 0; i < 2; ++i) {
            Vec2 g = phi[i]->element_gradient(e);
            g[i] += 1.0;
            abar.col(i) += area * (coeff[e] * g);
        }
    }
    return abar;
}

void solve_flux_corrector(const CoeffField& field, CellCorrectors& c, const SolverOptions& options)
{
    const int n = c.grid_n;
    const PeriodicGrid grid(n);
    const auto coeff = element_coefficients(grid, field);
    const CsrMatrix L = periodic_stiffness(grid, nullptr);
    const double area = grid.element_area();

    std::array<std::array<std::vector<double>, 2>, 2> Nvals;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            // -Delta N_ji = -q_ji, weakly int grad N . grad v = -int q v
            std::vector<double> b(grid.num_nodes(), 0.0);
            double total = 0.0;
            for (std::size_t e = 0; e < grid.num_elements(); ++e) {
                Vec2 g = c.phi[i].element_gradient(e);
                g[i] += 1.0;
                const double q = (coeff[e] * g)[j] - c.abar(j, i);
                total += area * q;
                for (auto v : grid.triangles()[e]) {
                    b[v] -= q * area / 3.0;
                }
            }
            if (std::abs(total) > 1e-10) {
                std::ostringstream msg;
                msg << "flux corrector data has cell mean " << total << " for (j,i) = (" << j << "," << i << ")";
                throw Error(ErrorKind::Gauge, msg.str());
            }
            std::vector<double> x(grid.num_nodes(), 0.0);
            pcg(L, b, x, options, true);
            Nvals[j][i] = std::move(x);
        }
    }
    for (int i = 0; i < 2; ++i) {
        std::vector<double> s(grid.num_elements());
        for (std::size_t e = 0; e < grid.num_elements(); ++e) {
            s[e] = grad_on(grid, Nvals[0][i], e).y() - grad_on(grid, Nvals[1][i], e).x();
        }
        c.sigma[i] = PeriodicField(n, recover_nodal(grid, s));
        c.sigma_elem[i] = std::move(s);
    }
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            c.N[j][i] = PeriodicField(n, std::move(Nvals[j][i]));
        }
    }
}

CellCorrectors solve_cell_problems(const CoeffField& field, int grid_n, const SolverOptions& options)
{
    CellCorrectors c;
    c.grid_n = grid_n;
    for (int i = 0; i < 2; ++i) {
        c.phi[i] = solve_cell_corrector(field, grid_n, i, options, &c.phi_reports[i]);
    }
    c.abar = homogenized_matrix(field, c.phi[0], c.phi[1]);
    solve_flux_corrector(field, c, options);
    return c;
}

double decomposition_residual(const CoeffField& field, const CellCorrectors& c, int i)
{
    const PeriodicGrid grid(c.grid_n);
    const auto coeff = element_coefficients(grid, field);
    double num = 0.0, den = 0.0;
    for (std::size_t e = 0; e < grid.num_elements(); ++e) {
        Vec2 g = c.phi[i].element_gradient(e);
        g[i] += 1.0;
        const Vec2 q = coeff[e] * g - c.abar.col(i);
        const Vec2 ds = c.sigma[i].element_gradient(e);
        const Vec2 div_sigma(ds.y(), -ds.x());
        num += (q - div_sigma).squaredNorm();
        den += q.squaredNorm();
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double energy_identity_defect(const CoeffField& field, const CellCorrectors& c, int i)
{
    const PeriodicGrid grid(c.grid_n);
    const auto coeff = element_coefficients(grid, field);
    double energy = 0.0;
    for (std::size_t e = 0; e < grid.num_elements(); ++e) {
        Vec2 g = c.phi[i].element_gradient(e);
        g[i] += 1.0;
        energy += grid.element_area() * g.dot(coeff[e] * g);
    }
    return c.abar(i, i) - energy;
}

std::vector<SublinearityRow> sublinearity_report(const CellCorrectors& c, const std::vector<double>& radii,
                                                 std::size_t samples)
{
    // additive recurrence with the plastic number
    constexpr double g = 1.32471795724474602596;
    constexpr double a1 = 1.0 / g;
    constexpr double a2 = 1.0 / (g * g);
    std::vector<SublinearityRow> rows;
    rows.reserve(radii.size());
    for (double r : radii) {
        if (!(r > 0.0)) {
            throw Error(ErrorKind::Config, "sublinearity radii must be positive");
        }
        double s = 0.0;
        for (std::size_t k = 0; k < samples; ++k) {
            const double u = std::fmod(0.5 + a1 * static_cast<double>(k + 1), 1.0);
            const double v = std::fmod(0.5 + a2 * static_cast<double>(k + 1), 1.0);
            const double rho = r * std::sqrt(u);
            const Point y(rho * std::cos(2.0 * pi * v), rho * std::sin(2.0 * pi * v));
            for (int i = 0; i < 2; ++i) {
                const double p = c.phi[i].value(y);
                const double q = c.sigma[i].value(y);
                s += p * p + 2.0 * q * q;
            }
        }
        rows.push_back({r, std::sqrt(s / static_cast<double>(samples))});
    }
    return rows;
}

CorrectorPullback::CorrectorPullback(const CellCorrectors& correctors, const CoeffField& field)
    : phi_(correctors.phi), sigma_(correctors.sigma), period_(field.period())
{
    if (!(period_ > 0.0)) {
        throw Error(ErrorKind::Config, "corrector pull-back needs an oscillating field");
    }
    const double t = field.rotation();
    rotation_ << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
}

Point CorrectorPullback::cell_point(const Point& x) const { return rotation_.transpose() * x / period_; }

double CorrectorPullback::phi(int i, const Point& x) const
{
    const Point y = cell_point(x);
    return period_ * (rotation_(i, 0) * phi_[0].value(y) + rotation_(i, 1) * phi_[1].value(y));
}

Vec2 CorrectorPullback::grad_phi(int i, const Point& x) const
{
    const Point y = cell_point(x);
    const Vec2 gy = rotation_(i, 0) * phi_[0].gradient(y) + rotation_(i, 1) * phi_[1].gradient(y);
    return rotation_ * gy;
}

double CorrectorPullback::sigma(int i, const Point& x) const
{
    const Point y = cell_point(x);
    return period_ * (rotation_(i, 0) * sigma_[0].value(y) + rotation_(i, 1) * sigma_[1].value(y));
}

void write_periodic_field_csv(std::ostream& out, const PeriodicField& f)
{
    out << "i,j,value\n";
    char buf[96];
    for (int i = 0; i < f.n(); ++i) {
        for (int j = 0; j < f.n(); ++j) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", i, j, f.at(i, j));
            out << buf;
        }
    }
}

}  // namespace sectorhomog
