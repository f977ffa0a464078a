#include "sectorhomog/fem_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

std::array<Point, 3> quadrature_points(const TriMesh& mesh, std::size_t e)
{
    const auto& t = mesh.triangles()[e];
    const auto& v = mesh.vertices();
    std::array<Point, 3> q;
    for (int k = 0; k < 3; ++k) {
        const auto& b = quadrature::bary[k];
        q[k] = b[0] * v[t[0]] + b[1] * v[t[1]] + b[2] * v[t[2]];
    }
    return q;
}

FEFunction::FEFunction(MeshPtr mesh) : mesh_(std::move(mesh)), values_(mesh_->num_vertices(), 0.0) {}

FEFunction::FEFunction(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values))
{
    if (values_.size() != mesh_->num_vertices()) {
        throw Error(ErrorKind::Config, "nodal value count does not match the mesh");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::Config, "nodal values must be finite");
        }
    }
}

double FEFunction::value_at(std::size_t e, const std::array<double, 3>& bary) const
{
    const auto& t = mesh_->triangles()[e];
    return bary[0] * values_[t[0]] + bary[1] * values_[t[1]] + bary[2] * values_[t[2]];
}

FEFunction& FEFunction::operator+=(const FEFunction& other)
{
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += other.values_[i];
    }
    return *this;
}

FEFunction& FEFunction::operator-=(const FEFunction& other)
{
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= other.values_[i];
    }
    return *this;
}

FEFunction& FEFunction::operator*=(double s)
{
    for (double& v : values_) {
        v *= s;
    }
    return *this;
}

double FEFunction::max_abs() const
{
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

FEFunction operator+(FEFunction a, const FEFunction& b) { return a += b; }
FEFunction operator-(FEFunction a, const FEFunction& b) { return a -= b; }
FEFunction operator*(double s, FEFunction a) { return a *= s; }

FEFunction interpolate(const MeshPtr& mesh, const ScalarFunction& f)
{
    std::vector<double> v(mesh->num_vertices());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f(mesh->vertices()[i]);
    }
    return FEFunction(mesh, std::move(v));
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            s += val[k] * x[col[k]];
        }
        y[i] = s;
    }
}

double CsrMatrix::at(std::size_t i, std::size_t j) const
{
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        if (col[k] == j) {
            return val[k];
        }
    }
    return 0.0;
}

double& CsrMatrix::ref(std::size_t i, std::size_t j)
{
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        if (col[k] == j) {
            return val[k];
        }
    }
    throw Error(ErrorKind::Assembly, "entry outside the sparsity pattern");
}

std::vector<double> CsrMatrix::diagonal() const
{
    std::vector<double> d(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        d[i] = at(i, i);
    }
    return d;
}

double CsrMatrix::max_asymmetry() const
{
    double worst = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const double a = val[k];
            const double b = at(col[k], i);
            const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
            worst = std::max(worst, std::abs(a - b) / scale);
        }
    }
    return worst;
}

CsrMatrix p1_pattern(std::size_t num_nodes, std::span<const Triangle> triangles)
{
    std::vector<std::vector<std::uint32_t>> adj(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) {
        adj[i].push_back(static_cast<std::uint32_t>(i));
    }
    for (const auto& t : triangles) {
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                if (a != b) {
                    adj[t[a]].push_back(static_cast<std::uint32_t>(t[b]));
                }
            }
        }
    }
    CsrMatrix m;
    m.rows = num_nodes;
    m.row_ptr.resize(num_nodes + 1, 0);
    for (std::size_t i = 0; i < num_nodes; ++i) {
        auto& row = adj[i];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        m.row_ptr[i + 1] = m.row_ptr[i] + row.size();
    }
    m.col.reserve(m.row_ptr.back());
    for (const auto& row : adj) {
        m.col.insert(m.col.end(), row.begin(), row.end());
    }
    m.val.assign(m.col.size(), 0.0);
    return m;
}

SparseSystem dirichlet_system(const TriMesh& mesh, CsrMatrix matrix, std::vector<double> rhs)
{
    SparseSystem s;
    s.matrix = std::move(matrix);
    s.rhs = std::move(rhs);
    s.dirichlet_mask = mesh.boundary_vertex_mask();
    s.dirichlet_values.assign(mesh.num_vertices(), 0.0);
    return s;
}

CsrMatrix assemble_stiffness(const TriMesh& mesh, const CoeffField& field)
{
    CsrMatrix A = p1_pattern(mesh.num_vertices(), mesh.triangles());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& g = mesh.geometry(e);
        if (!(g.area > 0.0)) {
            std::ostringstream msg;
            msg << "degenerate element " << e << " (signed area " << g.area << ")";
            throw Error(ErrorKind::Assembly, msg.str());
        }
        Mat2 a = Mat2::Zero();
        for (const auto& x : quadrature_points(mesh, e)) {
            a += field(x);
        }
        a *= quadrature::weight * g.area;
        const auto& t = mesh.triangles()[e];
        for (int i = 0; i < 3; ++i) {
            const Vec2 ag = a * g.grad_lambda[i];
            for (int j = 0; j < 3; ++j) {
                A.ref(t[j], t[i]) += g.grad_lambda[j].dot(ag);
            }
        }
    }
    return A;
}

std::vector<double> assemble_load_scalar(const TriMesh& mesh, const ScalarFunction& f)
{
    std::vector<double> b(mesh.num_vertices(), 0.0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.triangles()[e];
        const double w = quadrature::weight * mesh.geometry(e).area;
        const auto q = quadrature_points(mesh, e);
        for (int k = 0; k < 3; ++k) {
            const double fq = f(q[k]);
            if (fq == 0.0) {
                continue;
            }
            for (int i = 0; i < 3; ++i) {
                b[t[i]] += w * fq * quadrature::bary[k][i];
            }
        }
    }
    return b;
}

std::vector<double> assemble_load_div(const TriMesh& mesh, const VectorFunction& g)
{
    std::vector<double> b(mesh.num_vertices(), 0.0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& geo = mesh.geometry(e);
        Vec2 gsum = Vec2::Zero();
        for (const auto& x : quadrature_points(mesh, e)) {
            gsum += g(x);
        }
        gsum *= quadrature::weight * geo.area;
        const auto& t = mesh.triangles()[e];
        for (int i = 0; i < 3; ++i) {
            b[t[i]] -= gsum.dot(geo.grad_lambda[i]);
        }
    }
    return b;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void remove_mean(std::span<double> v)
{
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) {
        x -= m;
    }
}

}  // namespace

CgReport pcg(const CsrMatrix& A, std::span<const double> b_in, std::span<double> x, const SolverOptions& options,
             bool singular_mean)
{
    const std::size_t n = A.rows;
    std::vector<double> b(b_in.begin(), b_in.end());
    if (singular_mean) {
        remove_mean(b);
    }
    std::vector<double> inv_diag = A.diagonal();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(inv_diag[i] > 0.0)) {
            std::ostringstream msg;
            msg << "non-positive diagonal entry " << inv_diag[i] << " at row " << i;
            throw Error(ErrorKind::NonSpd, msg.str());
        }
        inv_diag[i] = 1.0 / inv_diag[i];
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    A.multiply(x, r);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - r[i];
    }
    double b_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        b_norm += b[i] * b[i] * inv_diag[i];
    }
    b_norm = std::sqrt(b_norm);

    CgReport report;
    if (b_norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return report;
    }
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
    }
    p = z;
    double rz = dot(r, z);
    report.relative_residual = std::sqrt(std::max(rz, 0.0)) / b_norm;
    report.history.push_back(report.relative_residual);

    while (report.relative_residual > options.rel_tol) {
        if (report.iterations >= options.max_iter) {
            std::ostringstream msg;
            msg << "CG did not converge in " << options.max_iter << " iterations (relative residual "
                << report.relative_residual << ")";
            throw NonConvergenceError(msg.str(), report.history);
        }
        A.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            std::ostringstream msg;
            msg << "negative curvature p.Ap = " << pq << " at iteration " << report.iterations;
            throw Error(ErrorKind::NonSpd, msg.str());
        }
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            z[i] = inv_diag[i] * r[i];
        }
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
        ++report.iterations;
        report.relative_residual = std::sqrt(std::max(rz, 0.0)) / b_norm;
        report.history.push_back(report.relative_residual);
    }
    if (singular_mean) {
        remove_mean(x);
    }
    return report;
}

FEFunction solve_cg(const MeshPtr& mesh, const SparseSystem& system, const SolverOptions& options,
                    CgReport* report)
{
    const std::size_t n = system.matrix.rows;
    if (n != mesh->num_vertices() || system.rhs.size() != n || system.dirichlet_mask.size() != n ||
        system.dirichlet_values.size() != n) {
        throw Error(ErrorKind::Config, "system size does not match the mesh");
    }
    CsrMatrix A = system.matrix;
    std::vector<double> b = system.rhs;
    const auto& fixed = system.dirichlet_mask;
    const auto& g = system.dirichlet_values;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const std::size_t j = A.col[k];
            if (fixed[i]) {
                A.val[k] = (i == j) ? 1.0 : 0.0;
            } else if (fixed[j]) {
                b[i] -= A.val[k] * g[j];
                A.val[k] = 0.0;
            }
        }
        if (fixed[i]) {
            b[i] = g[i];
        }
    }
    std::vector<double> x(n, 0.0);
    CgReport rep = pcg(A, b, x, options);
    for (std::size_t i = 0; i < n; ++i) {
        if (fixed[i]) {
            x[i] = g[i];
        }
    }
    if (report != nullptr) {
        *report = std::move(rep);
    }
    return FEFunction(mesh, std::move(x));
}

std::vector<Vec2> gradient_p0(const FEFunction& u)
{
    const TriMesh& mesh = u.mesh();
    std::vector<Vec2> g(mesh.num_elements());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.triangles()[e];
        const auto& geo = mesh.geometry(e);
        g[e] = u[t[0]] * geo.grad_lambda[0] + u[t[1]] * geo.grad_lambda[1] + u[t[2]] * geo.grad_lambda[2];
    }
    return g;
}

NodalGradient recover_gradient_nodal(const FEFunction& u)
{
    const TriMesh& mesh = u.mesh();
    const auto g = gradient_p0(u);
    std::vector<double> gx(mesh.num_vertices(), 0.0), gy(mesh.num_vertices(), 0.0), w(mesh.num_vertices(), 0.0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const double a = mesh.geometry(e).area;
        for (auto v : mesh.triangles()[e]) {
            gx[v] += a * g[e].x();
            gy[v] += a * g[e].y();
            w[v] += a;
        }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) {
            gx[i] /= w[i];
            gy[i] /= w[i];
        }
    }
    return {FEFunction(u.mesh_ptr(), std::move(gx)), FEFunction(u.mesh_ptr(), std::move(gy)),
            mesh.boundary_vertex_mask()};
}

double energy_seminorm_on(const TriMesh& mesh, std::span<const std::size_t> elements, std::span<const Vec2> grad,
                          bool area_normalized)
{
    if (elements.empty()) {
        throw Error(ErrorKind::EmptyRegion, "energy seminorm over an empty element set");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t e : elements) {
        const double a = mesh.geometry(e).area;
        num += a * grad[e].squaredNorm();
        den += a;
    }
    return std::sqrt(area_normalized ? num / den : num);
}

double energy_seminorm(const TriMesh& mesh, std::span<const Vec2> grad, bool area_normalized)
{
    std::vector<std::size_t> all(mesh.num_elements());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return energy_seminorm_on(mesh, all, grad, area_normalized);
}

double l2_norm_on(const FEFunction& u, std::span<const std::size_t> elements, bool area_normalized)
{
    if (elements.empty()) {
        throw Error(ErrorKind::EmptyRegion, "L2 norm over an empty element set");
    }
    const TriMesh& mesh = u.mesh();
    double num = 0.0, den = 0.0;
    for (std::size_t e : elements) {
        const double a = mesh.geometry(e).area;
        double s = 0.0;
        for (const auto& b : quadrature::bary) {
            const double v = u.value_at(e, b);
            s += v * v;
        }
        num += a * quadrature::weight * s;
        den += a;
    }
    return std::sqrt(area_normalized ? num / den : num);
}

void write_fefunction_csv(std::ostream& out, const FEFunction& u)
{
    out << "node_id,x,y,value\n";
    char buf[128];
    const auto& v = u.mesh().vertices();
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, v[i].x(), v[i].y(), u[i]);
        out << buf;
    }
}

void write_residual_history_csv(std::ostream& out, std::span<const double> history)
{
    out << "iteration,relative_residual\n";
    char buf[64];
    for (std::size_t i = 0; i < history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, history[i]);
        out << buf;
    }
}

}  // namespace sectorhomog
