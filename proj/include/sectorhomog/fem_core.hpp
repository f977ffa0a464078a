#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sectorhomog/coefficient_fields.hpp"
#include "sectorhomog/geometry_mesh.hpp"
#include "sectorhomog/types.hpp"

namespace sectorhomog {

/// Symmetric 3-point rule with interior nodes (barycentric 2/3, 1/6, 1/6), exact for degree 2.
namespace quadrature {
inline constexpr std::array<std::array<double, 3>, 3> bary{{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};
inline constexpr double weight = 1.0 / 3.0;  // times the element area
}  // namespace quadrature

std::array<Point, 3> quadrature_points(const TriMesh& mesh, std::size_t e);

/// Piecewise-linear nodal field on a mesh.
class FEFunction {
public:
    explicit FEFunction(MeshPtr mesh);
    FEFunction(MeshPtr mesh, std::vector<double> values);

    const TriMesh& mesh() const noexcept { return *mesh_; }
    const MeshPtr& mesh_ptr() const noexcept { return mesh_; }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    void set(std::size_t i, double v) { values_[i] = v; }

    /// Value inside element e at the given barycentric coordinates.
    double value_at(std::size_t e, const std::array<double, 3>& bary) const;

    FEFunction& operator+=(const FEFunction& other);
    FEFunction& operator-=(const FEFunction& other);
    FEFunction& operator*=(double s);

    double max_abs() const;

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

FEFunction operator+(FEFunction a, const FEFunction& b);
FEFunction operator-(FEFunction a, const FEFunction& b);
FEFunction operator*(double s, FEFunction a);

/// Nodal interpolant.
FEFunction interpolate(const MeshPtr& mesh, const ScalarFunction& f);

/// Compressed sparse row storage.
struct CsrMatrix {
    std::size_t rows = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    void multiply(std::span<const double> x, std::span<double> y) const;
    double at(std::size_t i, std::size_t j) const;
    double& ref(std::size_t i, std::size_t j);
    std::vector<double> diagonal() const;
    double max_asymmetry() const;
};

/// Sparsity pattern of P1 couplings on an arbitrary triangle list.
CsrMatrix p1_pattern(std::size_t num_nodes, std::span<const Triangle> triangles);

struct SparseSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    std::vector<std::uint8_t> dirichlet_mask;
    std::vector<double> dirichlet_values;
};

/// System with homogeneous Dirichlet data on the whole mesh boundary.
SparseSystem dirichlet_system(const TriMesh& mesh, CsrMatrix matrix, std::vector<double> rhs);

CsrMatrix assemble_stiffness(const TriMesh& mesh, const CoeffField& field);

std::vector<double> assemble_load_scalar(const TriMesh& mesh, const ScalarFunction& f);

/// b_i = -sum_T int_T g . grad(lambda_i), the weak form of div g.
std::vector<double> assemble_load_div(const TriMesh& mesh, const VectorFunction& g);

struct SolverOptions {
    double rel_tol = 1e-10;
    std::size_t max_iter = 50000;
};

struct CgReport {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> history;
};

/// Jacobi-preconditioned CG on x (used as initial guess). With `singular_mean` the
/// matrix is assumed to have the constants as kernel; rhs and solution are projected
/// to mean zero.
CgReport pcg(const CsrMatrix& A, std::span<const double> b, std::span<double> x, const SolverOptions& options,
             bool singular_mean = false);

/// Eliminates Dirichlet rows/columns symmetrically and solves.
FEFunction solve_cg(const MeshPtr& mesh, const SparseSystem& system, const SolverOptions& options = {},
                    CgReport* report = nullptr);

/// Elementwise gradient of the P1 field.
std::vector<Vec2> gradient_p0(const FEFunction& u);

struct NodalGradient {
    FEFunction dx;
    FEFunction dy;
    std::vector<std::uint8_t> one_sided;  // boundary nodes: patch is not symmetric
};

/// Area-weighted average of incident element gradients.
NodalGradient recover_gradient_nodal(const FEFunction& u);

/// (sum area |g|^2 / sum area)^(1/2), or the unnormalized sqrt(sum area |g|^2).
double energy_seminorm_on(const TriMesh& mesh, std::span<const std::size_t> elements, std::span<const Vec2> grad,
                          bool area_normalized);

/// Same as energy_seminorm_on over all elements.
double energy_seminorm(const TriMesh& mesh, std::span<const Vec2> grad, bool area_normalized = false);

/// L2 norm of u over the elements, by quadrature.
double l2_norm_on(const FEFunction& u, std::span<const std::size_t> elements, bool area_normalized);

/// `node_id,x,y,value`
void write_fefunction_csv(std::ostream& out, const FEFunction& u);

/// `iteration,relative_residual`
void write_residual_history_csv(std::ostream& out, std::span<const double> history);

}  // namespace sectorhomog
