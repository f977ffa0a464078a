#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sectorhomog/cell_problems.hpp"
#include "sectorhomog/coefficient_fields.hpp"
#include "sectorhomog/fem_core.hpp"
#include "sectorhomog/geometry_mesh.hpp"

namespace sectorhomog {

/// Throws Resolution unless every edge is at most epsilon / cells_per_epsilon.
/// Constant fields always pass.
void check_resolution(const TriMesh& mesh, const CoeffField& field, double cells_per_epsilon = 8.0);

/// Graded sector mesh whose longest edge is at most epsilon / cells_per_epsilon.
MeshPtr resolved_sector_mesh(const SectorDomain& domain, double epsilon, double grading_exponent,
                             double cells_per_epsilon = 8.0);

/// phi^D_i with zero trace on the whole boundary: -div a (grad phi + e_i) = 0.
FEFunction solve_dirichlet_corrector(const MeshPtr& mesh, const CoeffField& field, int i,
                                     const SolverOptions& options = {}, CgReport* report = nullptr);

/// phi^C_n with zero trace on the whole boundary: -div a (grad phi + grad tau_n) = 0.
FEFunction solve_corner_corrector(const MeshPtr& mesh, const CoeffField& field, int n,
                                  const SolverOptions& options = {}, CgReport* report = nullptr);

struct CorrectorSet {
    double epsilon = 0.0;
    std::vector<FEFunction> dirichlet;  // i = 1, 2
    std::vector<FEFunction> corner;     // n = 1 .. N
    std::vector<double> residual_norms; // dirichlet first, then corner
};

CorrectorSet solve_corrector_set(const MeshPtr& mesh, const CoeffField& field, int num_corner,
                                 const SolverOptions& options = {});

struct GrowthRow {
    double R;
    double shell_l2;
    double shell_energy;
};

/// Area-averaged L2 and energy norms of u over the shells (R/2, R].
std::vector<GrowthRow> growth_profile(const FEFunction& u, const std::vector<double>& shell_radii);

/// `R,shell_l2,shell_energy`
void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows);

using MatrixFunction = std::function<Mat2(const Point&)>;

struct AnsatzRegion {
    double r_min = 0.4;
    double r_max = 0.8;
    double theta_min_fraction = 0.25;  // of omega
    double theta_max_fraction = 0.75;
    double margin = 0.0;               // extra distance kept from the boundary and the corner
};

struct AnsatzCheckOptions {
    AnsatzRegion region;
    bool include_sigma = true;
    // quadrature density for the oscillating integrands, 0 means twice the cell grid
    double samples_per_period = 0.0;
};

struct AnsatzCheckResult {
    double relative_residual;
    double residual_norm;
    double reference_norm;
    std::size_t test_nodes;
};

/// Weak residual of
///   -div a grad(phi_i f_i) = div (sigma_i - a phi_i) grad f_i + div (a - abar) f
/// (written for w = phi_i f_i with f = grad of the macroscopic function) against interior
/// hat functions, relative to the same functional applied to a (f + grad w).
/// jacobian(x)(i, k) = d_k f_i.
AnsatzCheckResult ansatz_residual_check(const TriMesh& mesh, const CoeffField& field, const Mat2& abar,
                                        const CorrectorPullback& correctors, const VectorFunction& f,
                                        const MatrixFunction& jacobian, const AnsatzCheckOptions& options = {});

}  // namespace sectorhomog
