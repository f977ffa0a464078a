#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "sectorhomog/coefficient_fields.hpp"
#include "sectorhomog/fem_core.hpp"
#include "sectorhomog/types.hpp"

namespace sectorhomog {

/// Uniform n x n periodic grid on the unit cell. Node (i, j) sits at (i/n, j/n) and has
/// index i*n + j. Square (i, j) is split along its (0,0)-(1,1) diagonal into a lower
/// element 2*(i*n+j) and an upper element 2*(i*n+j)+1.
class PeriodicGrid {
public:
    explicit PeriodicGrid(int n);

    int n() const noexcept { return n_; }
    double h() const noexcept { return 1.0 / n_; }
    std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(n_) * n_; }
    std::size_t num_elements() const noexcept { return 2 * num_nodes(); }

    std::size_t node(int i, int j) const;

    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    double element_area() const noexcept { return 0.5 * h() * h(); }
    const std::array<Vec2, 3>& grad_lambda(std::size_t e) const { return grads_[e % 2]; }

    /// Unwrapped vertex positions of element e.
    std::array<Point, 3> element_vertices(std::size_t e) const;
    std::array<Point, 3> quadrature_points(std::size_t e) const;

    /// Element containing y (any real point, reduced mod 1) and barycentrics.
    std::size_t locate(const Point& y, std::array<double, 3>& bary) const;

private:
    int n_;
    std::vector<Triangle> triangles_;
    std::array<std::array<Vec2, 3>, 2> grads_;
};

/// P1 field on a PeriodicGrid, extended periodically to the plane.
class PeriodicField {
public:
    PeriodicField() = default;
    PeriodicField(int n, std::vector<double> values);

    int n() const noexcept { return n_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double at(int i, int j) const;

    double value(const Point& y) const;
    Vec2 gradient(const Point& y) const;
    Vec2 element_gradient(std::size_t e) const;

    double mean() const;
    double max_abs() const;

private:
    int n_ = 0;
    std::vector<double> values_;
};

struct CellSolveReport {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

struct CellCorrectors {
    int grid_n = 0;
    std::array<PeriodicField, 2> phi;
    Mat2 abar = Mat2::Identity();
    /// N[j][i] solves Delta N_ji = a_jl (delta_li + d_l phi_i) - abar_ji.
    std::array<std::array<PeriodicField, 2>, 2> N;
    /// sigma_{i12} per element, and its nodal recovery.
    std::array<std::vector<double>, 2> sigma_elem;
    std::array<PeriodicField, 2> sigma;
    std::array<CellSolveReport, 2> phi_reports;
};

/// Periodic corrector phi_i solving div a (grad phi_i + e_i) = 0 with zero mean, in
/// un-rotated cell coordinates.
PeriodicField solve_cell_corrector(const CoeffField& field, int grid_n, int i, const SolverOptions& options = {},
                                   CellSolveReport* report = nullptr);

/// abar_ji = int_cell [a (grad phi_i + e_i)]_j.
Mat2 homogenized_matrix(const CoeffField& field, const PeriodicField& phi_1, const PeriodicField& phi_2);

/// Potentials N_ji and sigma_{i12} = d_2 N_1i - d_1 N_2i. Throws Gauge when the Poisson data
/// have a cell mean above 1e-10.
void solve_flux_corrector(const CoeffField& field, CellCorrectors& correctors, const SolverOptions& options = {});

/// Cell correctors, abar and flux correctors in one call.
CellCorrectors solve_cell_problems(const CoeffField& field, int grid_n, const SolverOptions& options = {});

/// Relative L2 norm of a e_i - abar e_i + a grad phi_i - div sigma_i over the cell,
/// with div sigma taken from the recovered nodal sigma.
double decomposition_residual(const CoeffField& field, const CellCorrectors& correctors, int i);

/// e_i . abar e_i - int (grad phi_i + e_i) . a (grad phi_i + e_i).
double energy_identity_defect(const CoeffField& field, const CellCorrectors& correctors, int i);

struct SublinearityRow {
    double r;
    double rms;
};

/// (avg over B_r of |phi|^2 + |sigma|^2)^(1/2) for radii in cell units, by a deterministic
/// low-discrepancy sample of the disk centered at the origin.
std::vector<SublinearityRow> sublinearity_report(const CellCorrectors& correctors, const std::vector<double>& radii,
                                                 std::size_t samples = 200000);

/// Physical corrector x -> p sum_k S_ik phi_k(S^T x / p), p the field period.
class CorrectorPullback {
public:
    CorrectorPullback(const CellCorrectors& correctors, const CoeffField& field);

    double phi(int i, const Point& x) const;
    Vec2 grad_phi(int i, const Point& x) const;
    /// sigma_{i12} pulled back the same way (skew tensors are rotation invariant in 2D).
    double sigma(int i, const Point& x) const;
    int cell_grid() const noexcept { return phi_[0].n(); }

private:
    Point cell_point(const Point& x) const;

    std::array<PeriodicField, 2> phi_;
    std::array<PeriodicField, 2> sigma_;
    double period_;
    Mat2 rotation_;
};

/// `i,j,value` row-major.
void write_periodic_field_csv(std::ostream& out, const PeriodicField& f);

}  // namespace sectorhomog
