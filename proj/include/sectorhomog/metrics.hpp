#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sectorhomog/coefficient_fields.hpp"
#include "sectorhomog/fem_core.hpp"
#include "sectorhomog/two_scale.hpp"

namespace sectorhomog {

struct SlopeFit {
    double slope;
    double intercept;     // of log y against log x
    double half_width;    // 95% interval half-width on the slope
    double lo() const { return slope - half_width; }
    double hi() const { return slope + half_width; }
    std::size_t points;
};

/// Least squares of log y on log x. Throws Fit on fewer than `min_points` points or
/// non-positive data.
SlopeFit loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t min_points = 4);

/// 2^-k_min, ..., 2^-k_max (descending).
std::vector<double> dyadic_radii(int k_min, int k_max);

/// `count` geometrically spaced values from a to b.
std::vector<double> log_spaced(double a, double b, std::size_t count);

/// Normalized shell energies (avg over (R/2, R] of |g|^2)^(1/2).
std::vector<double> shell_error_curve(const TriMesh& mesh, const std::vector<Vec2>& err,
                                      const std::vector<double>& radii);

struct ExcessValue {
    double value;
    std::vector<double> gamma;
};

/// Exc_N(u; r) = inf_gamma avg over D_r of |grad u - sum gamma_n grad b_n|^2, with
/// b_n = corrected_basis[n] (n < N). Throws Rank if the Gram matrix is numerically singular.
ExcessValue excess(const FEFunction& u, double r, int N, const std::vector<FEFunction>& corrected_basis);

struct ExcessRow {
    double r;
    ExcessValue excess;
};

/// `r,excess,gamma_1..gamma_N`
void write_excess_csv(std::ostream& out, const std::vector<ExcessRow>& rows, int N);

/// Sum over k of xi_k sin(k pi theta / omega) with xi_1 = 1 and xi_k ~ N(0,1)/k^2 for k >= 2.
struct ArcData {
    double omega;
    std::vector<double> xi;
    double operator()(double theta) const;
};

ArcData random_arc_data(double omega, std::uint64_t seed, int modes = 8);

/// Solution of -div a grad u = 0 with u = data on the arc and 0 on both edges.
FEFunction solve_arc_problem(const MeshPtr& mesh, const CoeffField& field, const ArcData& data,
                             const SolverOptions& options = {});

struct ExcessDecayOptions {
    int N = 0;
    std::uint64_t boundary_seed = 1;
    std::vector<double> radii;  // evaluation radii
    double fit_min = 0.0;       // fit restricted to r >= fit_min
    double fit_max = 1e300;     // and r <= fit_max
    SolverOptions solver;
};

struct ExcessDecayReport {
    std::vector<ExcessRow> rows;
    SlopeFit fit;
    double predicted;           // 2 (rho_{N+1} - 1)
};

ExcessDecayReport excess_decay_experiment(const MeshPtr& mesh, const CoeffField& field,
                                          const ExcessDecayOptions& options);

/// Excess decay of a prescribed solution with a prescribed corrected basis.
ExcessDecayReport excess_decay_of(const FEFunction& u, int N, const std::vector<FEFunction>& basis,
                                  const std::vector<double>& radii, double fit_min, double fit_max);

struct GainRow {
    double epsilon;
    double R;
    double E0;
    double E1;
    double gain;
};

struct GainReport {
    std::vector<GainRow> rows;
    SlopeFit slope_gain;
    SlopeFit slope_E0;
    SlopeFit slope_E1;
};

/// E0, E1 on shells (R/2, R] and gain = E0/E1; gain is NaN where either error vanishes.
std::vector<GainRow> gain_rows(const ExpansionBundle& bundle, const std::vector<double>& radii);

/// Fits over rows with fit_min <= R <= fit_max. Slopes of series with a non-positive entry
/// are reported as NaN.
GainReport gain_report(std::vector<GainRow> rows, double fit_min, double fit_max);

/// `epsilon,R,E0,E1,gain`
void write_gain_csv(std::ostream& out, const std::vector<GainRow>& rows);

}  // namespace sectorhomog
