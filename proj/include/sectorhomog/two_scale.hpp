#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "sectorhomog/coefficient_fields.hpp"
#include "sectorhomog/fem_core.hpp"
#include "sectorhomog/sector_correctors.hpp"
#include "sectorhomog/singular_basis.hpp"

namespace sectorhomog {

/// Inner and outer support radius of the default forcing.
inline constexpr double forcing_inner_radius = 0.4;
inline constexpr double forcing_outer_radius = 0.8;

/// f(x) = s((r - 0.4)/0.1) s((0.8 - r)/0.1): 1 on 0.5 <= r <= 0.7, 0 outside [0.4, 0.8].
ScalarFunction default_forcing();

struct SolutionPair {
    FEFunction u_eps;
    FEFunction u_bar;
    CgReport eps_report;
    CgReport bar_report;
};

/// -div a grad u_eps = f and -Laplace u_bar = f, zero Dirichlet data on the whole boundary.
SolutionPair solve_pair(const MeshPtr& mesh, const CoeffField& field, const ScalarFunction& f,
                        const SolverOptions& options = {});

/// gamma_n = -(1/(n pi)) int u_bar (2 grad tau*_n . grad eta + tau*_n Laplace eta), eta the cutoff
/// of radius r0. Throws InvalidCutoff unless 0 < r0 < inner_radius (the inner edge of supp f).
double extract_gamma(const FEFunction& u_bar, int n, double r0 = 0.35, double inner_radius = forcing_inner_radius);

std::vector<double> extract_gammas(const FEFunction& u_bar, int N, double r0 = 0.35,
                                   double inner_radius = forcing_inner_radius);

/// u_reg = u_bar - sum gamma_n tau_n chi at the nodes. Without a cutoff chi = 1 on the
/// whole truncated sector.
FEFunction build_u_reg(const FEFunction& u_bar, const std::vector<double>& gamma,
                       const std::optional<CutoffBump>& chi);

/// u_bar + phi^D_i d_i u_bar with the recovered nodal gradient.
FEFunction classical_expansion(const FEFunction& u_bar, const std::vector<FEFunction>& dirichlet);

/// u_reg + phi^D_i d_i u_reg + sum gamma_n (tau_n + phi^C_n) chi + sum gamma_n tau_n phi^D_i d_i chi.
/// Without a cutoff (chi = 1) this is u_reg + phi^D_i d_i u_reg + sum gamma_n (tau_n + phi^C_n).
/// `u_reg` must have been built with the same chi.
FEFunction hybrid_expansion(const FEFunction& u_reg, const std::vector<double>& gamma,
                            const std::vector<FEFunction>& dirichlet, const std::vector<FEFunction>& corner,
                            const std::optional<CutoffBump>& chi);

struct ErrorFields {
    std::vector<Vec2> classical;  // grad (u_eps - classical), per element
    std::vector<Vec2> hybrid;     // grad (u_eps - hybrid)
};

struct ExpansionBundle {
    FEFunction u_eps;
    FEFunction u_bar;
    std::vector<double> gamma;
    FEFunction u_reg;
    FEFunction classical;
    FEFunction hybrid;
    ErrorFields errors;
    CorrectorSet correctors;
};

ErrorFields error_fields(const FEFunction& u_eps, const FEFunction& classical, const FEFunction& hybrid);

struct ExpansionOptions {
    int N = 1;
    double r0 = 0.35;              // cutoff radius for the gamma extraction
    bool cutoff_expansion = false; // also cut the singular part off with chi = eta(r0)
    SolverOptions solver;
};

/// Solves everything on one mesh and assembles both expansions. The forcing must vanish
/// on r < forcing_inner_radius.
ExpansionBundle build_expansions(const MeshPtr& mesh, const CoeffField& field, const ScalarFunction& f,
                                 const ExpansionOptions& options = {});

struct ExpansionSummary {
    double epsilon;
    std::vector<double> gamma;
    double l2_err_classical;
    double l2_err_hybrid;
    double energy_err_classical;
    double energy_err_hybrid;
};

ExpansionSummary summarize(const ExpansionBundle& bundle);

/// `epsilon,gamma_1..gamma_N,l2_err_classical,l2_err_hybrid,energy_err_classical,energy_err_hybrid`
void write_expansion_summary_csv(std::ostream& out, const std::vector<ExpansionSummary>& rows);

}  // namespace sectorhomog
