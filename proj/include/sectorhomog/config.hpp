#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sectorhomog/coefficient_fields.hpp"
#include "sectorhomog/fem_core.hpp"

namespace sectorhomog {

inline constexpr std::string_view experiment_kinds[] = {"cell",         "gain",           "corrector-growth",
                                                        "excess-decay", "gamma-recovery", "extend-check"};

struct DomainConfig {
    double omega = 1.95 * pi;
    double R = 1.0;
};

struct MeshConfig {
    std::optional<double> h;         // absent: derived from epsilon
    double grading = 2.0;
    double cells_per_epsilon = 8.0;
};

struct CoeffConfig {
    std::string kind = "periodic";   // identity | constant | periodic | laminate | checkerboard
    Mat2 matrix = Mat2::Identity();
    double kappa = 1.5;
    double rotation = 0.35;          // laminate configs default to 0
    double first = 2.0;
    double second = 0.5;
    double contrast = 4.0;
    std::uint64_t seed = 0;
    bool normalize = true;
    int cell_grid = 256;
};

struct ExperimentConfig {
    std::string kind;
    std::vector<double> epsilons;
    std::vector<double> radii;
    double fit_min = 0.0;
    double fit_max = 0.0;
    double fit_min_eps = 0.0;        // fit window lower end, in units of epsilon
    double radii_min_eps = 0.0;      // lower end of generated radii, in units of epsilon
    std::size_t radii_count = 0;
    int N = 1;
    double r0 = 0.35;
    bool cutoff_expansion = false;   // gain: cut the singular part off with eta(r0)
    bool write_fields = true;        // gain: nodal |grad u_eps| and coefficient CSVs
    std::vector<double> mesh_sizes;  // gamma-recovery
    std::vector<double> coefficients;
    int n_theta = 4096;
    std::string test_field = "rotated-gradient";
    std::vector<double> sublinearity_radii;
};

struct RunConfig {
    DomainConfig domain;
    MeshConfig mesh;
    CoeffConfig coeff;
    ExperimentConfig experiment;
    SolverOptions solver;
    std::string output = "runs";
    std::uint64_t seed = 1;

    nlohmann::json resolved;  // every value after defaults, canonical key order
    std::string hash;         // 16 hex digits of FNV-1a over resolved.dump() without "output"
};

/// Recomputes `resolved` and `hash` after fields were changed in code.
void refresh_resolved(RunConfig& config);

/// Validates `j` and fills defaults. `experiment` (if non-empty) must agree with the
/// config's own experiment kind when both are given. Throws Config naming the offending key.
RunConfig parse_config(const nlohmann::json& j, std::string_view experiment = {});

RunConfig load_config(const std::filesystem::path& file, std::string_view experiment = {});

std::string fnv1a_hex(std::string_view bytes);

/// Coefficient field at scale epsilon, before normalization.
CoeffField make_field(const CoeffConfig& c, double epsilon);

}  // namespace sectorhomog
