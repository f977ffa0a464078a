#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "sectorhomog/config.hpp"
#include "sectorhomog/geometry_mesh.hpp"

namespace sectorhomog {

struct RunResult {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;
    nlohmann::json summary;
};

/// Runs the configured experiment into <output>/<hash>/, writing config.json,
/// summary.json and the experiment's CSVs. Progress goes to `log`.
RunResult run(const RunConfig& config, std::ostream& log);

/// Field at scale epsilon, divided by trace(abar)/2 when normalization is requested.
/// `abar_raw` receives the cell-problem matrix used for the normalization (Id otherwise).
CoeffField prepared_field(const CoeffConfig& coeff, double epsilon, Mat2* abar_raw = nullptr);

/// Mesh for scale epsilon: the configured h if given, else the coarsest graded mesh that
/// resolves epsilon.
MeshPtr experiment_mesh(const RunConfig& config, double epsilon);

}  // namespace sectorhomog
