#include "sectorhomog/csv.hpp"

#include <sstream>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::EmptyRegion: return "empty-region";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::NonSpd: return "non-spd";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Rank: return "rank";
    case ErrorKind::Gauge: return "gauge";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::NotNormalizable: return "not-normalizable";
    case ErrorKind::InvalidCutoff: return "invalid-cutoff";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& config_hash, const CsvMeta& meta)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    out << "# config_hash=" << config_hash << '\n';
    for (const auto& [k, v] : meta) {
        out << "# " << k << '=' << v << '\n';
    }
    return out;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot read " + path.string());
    }
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            t.comments.push_back(line);
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (t.header.empty()) {
            while (std::getline(ss, cell, ',')) {
                t.header.push_back(cell);
            }
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error(ErrorKind::Io, "non-numeric cell '" + cell + "' in " + path.string());
            }
        }
        if (row.size() != t.header.size()) {
            throw Error(ErrorKind::Io, "row width does not match the header in " + path.string());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace sectorhomog
