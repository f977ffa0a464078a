#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace sectorhomog {

using CsvMeta = std::vector<std::pair<std::string, std::string>>;

/// Opens a CSV for writing and emits `# config_hash=<hash>` followed by `# key=value` lines.
std::ofstream open_csv(const std::filesystem::path& path, const std::string& config_hash, const CsvMeta& meta = {});

/// Comment lines starting with '#' are skipped; returns the header and the numeric rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> comments;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace sectorhomog
