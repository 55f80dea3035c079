#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccp/geometry.hpp"
#include "ccp/simulate.hpp"

namespace ccp::io {

/// One double rendered with 17 significant digits, enough to round-trip.
std::string format_g17(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Site list with string labels; stored as CSV (label, x, y).
struct LabeledSites {
    std::vector<std::string> labels;
    SiteSet sites;
};

void write_sites(const std::filesystem::path& path, const LabeledSites& s);
LabeledSites read_sites(const std::filesystem::path& path);

/// Observations CSV: header row of site labels, one replicate per row.
void write_observations(const std::filesystem::path& path,
                        const std::vector<std::string>& labels,
                        const ReplicateMatrix& m);

struct Dataset {
    LabeledSites sites;
    ReplicateMatrix observations;  // columns aligned with sites
};

/// Joins the two CSVs; observation columns must match site labels bijectively
/// and every cell must parse as a number (missing data is rejected).
Dataset read_dataset(const std::filesystem::path& sites_path,
                     const std::filesystem::path& observations_path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace ccp::io
