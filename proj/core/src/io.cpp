#include "ccp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccp::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_cell(const std::string& s, const std::filesystem::path& path) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ": unparseable cell '" + s + "'");
    }
    if (pos != s.size())
        throw std::runtime_error(path.string() + ": unparseable cell '" + s + "'");
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    return in;
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_table(const std::filesystem::path& path, const Table& table) {
    std::ofstream out = open_out(path);
    for (size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::invalid_argument("write_table: ragged row");
        for (size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_g17(row[i]);
        out << '\n';
    }
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ": empty file");
    Table t;
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != t.header.size())
            throw std::runtime_error(path.string() + ": ragged row");
        std::vector<double> row;
        for (const auto& f : fields) row.push_back(parse_cell(f, path));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_sites(const std::filesystem::path& path, const LabeledSites& s) {
    if (s.labels.size() != s.sites.size())
        throw std::invalid_argument("write_sites: label/site count mismatch");
    std::ofstream out = open_out(path);
    out << "label,x,y\n";
    for (size_t i = 0; i < s.sites.size(); ++i)
        out << s.labels[i] << ',' << format_g17(s.sites[i].x) << ','
            << format_g17(s.sites[i].y) << '\n';
}

LabeledSites read_sites(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ": empty file");
    if (split_csv_line(line) != std::vector<std::string>{"label", "x", "y"})
        throw std::runtime_error(path.string() + ": expected header label,x,y");
    LabeledSites s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error(path.string() + ": expected 3 columns");
        s.labels.push_back(fields[0]);
        s.sites.push_back({parse_cell(fields[1], path), parse_cell(fields[2], path)});
    }
    for (size_t i = 0; i < s.labels.size(); ++i)
        for (size_t j = i + 1; j < s.labels.size(); ++j)
            if (s.labels[i] == s.labels[j])
                throw std::runtime_error(path.string() + ": duplicate site label '" +
                                         s.labels[i] + "'");
    return s;
}

void write_observations(const std::filesystem::path& path,
                        const std::vector<std::string>& labels,
                        const ReplicateMatrix& m) {
    if (int(labels.size()) != m.d)
        throw std::invalid_argument("write_observations: label/column mismatch");
    Table t;
    t.header = labels;
    t.rows.reserve(m.n);
    for (int i = 0; i < m.n; ++i) {
        std::vector<double> row(m.d);
        for (int j = 0; j < m.d; ++j) row[j] = m.at(i, j);
        t.rows.push_back(std::move(row));
    }
    write_table(path, t);
}

Dataset read_dataset(const std::filesystem::path& sites_path,
                     const std::filesystem::path& observations_path) {
    Dataset ds;
    ds.sites = read_sites(sites_path);
    const Table obs = read_table(observations_path);
    const size_t d = ds.sites.labels.size();
    if (obs.header.size() != d)
        throw std::runtime_error("dataset: observation columns do not match sites");

    // columns may arrive in any order; map them onto the site order
    std::vector<size_t> col_of(d);
    for (size_t j = 0; j < d; ++j) {
        const auto it = std::find(obs.header.begin(), obs.header.end(),
                                  ds.sites.labels[j]);
        if (it == obs.header.end())
            throw std::runtime_error("dataset: no observation column for site '" +
                                     ds.sites.labels[j] + "'");
        col_of[j] = size_t(it - obs.header.begin());
    }

    ReplicateMatrix& m = ds.observations;
    m.n = int(obs.rows.size());
    m.d = int(d);
    m.sites = ds.sites.sites;
    m.values.resize(obs.rows.size() * d);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.d; ++j) m.at(i, j) = obs.rows[i][col_of[j]];
    return ds;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace ccp::io
