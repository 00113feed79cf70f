#include "seedsweep/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "seedsweep/core/error.hpp"

namespace seedsweep::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

CsvTable parse_csv(std::string_view text, const std::string& source) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<std::vector<std::string>> records;
    std::vector<std::size_t> record_lines;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;      // inside a quoted field
    bool was_quoted = false;  // current field started with a quote
    std::size_t line = 1;
    std::size_t record_line = 1;
    std::size_t i = 0;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        // a bare empty line is not a record
        if (!(record.size() == 1 && record[0].empty())) {
            records.push_back(std::move(record));
            record_lines.push_back(record_line);
        }
        record.clear();
    };

    while (i < text.size()) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
                    throw_data("E_DATA_MALFORMED_ROW",
                               source + ": line " + std::to_string(line) + ": unexpected character after closing quote");
                continue;
            }
            if (ch == '\n') ++line;
            field.push_back(ch);
            ++i;
            continue;
        }
        if (ch == '"') {
            if (!field.empty() || was_quoted)
                throw_data("E_DATA_MALFORMED_ROW", source + ": line " + std::to_string(line) + ": stray quote in field");
            quoted = true;
            was_quoted = true;
            ++i;
        } else if (ch == ',') {
            end_field();
            ++i;
        } else if (ch == '\r' || ch == '\n') {
            end_record();
            i += (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
            ++line;
            record_line = line;
        } else {
            field.push_back(ch);
            ++i;
        }
    }
    if (quoted) throw_data("E_DATA_MALFORMED_ROW", source + ": line " + std::to_string(record_line) + ": unterminated quote");
    if (!field.empty() || !record.empty() || was_quoted) end_record();

    if (records.empty()) throw_data("E_DATA_EMPTY_FILE", source + ": no header row");
    CsvTable table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size())
            throw_data("E_DATA_MALFORMED_ROW", source + ": line " + std::to_string(record_lines[r]) + ": expected " +
                                                   std::to_string(table.header.size()) + " fields, found " +
                                                   std::to_string(records[r].size()));
        table.rows.push_back(std::move(records[r]));
        table.lines.push_back(record_lines[r]);
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("E_DATA_FILE_NOT_FOUND", "cannot open data file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

Dataset dataset_from_table(const CsvTable& table, const ColumnRoles& roles, const std::string& source) {
    std::map<std::string, std::size_t> column;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        const std::string name(trim(table.header[j]));
        if (!column.emplace(name, j).second)
            throw_data("E_DATA_DUPLICATE_COLUMN", source + ": duplicate column '" + name + "'");
    }
    auto find = [&](const std::string& name) {
        auto it = column.find(name);
        if (it == column.end()) throw_data("E_DATA_MISSING_COLUMN", source + ": missing column '" + name + "'");
        return it->second;
    };
    if (roles.outcome.empty()) throw_usage("E_USAGE_ROLES", "no outcome column configured");
    if (roles.exposures.empty()) throw_usage("E_USAGE_ROLES", "no exposure columns configured");

    const std::size_t n = table.rows.size();
    auto read_column = [&](const std::string& name, auto&& store) {
        const std::size_t j = find(name);
        for (std::size_t r = 0; r < n; ++r) {
            const std::string_view cell = trim(table.rows[r][j]);
            const std::string where =
                source + ": line " + std::to_string(table.lines[r]) + ", column '" + name + "'";
            if (cell.empty()) throw_data("E_DATA_MISSING_VALUE", where + ": empty cell");
            double v = 0.0;
            const char* first = cell.data();
            if (!cell.empty() && cell.front() == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
                throw_data("E_DATA_NON_NUMERIC", where + ": non-numeric value '" + std::string(cell) + "'");
            store(r, v);
        }
    };

    Dataset d;
    d.y.resize(static_cast<Eigen::Index>(n));
    read_column(roles.outcome, [&](std::size_t r, double v) { d.y(static_cast<Eigen::Index>(r)) = v; });
    d.Z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(roles.exposures.size()));
    for (std::size_t m = 0; m < roles.exposures.size(); ++m) {
        read_column(roles.exposures[m], [&](std::size_t r, double v) {
            d.Z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) = v;
        });
    }
    d.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(roles.covariates.size() + 1));
    d.X.col(0).setOnes();
    for (std::size_t k = 0; k < roles.covariates.size(); ++k) {
        read_column(roles.covariates[k], [&](std::size_t r, double v) {
            d.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k + 1)) = v;
        });
    }
    d.exposure_names = roles.exposures;
    d.covariate_names.push_back("intercept");
    d.covariate_names.insert(d.covariate_names.end(), roles.covariates.begin(), roles.covariates.end());
    d.penalty_mask = default_penalty_mask(d.p(), d.c());

    if (roles.groups.empty()) {
        d.groups = GroupSpec::singletons(d.exposure_names);
    } else {
        std::map<std::string, std::string> group_of;
        for (const auto& [exposure, group] : roles.groups) {
            if (std::find(roles.exposures.begin(), roles.exposures.end(), exposure) == roles.exposures.end())
                throw_data("E_DATA_GROUPS", "group '" + group + "' names '" + exposure + "', which is not an exposure");
            if (!group_of.emplace(exposure, group).second)
                throw_data("E_DATA_GROUPS", "exposure '" + exposure + "' is assigned to more than one group");
        }
        std::map<std::string, int> index;
        for (const auto& e : roles.exposures) {
            auto it = group_of.find(e);
            if (it == group_of.end()) throw_data("E_DATA_GROUPS", "exposure '" + e + "' has no group");
            auto [pos, fresh] = index.emplace(it->second, static_cast<int>(d.groups.group_names.size()));
            if (fresh) d.groups.group_names.push_back(it->second);
            d.groups.assignments.push_back(pos->second);
        }
    }
    d.validate();
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRoles& roles) {
    return dataset_from_table(read_csv(path), roles, path.string());
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

ColumnRoles roles_for(const Dataset& d, const std::string& outcome_name) {
    ColumnRoles roles;
    roles.outcome = outcome_name;
    roles.exposures = d.exposure_names;
    const auto icpt = d.intercept_column();
    for (std::size_t k = 0; k < d.c(); ++k) {
        if (icpt && k == *icpt) continue;
        roles.covariates.push_back(d.covariate_names[k]);
    }
    for (std::size_t m = 0; m < d.p(); ++m)
        roles.groups.emplace_back(d.exposure_names[m],
                                  d.groups.group_names[static_cast<std::size_t>(d.groups.assignments[m])]);
    return roles;
}

void write_dataset(const Dataset& d, const std::filesystem::path& path, const std::string& outcome_name) {
    const ColumnRoles roles = roles_for(d, outcome_name);
    std::vector<Eigen::Index> covariate_cols;
    for (std::size_t k = 0; k < d.c(); ++k) {
        if (d.intercept_column() && k == *d.intercept_column()) continue;
        covariate_cols.push_back(static_cast<Eigen::Index>(k));
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("E_DATA_WRITE", "cannot write '" + path.string() + "'");
    out << csv_field(outcome_name);
    for (const auto& e : roles.exposures) out << ',' << csv_field(e);
    for (const auto& c : roles.covariates) out << ',' << csv_field(c);
    out << '\n';
    for (Eigen::Index i = 0; i < d.y.size(); ++i) {
        out << format_double(d.y(i));
        for (Eigen::Index m = 0; m < d.Z.cols(); ++m) out << ',' << format_double(d.Z(i, m));
        for (auto k : covariate_cols) out << ',' << format_double(d.X(i, k));
        out << '\n';
    }
    if (!out) throw_data("E_DATA_WRITE", "failed writing '" + path.string() + "'");
}

}  // namespace seedsweep::io
