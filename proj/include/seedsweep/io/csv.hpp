#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seedsweep/core/dataset.hpp"

namespace seedsweep::io {

/// Which CSV columns play which role. `groups` maps exposure name to group
/// name; group order is order of first appearance along `exposures`. An
/// empty map puts every exposure in its own group.
struct ColumnRoles {
    std::string outcome;
    std::vector<std::string> exposures;
    std::vector<std::string> covariates;
    std::vector<std::pair<std::string, std::string>> groups;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;  // source line of each row, 1-based
};

/// RFC 4180: comma separated, double-quoted fields may hold commas, quotes
/// ("") and line breaks; CRLF or LF record ends. Every record must have as
/// many fields as the header.
CsvTable parse_csv(std::string_view text, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

/// Numeric dataset from a CSV file. An intercept column named "intercept"
/// is prepended to the covariates.
Dataset load_csv(const std::filesystem::path& path, const ColumnRoles& roles);
Dataset dataset_from_table(const CsvTable& table, const ColumnRoles& roles, const std::string& source);

/// Outcome, exposures and covariates (without the intercept) with 17
/// significant digits, so load_csv reproduces the values exactly.
void write_dataset(const Dataset& d, const std::filesystem::path& path, const std::string& outcome_name = "y");

/// Column roles matching write_dataset's output for `d`.
ColumnRoles roles_for(const Dataset& d, const std::string& outcome_name = "y");

/// %.17g; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double value);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(std::string_view text);

}  // namespace seedsweep::io
