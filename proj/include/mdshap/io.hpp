#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdshap/linmodel.hpp"

namespace mdshap {

enum class HeaderMode {
    Required,  // first line is always a header
    Optional,  // first line is a header if any field fails to parse as a number
    None,
};

struct NumericTable {
    std::vector<std::string> header;
    Matrix values;  // NA/NaN cells become quiet NaN
};

/// Comma-separated, '.' decimal separator. Blank lines are skipped. Ragged
/// rows and unparseable cells throw ParseError with the line number.
NumericTable read_numeric_csv(std::istream& in, HeaderMode mode, const std::string& source = "<stream>");
NumericTable read_numeric_csv(const std::filesystem::path& path, HeaderMode mode);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values);

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
Vector vector_from_json(const nlohmann::json& j);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace mdshap
