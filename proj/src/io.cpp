#include "mdshap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mdshap/error.hpp"

namespace mdshap {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool is_missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "NAN";
}

bool parse_number(const std::string& s, double& out) {
    if (is_missing(s)) {
        out = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    const char* begin = s.data();
    const char* end = begin + s.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

NumericTable read_numeric_csv(std::istream& in, HeaderMode mode, const std::string& source) {
    NumericTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    std::size_t width = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);

        if (first) {
            first = false;
            width = fields.size();
            bool header = mode == HeaderMode::Required;
            if (mode == HeaderMode::Optional) {
                for (const auto& f : fields) {
                    double v;
                    if (!parse_number(f, v) || is_missing(f)) header = true;
                }
            }
            if (header) {
                table.header = std::move(fields);
                continue;
            }
        }
        if (fields.size() != width)
            throw Error(ErrorCode::ParseError, source + " line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(width) + " fields, found " +
                                                   std::to_string(fields.size()));
        std::vector<double> row(width);
        for (std::size_t j = 0; j < width; ++j) {
            if (!parse_number(fields[j], row[j]))
                throw Error(ErrorCode::ParseError, source + " line " + std::to_string(line_no) + ": cannot parse '" +
                                                       fields[j] + "' as a number");
        }
        rows.push_back(std::move(row));
    }

    if (table.header.empty() && mode != HeaderMode::None && width > 0 && rows.empty() == false) {
        for (std::size_t j = 0; j < width; ++j) table.header.push_back("V" + std::to_string(j + 1));
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return table;
}

NumericTable read_numeric_csv(const std::filesystem::path& path, HeaderMode mode) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    return read_numeric_csv(in, mode, path.string());
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    if (!header.empty()) out << '\n';
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << values(i, j);
        out << '\n';
    }
}

nlohmann::json to_json(const Vector& v) {
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

nlohmann::json to_json(const Matrix& m) {
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        arr.push_back(std::move(row));
    }
    return arr;
}

Vector vector_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::SchemaVersionMismatch, "expected a numeric array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw Error(ErrorCode::SchemaVersionMismatch, "expected a numeric array");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::SchemaVersionMismatch, "expected a nested numeric array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Vector row = vector_from_json(j[static_cast<std::size_t>(i)]);
        if (row.size() != cols) throw Error(ErrorCode::SchemaVersionMismatch, "ragged matrix");
        m.row(i) = row.transpose();
    }
    return m;
}

}  // namespace mdshap
