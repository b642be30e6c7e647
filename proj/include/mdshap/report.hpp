#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mdshap {

// Version of the JSON result documents written by explain/detect/simulate.
inline constexpr int kSchemaVersion = 1;

/// Reads a result document. Throws MissingResults when the file does not
/// exist and SchemaVersionMismatch when it is not a result document of the
/// current schema version.
nlohmann::json load_results(const std::filesystem::path& path);

/// Checks schema_version and kind of an in-memory document.
void check_schema(const nlohmann::json& doc);

struct RenderedFile {
    std::string name;
    std::string content;
};

/// Renders the plots for a stored result document without recomputation.
/// Per-row figures are limited to the first `max_rows` rows.
std::vector<RenderedFile> render_report(const nlohmann::json& doc, std::size_t max_rows = 50);

void write_files(const std::filesystem::path& dir, const std::vector<RenderedFile>& files);

}  // namespace mdshap
