#include "mdshap/report.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include "mdshap/error.hpp"
#include "mdshap/io.hpp"
#include "mdshap/svg.hpp"

namespace mdshap {
namespace {

using nlohmann::json;

std::vector<std::string> columns_of(const json& doc) {
    return doc.value("columns", std::vector<std::string>{});
}

std::string row_label(const json& rec) {
    return std::to_string(rec.at("row").get<std::size_t>());
}

bool failed(const json& rec) { return rec.contains("error"); }

std::vector<RenderedFile> render_explain(const json& doc, std::size_t max_rows) {
    const auto columns = columns_of(doc);
    std::vector<RenderedFile> files;
    std::vector<std::string> labels;
    std::vector<Vector> bars;
    std::size_t emitted = 0;
    for (const json& rec : doc.at("rows")) {
        if (failed(rec)) continue;
        if (emitted++ >= max_rows) break;
        const Vector phi = vector_from_json(rec.at("phi"));
        const double total = rec.at("md2").get<double>();
        bars.push_back(total > 0 ? Vector(phi / std::sqrt(total)) : Vector(Vector::Zero(phi.size())));
        labels.push_back(row_label(rec));
        files.push_back({"interactions_row" + row_label(rec) + ".svg",
                         svg::heatmap(columns, matrix_from_json(rec.at("Phi")),
                                      "Shapley interaction indices, row " + row_label(rec))});
    }
    files.insert(files.begin(), RenderedFile{"contributions.svg",
                                             svg::stacked_bars(columns, labels, bars, "Outlyingness contributions")});
    return files;
}

std::vector<RenderedFile> render_detect(const json& doc, std::size_t max_rows) {
    const auto columns = columns_of(doc);
    const auto p = static_cast<Eigen::Index>(columns.size());
    std::vector<RenderedFile> files;

    std::vector<const json*> rows;
    for (const json& rec : doc.at("rows")) {
        if (!failed(rec)) rows.push_back(&rec);
    }
    const auto n = static_cast<Eigen::Index>(std::min(rows.size(), max_rows));
    Matrix direction = Matrix::Zero(n, p);
    Matrix intensity = Matrix::Zero(n, p);
    std::vector<std::vector<bool>> flagged(static_cast<std::size_t>(n), std::vector<bool>(columns.size(), false));
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& rec = *rows[static_cast<std::size_t>(i)];
        labels.push_back(row_label(rec));
        const Vector x = vector_from_json(rec.at("x"));
        const Vector xt = vector_from_json(rec.at("x_tilde"));
        const Vector phi = vector_from_json(rec.at("phi"));
        if (x.size() != p || xt.size() != p || phi.size() != p)
            throw Error(ErrorCode::SchemaVersionMismatch, "row vectors do not match the column list");
        direction.row(i) = (x - xt).transpose();
        intensity.row(i) = phi.transpose();
        for (const auto& j : rec.at("flagged")) {
            const auto col = j.get<std::size_t>();
            if (col >= columns.size()) throw Error(ErrorCode::SchemaVersionMismatch, "flagged index out of range");
            flagged[static_cast<std::size_t>(i)][col] = true;
        }

        if (rec.contains("Phi") && !rec.at("flagged").empty()) {
            files.push_back({"interactions_row" + row_label(rec) + ".svg",
                             svg::heatmap(columns, matrix_from_json(rec.at("Phi")),
                                          "Shapley interaction indices about the reference point, row " +
                                              row_label(rec))});
        }
        if (rec.contains("history")) {
            std::vector<Vector> bars;
            std::vector<std::string> steps;
            for (const json& snap : rec.at("history")) {
                bars.push_back(vector_from_json(snap.at("phi")));
                steps.push_back(std::to_string(snap.at("iteration").get<std::size_t>()));
            }
            files.push_back({"history_row" + row_label(rec) + ".svg",
                             svg::stacked_bars(columns, steps, bars, "Shapley values per iteration, row " + row_label(rec))});
        }
    }
    files.insert(files.begin(), RenderedFile{"cell_map.svg", svg::tile_map(columns, labels, direction, intensity, flagged,
                                                                           "Flagged cells")});
    return files;
}

std::vector<RenderedFile> render_simulate(const json& doc) {
    std::vector<std::string> groups;
    std::vector<std::array<double, 3>> values;
    for (const json& g : doc.at("aggregate")) {
        groups.push_back(g.at("cov_kind").get<std::string>() + "/" + g.at("detector").get<std::string>());
        values.push_back({g.at("precision").get<double>(), g.at("recall").get<double>(), g.at("fscore").get<double>()});
    }
    return {{"metrics.svg", svg::metric_bars(groups, values, "Mean cell-flagging metrics")}};
}

}  // namespace

void check_schema(const json& doc) {
    if (!doc.is_object() || !doc.contains("schema_version") || !doc.at("schema_version").is_number_integer())
        throw Error(ErrorCode::SchemaVersionMismatch, "document has no schema_version");
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion)
        throw Error(ErrorCode::SchemaVersionMismatch,
                    "schema_version " + std::to_string(version) + ", expected " + std::to_string(kSchemaVersion));
    const std::string kind = doc.value("kind", "");
    if (kind != "explain" && kind != "detect" && kind != "simulate")
        throw Error(ErrorCode::SchemaVersionMismatch, "unknown document kind '" + kind + "'");
}

json load_results(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingResults, path.string() + " does not exist");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingResults, "cannot open " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::SchemaVersionMismatch, path.string() + " is not valid JSON");
    check_schema(doc);
    return doc;
}

std::vector<RenderedFile> render_report(const json& doc, std::size_t max_rows) {
    check_schema(doc);
    try {
        const std::string kind = doc.at("kind").get<std::string>();
        if (kind == "explain") return render_explain(doc, max_rows);
        if (kind == "detect") return render_detect(doc, max_rows);
        return render_simulate(doc);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaVersionMismatch, std::string("malformed result document: ") + e.what());
    }
}

void write_files(const std::filesystem::path& dir, const std::vector<RenderedFile>& files) {
    std::filesystem::create_directories(dir);
    for (const auto& f : files) {
        std::ofstream out(dir / f.name);
        if (!out) throw Error(ErrorCode::ParseError, "cannot write " + (dir / f.name).string());
        out << f.content;
    }
}

}  // namespace mdshap
