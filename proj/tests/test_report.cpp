#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mdshap/error.hpp"
#include "mdshap/report.hpp"
#include "mdshap/svg.hpp"

using namespace mdshap;
using nlohmann::json;

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++count;
    return count;
}

json detect_doc() {
    return json::parse(R"({
        "schema_version": 1, "kind": "detect", "columns": ["a", "b", "c"],
        "rows": [
            {"row": 0, "x": [5, 0, 0], "x_tilde": [1, 0, 0], "phi": [9, 0.5, -0.5], "flagged": [0],
             "Phi": [[9, 0, 0], [0, 0.5, 0], [0, 0, -0.5]],
             "history": [{"iteration": 0, "phi": [20, 1, 1], "md2": 22, "cutoff": 11},
                         {"iteration": 3, "phi": [10, 1, 1], "md2": 12, "cutoff": 11},
                         {"iteration": 5, "phi": [8, 1, 1], "md2": 10, "cutoff": 11}]},
            {"row": 1, "error": "NonFinite: x"}
        ]})");
}

const RenderedFile* find(const std::vector<RenderedFile>& files, const std::string& name) {
    for (const auto& f : files)
        if (f.name == name) return &f;
    return nullptr;
}

}  // namespace

TEST_CASE("heatmap has one cell per matrix entry") {
    Matrix m = Matrix::Random(5, 5);
    const std::string s = svg::heatmap({"a", "b", "c", "d", "e"}, m, "t");
    CHECK(occurrences(s, "class=\"cell\"") == 25);
    CHECK(s.rfind("<svg", 0) == 0);
}

TEST_CASE("detect report shapes") {
    const auto files = render_report(detect_doc());
    const auto* map = find(files, "cell_map.svg");
    REQUIRE(map != nullptr);
    CHECK(occurrences(map->content, "class=\"tile\"") == 3);
    const auto* heat = find(files, "interactions_row0.svg");
    REQUIRE(heat != nullptr);
    CHECK(occurrences(heat->content, "class=\"cell\"") == 9);
    const auto* hist = find(files, "history_row0.svg");
    REQUIRE(hist != nullptr);
    CHECK(occurrences(hist->content, "class=\"bar\"") == 3);
    CHECK(hist->content.find("<polyline") == std::string::npos);
}

TEST_CASE("explain and simulate reports") {
    const json explain = json::parse(R"({"schema_version": 1, "kind": "explain", "columns": ["a", "b"],
        "rows": [{"row": 0, "md2": 4, "phi": [3, 1], "Phi": [[3, 0], [0, 1]]},
                 {"row": 1, "md2": 0, "phi": [0, 0], "Phi": [[0, 0], [0, 0]]}]})");
    const auto files = render_report(explain, 1);
    CHECK(files.size() == 2);
    CHECK(occurrences(find(files, "contributions.svg")->content, "class=\"bar\"") == 1);

    const json sim = json::parse(R"({"schema_version": 1, "kind": "simulate", "rows": [],
        "aggregate": [{"cov_kind": "mix", "detector": "moe", "precision": 0.9, "recall": 0.5, "fscore": 0.64}]})");
    CHECK(render_report(sim).size() == 1);
}

TEST_CASE("schema errors") {
    auto expect_mismatch = [](const json& doc) {
        try {
            render_report(doc);
            FAIL("expected SchemaVersionMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SchemaVersionMismatch);
        }
    };
    json doc = detect_doc();
    doc["schema_version"] = 2;
    expect_mismatch(doc);
    doc = detect_doc();
    doc["kind"] = "other";
    expect_mismatch(doc);
    doc = detect_doc();
    doc["rows"][0]["flagged"] = json::array({7});
    expect_mismatch(doc);
    doc = detect_doc();
    doc["rows"][0].erase("x_tilde");
    expect_mismatch(doc);

    const auto dir = std::filesystem::temp_directory_path() / "mdshap_report_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "corrupt.json") << "{\"schema_version\": 1, \"kind\": ";
    try {
        load_results(dir / "corrupt.json");
        FAIL("expected SchemaVersionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaVersionMismatch);
    }
    try {
        load_results(dir / "absent.json");
        FAIL("expected MissingResults");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingResults);
    }
}
