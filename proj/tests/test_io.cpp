#include <doctest.h>

#include <sstream>

#include "mdshap/error.hpp"
#include "mdshap/io.hpp"

using namespace mdshap;

TEST_CASE("csv with header and missing cells") {
    std::istringstream in("\xEF\xBB\xBF" "a,b\n1,2\n\nNA,4.5\n3,\n");
    const auto t = read_numeric_csv(in, HeaderMode::Required);
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.values.rows() == 3);
    CHECK(t.values(0, 1) == 2.0);
    CHECK(std::isnan(t.values(1, 0)));
    CHECK(std::isnan(t.values(2, 1)));
}

TEST_CASE("optional header detection") {
    std::istringstream with("mu\n1\n2\n");
    CHECK(read_numeric_csv(with, HeaderMode::Optional).values.rows() == 2);
    std::istringstream without("1\n2\n");
    const auto t = read_numeric_csv(without, HeaderMode::Optional);
    CHECK(t.header == std::vector<std::string>{"V1"});
    CHECK(t.values.rows() == 2);
}

TEST_CASE("malformed csv") {
    std::istringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_numeric_csv(ragged, HeaderMode::Required), Error);
    std::istringstream text("a,b\n1,x\n");
    try {
        read_numeric_csv(text, HeaderMode::Required);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("csv and json round trips") {
    Matrix m(2, 2);
    m << 0.1, -2.0 / 3.0, 1e-300, 5.0;
    std::ostringstream out;
    write_csv(out, {"u", "v"}, m);
    std::istringstream in(out.str());
    CHECK(read_numeric_csv(in, HeaderMode::Required).values == m);

    CHECK(matrix_from_json(to_json(m)) == m);
    const Vector v = m.col(1);
    CHECK(vector_from_json(to_json(v)) == v);
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse("[[1,2],[3]]")), Error);
    CHECK_THROWS_AS(vector_from_json(nlohmann::json::parse("{\"a\":1}")), Error);
}
