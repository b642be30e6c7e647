#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mdshap/batch.hpp"
#include "mdshap/error.hpp"
#include "mdshap/estimation.hpp"
#include "mdshap/io.hpp"
#include "test_support.hpp"

using namespace mdshap;

namespace {

const std::filesystem::path kFixtures = MDSHAP_FIXTURE_DIR;

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / ("mdshap_est_" + name);
    std::ofstream(path) << body;
    return path;
}

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("median and MAD standardization") {
    Matrix x(3, 1);
    x << 1, 2, 3;
    const auto [z, plan] = robust_standardize(x);
    CHECK(plan.medians(0) == 2.0);
    CHECK(plan.mads(0) == doctest::Approx(1.4826));
    CHECK(z(0, 0) == doctest::Approx(-0.6745).epsilon(1e-4));
    CHECK(z(1, 0) == 0.0);
    CHECK(z(2, 0) == doctest::Approx(0.6745).epsilon(1e-4));
    CHECK(median(Vector::LinSpaced(4, 1, 4)) == 2.5);
}

TEST_CASE("standardization edge cases") {
    Matrix constant(4, 2);
    constant << 1, 5, 2, 5, 3, 5, 4, 5;
    CHECK(code_of([&] { robust_standardize(constant); }) == ErrorCode::DegenerateColumn);

    std::mt19937_64 rng(5);
    Matrix y(501, 3);
    for (Eigen::Index i = 0; i < y.rows(); ++i) y.row(i) = test::normal_vector(rng, 3).transpose();
    const auto [once, plan1] = robust_standardize(y);
    const auto [twice, plan2] = robust_standardize(once);
    CHECK(plan2.medians.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((plan2.mads.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((unstandardize(once, plan1) - y).cwiseAbs().maxCoeff() < 1e-12);

    // column independence: permuting columns permutes the plan
    Matrix swapped = y;
    swapped.col(0).swap(swapped.col(2));
    const auto [zs, plans] = robust_standardize(swapped);
    CHECK(plans.medians(0) == plan1.medians(2));
    CHECK(zs.col(2) == once.col(0));
}

TEST_CASE("sample covariance") {
    Matrix dup(5, 2);
    dup << 1, 1, 2, 2, 4, 4, 3, 3, 0, 0;
    const Matrix s = sample_covariance(dup);
    CHECK(code_of([&] { LocationScatter::build(column_means(dup), s); }) == ErrorCode::NotPositiveDefinite);
    CHECK(code_of([] { sample_covariance(Matrix::Identity(3, 3)); }) == ErrorCode::InsufficientRows);

    std::mt19937_64 rng(7);
    Matrix z(10000, 3);
    for (Eigen::Index i = 0; i < z.rows(); ++i) z.row(i) = test::normal_vector(rng, 3).transpose();
    CHECK((sample_covariance(z) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("load_model from files") {
    const auto mu = write_temp("mu.csv", "mu\n0\n0\n");
    const auto sigma = write_temp("sigma.csv", "1,0\n0,1\n");
    const auto model = load_model(mu, sigma);
    CHECK(model.omega().isApprox(Matrix::Identity(2, 2)));

    const auto mu3 = write_temp("mu3.csv", "0\n0\n0\n");
    CHECK(code_of([&] { load_model(mu3, sigma); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("externally estimated robust model reproduces its distances") {
    const auto model = load_model(kFixtures / "mcd_mu.csv", kFixtures / "mcd_sigma.csv");
    const Matrix data = read_numeric_csv(kFixtures / "mcd_data.csv", HeaderMode::Required).values;
    const Matrix expected = read_numeric_csv(kFixtures / "mcd_md2.csv", HeaderMode::None).values;
    const Vector got = md2_rows_serial(model, data);
    REQUIRE(got.size() == expected.rows());
    for (Eigen::Index i = 0; i < got.size(); ++i) CHECK(got(i) == doctest::Approx(expected(i, 0)).epsilon(1e-9));
}
