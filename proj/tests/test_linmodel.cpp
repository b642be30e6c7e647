#include <doctest.h>

#include "mdshap/error.hpp"
#include "mdshap/linmodel.hpp"
#include "test_support.hpp"

using namespace mdshap;

namespace {

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidArgument;
}

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("identity model has identity precision") {
    const auto model = LocationScatter::build(Vector::Zero(2), Matrix::Identity(2, 2));
    CHECK(model.omega().isApprox(Matrix::Identity(2, 2), 1e-14));
}

TEST_CASE("2x2 precision matches the analytic inverse") {
    const auto model = LocationScatter::build(Vector::Zero(2), m2(1, 0.8, 0.8, 1));
    const Matrix expected = m2(1, -0.8, -0.8, 1) / 0.36;
    CHECK((model.omega() - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((model.chol() * model.chol().transpose() - model.sigma()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("invalid scatter matrices are rejected") {
    CHECK(code_of([] { LocationScatter::build(Vector::Zero(2), m2(1, 2, 2, 1)); }) == ErrorCode::NotPositiveDefinite);
    CHECK(code_of([] { LocationScatter::build(Vector::Zero(2), m2(1, 0.5, 0.4, 1)); }) == ErrorCode::NotSymmetric);
    CHECK(code_of([] { LocationScatter::build(Vector::Zero(3), Matrix::Identity(2, 2)); }) ==
          ErrorCode::DimensionMismatch);
    CHECK(code_of([] { LocationScatter::build(Vector::Zero(2), m2(1, NAN, NAN, 1)); }) == ErrorCode::NonFinite);
    CHECK(code_of([] { LocationScatter::build(Vector::Zero(2), m2(1, 1, 1, 1)); }) == ErrorCode::NotPositiveDefinite);
    CHECK(code_of([] { LocationScatter::build(Vector(), Matrix()); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("md2 examples") {
    const auto model = test::example_model();
    CHECK(md2(model, test::example_x()) == doctest::Approx(44.898).epsilon(1e-4));
    CHECK(md2(model, Vector::Zero(5)) == 0.0);

    const auto id = LocationScatter::build(Vector::Zero(2), Matrix::Identity(2, 2));
    Vector x(2);
    x << 3, 0;
    CHECK(md2(id, x) == doctest::Approx(9.0));
    CHECK(code_of([&] { md2(model, x); }) == ErrorCode::DimensionMismatch);
    Vector bad = test::example_x();
    bad(2) = NAN;
    CHECK(code_of([&] { md2(model, bad); }) == ErrorCode::NonFinite);
}

TEST_CASE("masked md2 uses the precision block, not the marginal model") {
    const auto model = LocationScatter::build(Vector::Zero(2), m2(1, 0.8, 0.8, 1));
    Vector x(2);
    x << 3, 9;
    CHECK(masked_md2(model, x, {}) == 0.0);
    CHECK(masked_md2(model, x, {0, 1}) == doctest::Approx(md2(model, x)));
    // 9 * omega_11 = 9 / 0.36
    CHECK(masked_md2(model, x, {0}) == doctest::Approx(25.0));
    CHECK(submodel_md2(model, x, {0}) == doctest::Approx(9.0));
    CHECK(masked_md2(model, x, {0}) == doctest::Approx(md2(model, masked_vector(model, x, {0}))));
    CHECK(code_of([&] { masked_md2(model, x, {2}); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("masked and submodel distances agree under block independence") {
    Matrix s = Matrix::Identity(3, 3);
    s(0, 1) = s(1, 0) = 0.4;
    const auto model = LocationScatter::build(Vector::Zero(3), s);
    Vector x(3);
    x << 1.0, -2.0, 3.0;
    CHECK(masked_md2(model, x, {0, 1}) == doctest::Approx(submodel_md2(model, x, {0, 1})).epsilon(1e-12));
}

TEST_CASE("normalize_subset sorts and removes duplicates") {
    CHECK(normalize_subset({3, 1, 3, 0}, 4) == IndexSet{0, 1, 3});
    CHECK(code_of([] { normalize_subset({4}, 4); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("md2 is invariant under simultaneous permutation") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t p = 2 + rep % 7;
        const auto model = test::random_model(rng, p);
        const Vector x = test::normal_vector(rng, p, 3.0);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(static_cast<Eigen::Index>(p));
        perm.setIdentity();
        std::shuffle(perm.indices().data(), perm.indices().data() + p, rng);
        const auto permuted = LocationScatter::build(perm * model.mu(), perm * model.sigma() * perm.transpose());
        CHECK(md2(permuted, perm * x) == doctest::Approx(md2(model, x)).epsilon(1e-10));
    }
}
