#include <doctest.h>

#include "mdshap/batch.hpp"
#include "mdshap/simulation.hpp"
#include "test_support.hpp"

using namespace mdshap;

namespace {

Matrix contaminated_sample(const LocationScatter& model, std::size_t n) {
    const Matrix clean = generate_clean(n, model.sigma(), 99);
    return inject_structured(clean, model, 0.2, 5.0, 100).data;
}

}  // namespace

TEST_CASE("parallel kernels equal their serial twins") {
    const Matrix sigma = make_covariance(CovKind::Mix, 6, 1);
    const auto model = LocationScatter::build(Vector::Zero(6), sigma);
    Matrix data = contaminated_sample(model, 60);
    data(7, 2) = NAN;

    const Vector a = md2_rows(model, data);
    const Vector b = md2_rows_serial(model, data);
    CHECK(std::isnan(a(7)));
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (i != 7) CHECK(a(i) == b(i));

    const auto ea = explain_rows(model, data);
    const auto eb = explain_rows_serial(model, data);
    REQUIRE(ea.size() == eb.size());
    CHECK(ea[7].failure.has_value());
    CHECK(ea[7].failure->code == ErrorCode::NonFinite);
    for (std::size_t i = 0; i < ea.size(); ++i) {
        if (ea[i].failure) continue;
        CHECK(ea[i].explanation.phi == eb[i].explanation.phi);
        CHECK(ea[i].interactions == eb[i].interactions);
    }

    for (Algorithm alg : {Algorithm::SCD, Algorithm::MOE}) {
        DetectOptions opt;
        const auto da = detect_rows(model, data, alg, opt);
        const auto db = detect_rows_serial(model, data, alg, opt);
        CHECK(da[7].failure.has_value());
        for (std::size_t i = 0; i < da.size(); ++i) {
            if (da[i].failure) continue;
            CHECK(da[i].result.flagged == db[i].result.flagged);
            CHECK(da[i].result.x_tilde == db[i].result.x_tilde);
            CHECK(da[i].result.phi_final.phi == db[i].result.phi_final.phi);
        }
    }
}

TEST_CASE("explanations for supplied cells") {
    const auto model = test::example_model();
    Matrix data(2, 5);
    data.row(0) = test::example_x().transpose();
    data.row(1) = Vector::Zero(5).transpose();
    const auto recs = explain_rows_given_cells(model, data, {{0, 1}, {}});
    const auto direct = explain_given_cells(model, test::example_x(), {0, 1});
    CHECK(recs[0].explanation.phi == direct.phi);
    CHECK(recs[1].explanation.phi.isZero(1e-12));
    CHECK_THROWS_AS(explain_rows_given_cells(model, data, {{0}}), Error);
}
