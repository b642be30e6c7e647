#include <doctest.h>

#include "mdshap/error.hpp"
#include "mdshap/shapley.hpp"
#include "test_support.hpp"

using namespace mdshap;

TEST_CASE("example contributions") {
    const auto e = shapley_value(test::example_model(), test::example_x());
    const double expected[] = {0.0, -5.065, 9.870, 15.257, 24.837};
    for (int j = 0; j < 5; ++j) CHECK(e.phi(j) == doctest::Approx(expected[j]).epsilon(1e-3));
    CHECK(e.total == doctest::Approx(44.898).epsilon(1e-4));
    CHECK(e.reference.isApprox(Vector::Zero(5)));
}

TEST_CASE("trivial contributions") {
    const auto model = test::example_model();
    CHECK(shapley_value(model, model.mu()).phi.isZero(0.0));

    const auto id = LocationScatter::build(Vector::Zero(3), Matrix::Identity(3, 3));
    Vector x(3);
    x << 1.0, -2.0, 3.0;
    CHECK(shapley_value(id, x).phi.isApprox(x.cwiseProduct(x)));
    const auto phi = interaction_matrix(id, x).phi;
    CHECK(phi.diagonal().isApprox(x.cwiseProduct(x)));
    CHECK((phi - Matrix(phi.diagonal().asDiagonal())).isZero(0.0));
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = j + 1; k < 3; ++k) CHECK(interaction_bruteforce(id, x, j, k) == doctest::Approx(0.0));
}

TEST_CASE("2x2 interaction index") {
    Matrix s(2, 2);
    s << 1, 0.8, 0.8, 1;
    const auto model = LocationScatter::build(Vector::Zero(2), s);
    const Vector x = Vector::Ones(2);
    const auto phi = interaction_matrix(model, x).phi;
    CHECK(phi(0, 1) == doctest::Approx(-4.4444).epsilon(1e-4));
    CHECK(phi(1, 0) == phi(0, 1));
    // p = 2 has the single coalition T = {}: v({0,1}) - v({0}) - v({1}) + v({})
    const double direct = md2(model, x) - masked_md2(model, x, {0}) - masked_md2(model, x, {1});
    CHECK(interaction_bruteforce(model, x, 0, 1) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(interaction_matrix(model, Vector::Zero(2)).phi.isZero(0.0));
}

TEST_CASE("single coordinate game") {
    Matrix s(1, 1);
    s << 2.5;
    Vector mu(1), x(1);
    mu << 1.0;
    x << 4.0;
    const auto model = LocationScatter::build(mu, s);
    CHECK(shapley_bruteforce(model, x, 0) == doctest::Approx(9.0 / 2.5));
    CHECK(shapley_bruteforce(model, mu, 0) == 0.0);
}

TEST_CASE("closed forms match enumeration") {
    std::mt19937_64 rng(17);
    for (std::size_t p = 1; p <= 8; ++p) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto model = test::random_model(rng, p);
            const Vector x = model.mu() + test::normal_vector(rng, p, 2.0);
            const auto e = shapley_value(model, x);
            const auto phi = interaction_matrix(model, x).phi;
            for (std::size_t k = 0; k < p; ++k) {
                CHECK(std::abs(shapley_bruteforce(model, x, k) - e.phi(static_cast<Eigen::Index>(k))) < 1e-8);
                for (std::size_t j = k + 1; j < p; ++j)
                    CHECK(std::abs(interaction_bruteforce(model, x, j, k) -
                                   phi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) < 1e-8);
            }
        }
    }
}

TEST_CASE("efficiency with mean and local references") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t p = 1 + rep % 40;
        const auto model = test::random_model(rng, p);
        const Vector x = model.mu() + test::normal_vector(rng, p, 3.0);
        const Vector c = model.mu() + test::normal_vector(rng, p);
        for (const auto& e : {shapley_value(model, x), shapley_value(model, x, c)}) {
            CHECK(std::abs(e.phi.sum() - e.total) <= 1e-10 * std::max(1.0, e.total));
            const auto phi = interaction_matrix(model, x, e.reference).phi;
            CHECK(std::abs(phi.sum() - e.total) <= 1e-10 * std::max(1.0, e.total));
            CHECK((phi.rowwise().sum() - e.phi).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, e.total));
        }
    }
}

TEST_CASE("third-order derivatives vanish") {
    std::mt19937_64 rng(29);
    const auto model3 = test::random_model(rng, 3);
    const Vector x3 = test::normal_vector(rng, 3, 2.0);
    CHECK(std::abs(set_derivative3(model3, x3, 0, 1, 2, {})) < 1e-8);
    CHECK(std::abs(set_derivative3(model3, model3.mu(), 0, 1, 2, {})) < 1e-12);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t p = 3 + rep % 6;
        const auto model = test::random_model(rng, p);
        const Vector x = test::normal_vector(rng, p, 3.0);
        IndexSet idx(p);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        IndexSet base;
        for (std::size_t i = 3; i < p; ++i)
            if (rng() & 1u) base.push_back(idx[i]);
        CHECK(std::abs(set_derivative3(model, x, idx[0], idx[1], idx[2], base)) < 1e-8);
    }
}

TEST_CASE("symmetric coordinates receive equal contributions") {
    const auto model = test::example_model();
    Vector x = test::example_x();
    x(3) = x(4);
    const auto e = shapley_value(model, x);
    CHECK(std::abs(e.phi(3) - e.phi(4)) < 1e-10);
}

TEST_CASE("permutation equivariance") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t p = 2 + rep % 9;
        const auto model = test::random_model(rng, p);
        const Vector x = test::normal_vector(rng, p, 2.0);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(static_cast<Eigen::Index>(p));
        perm.setIdentity();
        std::shuffle(perm.indices().data(), perm.indices().data() + p, rng);
        const auto permuted = LocationScatter::build(perm * model.mu(), perm * model.sigma() * perm.transpose());
        const Vector phi = shapley_value(model, x).phi;
        const Vector phi_p = shapley_value(permuted, perm * x).phi;
        CHECK((phi_p - perm * phi).cwiseAbs().maxCoeff() < 1e-9);
        const Matrix big = interaction_matrix(model, x).phi;
        const Matrix big_p = interaction_matrix(permuted, perm * x).phi;
        CHECK((big_p - perm * big * perm.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("rescaled contributions sum to the distance") {
    const auto e = shapley_value(test::example_model(), test::example_x());
    CHECK(rescaled_contributions(e).sum() == doctest::Approx(std::sqrt(e.total)));
    const auto zero = shapley_value(test::example_model(), Vector::Zero(5));
    CHECK(rescaled_contributions(zero).isZero(0.0));
}

TEST_CASE("enumeration refuses large dimensions") {
    const auto model = LocationScatter::build(Vector::Zero(21), Matrix::Identity(21, 21));
    CHECK_THROWS_AS(shapley_bruteforce(model, Vector::Ones(21), 0), Error);
}
