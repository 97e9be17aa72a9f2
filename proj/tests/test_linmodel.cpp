#include <doctest.h>

#include "oracles.hpp"
#include "siga/linmodel.hpp"

using namespace siga;

namespace {

GaussianLinearModel small_model(std::uint64_t seed, Index N = 16, Index M = 6, double s2 = 0.1)
{
    GaussianLinearModel m;
    m.A = random_unit_magnitude_matrix(N, M, seed);
    m.D = RVector::LinSpaced(M, 0.5, 2.0);
    m.sigma_z2 = s2;
    m.y = simulate_observation(m.A, m.D, s2, seed + 100).y;
    return m;
}

bool has_field(const ValidationReport& r, const std::string& field)
{
    for (const auto& v : r) {
        if (v.field == field) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("random unit-magnitude matrices are unit magnitude and seeded")
{
    const CMatrix A = random_unit_magnitude_matrix(12, 7, 3);
    CHECK(A.rows() == 12);
    CHECK(A.cols() == 7);
    CHECK((A.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(A == random_unit_magnitude_matrix(12, 7, 3));
    CHECK(A != random_unit_magnitude_matrix(12, 7, 4));
}

TEST_CASE("validate_model accepts a valid model")
{
    CHECK(validate_model(small_model(1)).empty());
    CHECK_NOTHROW(require_valid(small_model(1)));
}

TEST_CASE("validate_model reports each violation")
{
    SUBCASE("non-unit entry names its position")
    {
        auto m = small_model(2);
        m.A(3, 2) *= 1.5;
        const auto report = validate_model(m);
        REQUIRE(report.size() == 1);
        CHECK(report[0].field == "A");
        CHECK(report[0].row == 3);
        CHECK(report[0].col == 2);
        CHECK(to_string(report[0]).find("A[3,2]") != std::string::npos);
        CHECK_THROWS_AS(require_valid(m), std::invalid_argument);
    }
    SUBCASE("entry within tolerance passes")
    {
        auto m = small_model(2);
        m.A(0, 0) *= 1.0 + 1e-12;
        CHECK(validate_model(m).empty());
    }
    SUBCASE("nonpositive prior variance")
    {
        auto m = small_model(2);
        m.D(1) = 0.0;
        CHECK(has_field(validate_model(m), "D"));
    }
    SUBCASE("noise variance")
    {
        auto m = small_model(2);
        m.sigma_z2 = -1.0;
        CHECK(has_field(validate_model(m), "sigma_z2"));
    }
    SUBCASE("observation length and finiteness")
    {
        auto m = small_model(2);
        m.y.conservativeResize(m.y.size() - 1);
        CHECK(has_field(validate_model(m), "y"));
        auto m2 = small_model(2);
        m2.y(0) = Complex(std::nan(""), 0.0);
        CHECK(has_field(validate_model(m2), "y"));
    }
    SUBCASE("M = 1 is rejected")
    {
        auto m = small_model(2, 8, 1);
        CHECK(!validate_model(m).empty());
    }
}

TEST_CASE("exact posterior matches the dense inverse oracle")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto m = small_model(seed, 20, 8, 0.05 * static_cast<double>(seed));
        const auto post = exact_posterior(m);
        const auto ref = oracle::posterior(m.A, m.D, m.sigma_z2, m.y);
        CHECK(oracle::rel_error(post.mu, ref.mu) <= 1e-10);
        CHECK((post.Sigma - ref.Sigma).norm() / ref.Sigma.norm() <= 1e-10);
        CHECK(post.mean_form_gap <= 1e-10);
        CHECK((post.Sigma - post.Sigma.adjoint()).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("exact posterior closed form for a 2x2 instance")
{
    // A = [[1, 1], [1, -1]], D = I, s = 1: A^H A = 2 I, Sigma = I / 3, mu = A^H y / 3.
    GaussianLinearModel m;
    m.A = CMatrix(2, 2);
    m.A << 1.0, 1.0, 1.0, -1.0;
    m.D = RVector::Ones(2);
    m.sigma_z2 = 1.0;
    m.y = CVector(2);
    m.y << Complex(3.0, 0.0), Complex(0.0, 3.0);
    const auto post = exact_posterior(m);
    CHECK(post.Sigma(0, 0).real() == doctest::Approx(1.0 / 3.0));
    CHECK(std::abs(post.Sigma(0, 1)) == doctest::Approx(0.0));
    CHECK(post.mu(0).real() == doctest::Approx(1.0));
    CHECK(post.mu(0).imag() == doctest::Approx(1.0));
    CHECK(post.mu(1).real() == doctest::Approx(1.0));
    CHECK(post.mu(1).imag() == doctest::Approx(-1.0));
}

TEST_CASE("posterior tends to the prior as the noise grows")
{
    auto m = small_model(9, 16, 5, 1e8);
    const auto post = exact_posterior(m);
    for (Index i = 0; i < m.cols(); ++i) {
        CHECK(post.Sigma(i, i).real() == doctest::Approx(m.D(i)).epsilon(1e-5));
    }
    CHECK(post.mu.norm() <= 1e-3);
}

TEST_CASE("simulated observations are seeded and have the stated variances")
{
    const CMatrix A = random_unit_magnitude_matrix(4, 3, 1);
    const RVector D = RVector::Ones(3);
    const auto a = simulate_observation(A, D, 0.2, 11);
    const auto b = simulate_observation(A, D, 0.2, 11);
    CHECK(a.y == b.y);
    CHECK((a.y - (A * a.h + a.z)).norm() <= 1e-12);
    const auto quiet = simulate_observation(A, D, 0.2, 11, true);
    CHECK(quiet.z.norm() == 0.0);
    CHECK(quiet.h == a.h);

    // Monte-Carlo: E|h_i|^2 = D_i and E|z_n|^2 = s with equal real/imaginary split.
    const int draws = 20000;
    const RVector D2 = (RVector(3) << 0.5, 1.0, 2.0).finished();
    RVector h_pow = RVector::Zero(3);
    double re_pow = 0.0;
    double z_pow = 0.0;
    for (int k = 0; k < draws; ++k) {
        const auto obs = simulate_observation(A, D2, 0.3, 1000 + k);
        h_pow += obs.h.cwiseAbs2();
        re_pow += obs.h(2).real() * obs.h(2).real();
        z_pow += obs.z.cwiseAbs2().mean();
    }
    h_pow /= draws;
    for (Index i = 0; i < 3; ++i) {
        CHECK(h_pow(i) == doctest::Approx(D2(i)).epsilon(0.05));
    }
    CHECK(re_pow / draws == doctest::Approx(1.0).epsilon(0.05));
    CHECK(z_pow / draws == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("general random model")
{
    const auto m = make_general_random_model(30, 10, 0.15, 4);
    CHECK(validate_model(m).empty());
    CHECK(m.D == RVector::Ones(10));
    CHECK(m.sigma_z2 == 0.15);
    CHECK(m.y == make_general_random_model(30, 10, 0.15, 4).y);
}
