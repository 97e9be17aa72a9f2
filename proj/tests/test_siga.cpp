#include <doctest.h>

#include "oracles.hpp"
#include "siga/linmodel.hpp"
#include "siga/siga.hpp"

#include <random>

using namespace siga;

namespace {

GaussianLinearModel model_with_prior(std::uint64_t seed, Index N, Index M, double s2)
{
    GaussianLinearModel m;
    m.A = random_unit_magnitude_matrix(N, M, seed);
    m.D = RVector::LinSpaced(M, 0.4, 1.6);
    m.sigma_z2 = s2;
    m.y = simulate_observation(m.A, m.D, s2, seed + 7).y;
    return m;
}

RVector random_nu(std::mt19937_64& rng, Index M, double lower)
{
    std::uniform_real_distribution<double> u(lower, 0.0);
    RVector nu(M);
    for (Index i = 0; i < M; ++i) {
        nu(i) = u(rng);
    }
    return nu;
}

CVector random_theta(std::mt19937_64& rng, Index M, double scale)
{
    std::normal_distribution<double> g(0.0, scale);
    CVector t(M);
    for (Index i = 0; i < M; ++i) {
        t(i) = Complex(g(rng), g(rng));
    }
    return t;
}

}  // namespace

TEST_CASE("nu update on a hand-computed instance")
{
    // M = 2, N = 3, D = I, s = 1, nu = 0: Lambda = 1, g_i = -2 / (1 + 1) = -1.
    const RVector D = RVector::Ones(2);
    const RVector nu = RVector::Zero(2);
    const RVector full = nu_step(nu, 1.0, D, 1.0, 3);
    CHECK(full(0) == doctest::Approx(-1.0));
    CHECK(full(1) == doctest::Approx(-1.0));
    const RVector half = nu_step(nu, 0.5, D, 1.0, 3);
    CHECK(half(0) == doctest::Approx(-0.5));
    CHECK(half(1) == doctest::Approx(-0.5));
}

TEST_CASE("nu lower bound")
{
    const RVector g = nu_lower_bound(3, 46080, 1.0);
    CHECK(g.size() == 3);
    CHECK(g(0) == -46079.0);
    CHECK(nu_lower_bound(2, 300, 0.15)(1) == doctest::Approx(-299.0 / 0.15));
}

TEST_CASE("nu update rejects positive entries")
{
    const RVector D = RVector::Ones(3);
    RVector nu = RVector::Zero(3);
    nu(1) = 1e-9;
    CHECK_THROWS_AS(nu_step(nu, 1.0, D, 1.0, 4), DomainError);
    nu(1) = std::nan("");
    CHECK_THROWS_AS(nu_step(nu, 1.0, D, 1.0, 4), DomainError);
}

TEST_CASE("nu update equals the unreduced form")
{
    std::mt19937_64 rng(5);
    const Index N = 40;
    const Index M = 12;
    const double s2 = 0.2;
    const RVector D = RVector::LinSpaced(M, 0.3, 3.0);
    for (int k = 0; k < 50; ++k) {
        const RVector nu = random_nu(rng, M, -(N - 1) / s2);
        for (double d : {1.0, 0.6, 0.05}) {
            const RVector a = nu_step(nu, d, D, s2, N);
            const RVector b = oracle::nu_update(nu, d, D, s2, N);
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + b.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("theta update equals the unreduced form")
{
    std::mt19937_64 rng(9);
    const auto m = model_with_prior(3, 16, 4, 0.3);
    const SigaWorkspace ws(m);
    for (int k = 0; k < 30; ++k) {
        const RVector nu = random_nu(rng, 4, -(16 - 1) / 0.3);
        const CVector theta = random_theta(rng, 4, 10.0);
        for (double d : {1.0, 0.72, 0.1}) {
            const CVector a = theta_step(theta, nu, d, ws);
            const CVector b = oracle::theta_update(theta, nu, d, m.A, m.D, m.sigma_z2, m.y);
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + b.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("theta update matches the dense affine form")
{
    std::mt19937_64 rng(10);
    const auto m = model_with_prior(4, 24, 9, 0.1);
    const SigaWorkspace ws(m);
    const RVector nu = random_nu(rng, 9, -(24 - 1) / 0.1);
    const CVector theta = random_theta(rng, 9, 3.0);
    const double d = 0.4;
    const CMatrix B = iteration_matrix(nu, ws);
    const CMatrix Bt = d * B + (1.0 - d) * CMatrix::Identity(9, 9);
    const CVector expected = Bt * theta + offset_vector(nu, d, ws);
    CHECK((theta_step(theta, nu, d, ws) - expected).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + expected.norm()));
}

TEST_CASE("theta update trivial limits")
{
    auto m = model_with_prior(5, 10, 4, 0.5);
    const RVector nu = RVector::Constant(4, -2.0);
    SUBCASE("zero observation and zero state stay at zero")
    {
        m.y.setZero();
        const SigaWorkspace ws(m);
        CHECK(theta_step(CVector::Zero(4), nu, 0.8, ws).norm() == 0.0);
    }
    SUBCASE("vanishing damping leaves theta unchanged")
    {
        const SigaWorkspace ws(m);
        const CVector theta = CVector::Constant(4, Complex(1.0, -2.0));
        CHECK((theta_step(theta, nu, 1e-14, ws) - theta).norm() <= 1e-10);
    }
}

TEST_CASE("nu map monotonicity, scalability and bounds")
{
    std::mt19937_64 rng(2024);
    const Index N = 30;
    const Index M = 8;
    const double s2 = 0.15;
    const RVector D = RVector::LinSpaced(M, 0.5, 2.0);
    const double lower = -(N - 1) / s2;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double d : {1.0, 0.5}) {
        for (int k = 0; k < 100; ++k) {
            RVector hi = random_nu(rng, M, lower);
            RVector lo = hi;
            for (Index i = 0; i < M; ++i) {
                lo(i) = hi(i) - (0.01 + unit(rng)) * 10.0;
            }
            CHECK((nu_step(lo, d, D, s2, N).array() < nu_step(hi, d, D, s2, N).array()).all());

            const RVector nu = random_nu(rng, M, lower);
            const double alpha = 0.01 + 0.98 * unit(rng);
            const RVector scaled = nu_step(RVector(alpha * nu), d, D, s2, N);
            CHECK((scaled.array() < (alpha * nu_step(nu, d, D, s2, N)).array()).all());

            const RVector g = nu_step(nu, d, D, s2, N);
            CHECK((g.array() < 0.0).all());
            CHECK((g.array() > lower).all());
        }
    }
}

TEST_CASE("run converges to a fixed point and applies the output map")
{
    const auto m = model_with_prior(6, 64, 16, 0.1);
    SigaConfig cfg;
    cfg.d = 0.3;
    const auto r = run(m, cfg);
    REQUIRE(r.status == SigaStatus::Converged);
    CHECK(r.residual_nu <= 1e-8);
    CHECK(r.residual_theta <= 1e-8 * (1.0 + r.theta_star.cwiseAbs().maxCoeff()));
    CHECK(r.trajectory.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(r.trajectory.front().t == 0);
    CHECK((r.nu_star.array() < 0.0).all());
    CHECK((r.sigma0_diag.array() > 0.0).all());
    const double ratio = 64.0 / 63.0;
    CHECK((r.nu0 - ratio * r.nu_star).norm() <= 1e-12 * r.nu0.norm());
    for (Index i = 0; i < 16; ++i) {
        const double s = 1.0 / (1.0 / m.D(i) - r.nu0(i));
        CHECK(r.sigma0_diag(i) == doctest::Approx(s));
        CHECK(std::abs(r.mu0(i) - 0.5 * s * r.theta0(i)) <= 1e-12 * (1.0 + std::abs(r.mu0(i))));
    }
}

TEST_CASE("output mean vanishes with a zero observation")
{
    auto m = model_with_prior(7, 20, 5, 0.2);
    m.y.setZero();
    const auto r = run(m, SigaConfig{});
    CHECK(r.theta0.norm() == 0.0);
    CHECK(r.mu0.norm() == 0.0);
}

TEST_CASE("nu trajectory inside run is bit-identical to nu_step alone")
{
    const auto m = model_with_prior(8, 32, 10, 0.15);
    SigaConfig cfg;
    cfg.d = 0.5;
    cfg.t_max = 40;
    cfg.nu_init = nu_lower_bound(10, 32, 0.15);
    cfg.theta_init = CVector::Constant(10, Complex(-100.0, 0.0));
    const auto r = run(m, cfg);
    RVector nu = *cfg.nu_init;
    for (int t = 0; t < r.iterations; ++t) {
        nu = nu_step(nu, cfg.d, m.D, m.sigma_z2, 32);
        CHECK(r.trajectory[static_cast<std::size_t>(t) + 1].nu_norm2 == nu.norm());
    }
    CHECK((r.nu_star - nu).cwiseAbs().maxCoeff() == 0.0);

    SigaConfig frozen = cfg;
    frozen.nu_only = true;
    const auto f = run(m, frozen);
    CHECK(f.theta_star == *cfg.theta_init);
    for (int t = 0; t <= std::min(r.iterations, f.iterations); ++t) {
        CHECK(f.trajectory[static_cast<std::size_t>(t)].nu_norm2 == r.trajectory[static_cast<std::size_t>(t)].nu_norm2);
    }
}

TEST_CASE("nu trajectory stays negative and is componentwise monotone after the first step")
{
    const auto m = model_with_prior(9, 50, 12, 0.15);
    for (double d : {1.0, 0.6}) {
        for (const RVector& start : {RVector(RVector::Zero(12)), nu_lower_bound(12, 50, 0.15)}) {
            RVector prev = nu_step(start, d, m.D, m.sigma_z2, 50);
            RVector cur = nu_step(prev, d, m.D, m.sigma_z2, 50);
            const RVector sign = (cur - prev).array().sign();
            for (int t = 0; t < 200; ++t) {
                CHECK((cur.array() < 0.0).all());
                const RVector next = nu_step(cur, d, m.D, m.sigma_z2, 50);
                const RVector step = next - cur;
                CHECK((step.array() * sign.array() >= 0.0).all());
                prev = cur;
                cur = next;
            }
        }
    }
}

TEST_CASE("undamped run diverges when the certificate fails")
{
    const auto m = make_general_random_model(300, 150, 0.15, 14);
    SigaConfig cfg;
    cfg.d = 1.0;
    const auto r = run(m, cfg);
    CHECK(r.status == SigaStatus::Diverged);
    CHECK(r.iterations < cfg.t_max);
    CHECK(std::isfinite(r.theta_star.norm()));
}

TEST_CASE("max iterations status")
{
    const auto m = model_with_prior(10, 40, 10, 0.1);
    SigaConfig cfg;
    cfg.d = 0.01;
    cfg.t_max = 5;
    const auto r = run(m, cfg);
    CHECK(r.status == SigaStatus::MaxIterations);
    CHECK(r.iterations == 5);
}

TEST_CASE("configuration validation")
{
    const auto m = model_with_prior(11, 10, 4, 0.5);
    SigaConfig cfg;
    cfg.d = 0.0;
    CHECK_THROWS_AS(run(m, cfg), std::invalid_argument);
    cfg.d = 1.5;
    CHECK_THROWS_AS(run(m, cfg), std::invalid_argument);
    cfg.d = 1.0;
    cfg.nu_init = RVector::Constant(4, 0.5);
    CHECK_THROWS_AS(run(m, cfg), std::invalid_argument);
    cfg.nu_init = RVector::Constant(4, -19.0);  // below -(N-1)/s2 = -18
    CHECK_THROWS_AS(run(m, cfg), std::invalid_argument);
    cfg.nu_init = RVector::Constant(3, -1.0);
    CHECK_THROWS_AS(run(m, cfg), DimensionError);
    cfg.nu_init.reset();
    cfg.theta_init = CVector::Zero(5);
    CHECK_THROWS_AS(run(m, cfg), DimensionError);

    auto single = model_with_prior(12, 1, 3, 0.5);
    CHECK_THROWS_AS(run(single, SigaConfig{}), std::invalid_argument);
}
