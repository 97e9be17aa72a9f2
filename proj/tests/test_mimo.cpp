#include <doctest.h>

#include "oracles.hpp"
#include "siga/convergence.hpp"
#include "siga/linmodel.hpp"
#include "siga/mimo.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace siga;
using namespace siga::mimo;

namespace {

double max_unit_deviation(const CMatrix& A) { return (A.cwiseAbs().array() - 1.0).abs().maxCoeff(); }

double scaled_identity_gap(const CMatrix& P, double scale)
{
    CMatrix target = CMatrix::Identity(P.rows(), P.cols()) * scale;
    return (P - target).cwiseAbs().maxCoeff();
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("siga_test_" + name)).string();
}

}  // namespace

TEST_CASE("configuration dimensions")
{
    const auto small = small_config();
    CHECK(small.N() == 64);
    CHECK(small.Nf() == 2);
    CHECK(small.Mtilde_general() == 2 * 8 * 4 * 2);
    CHECK(small.Mtilde_apsp() == 8 * 64);

    const auto table = table_config();
    CHECK(table.N() == 46080);
    CHECK(table.Nf() == 25);
    auto ceil_cfg = table;
    ceil_cfg.rounding = NfRounding::Ceil;
    CHECK(ceil_cfg.Nf() == 26);

    auto bad = small;
    bad.Np = 100;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small;
    bad.Fv = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("DFT basis identities")
{
    const auto cfg = small_config();
    const CMatrix Vv = partial_dft(cfg.Nrv, cfg.Fv);
    const CMatrix Vh = partial_dft(cfg.Nrh, cfg.Fh);
    const CMatrix Fd = delay_basis(cfg);
    CHECK(scaled_identity_gap(Vv * Vv.adjoint(), cfg.Fv * cfg.Nrv) <= 1e-10);
    CHECK(scaled_identity_gap(Vh * Vh.adjoint(), cfg.Fh * cfg.Nrh) <= 1e-10);
    CHECK(scaled_identity_gap(Fd * Fd.adjoint(), cfg.Ftau * cfg.Np) <= 1e-10);
    CHECK(max_unit_deviation(Fd) <= 1e-12);

    const CMatrix V = spatial_basis(cfg);
    CHECK(V.rows() == cfg.Nr());
    CHECK(V.cols() == cfg.Fa() * cfg.Nr());
    CHECK((V - kron(Vv, Vh)).norm() <= 1e-12);

    const CMatrix F = truncated_delay_basis(cfg);
    CHECK(F.cols() == cfg.Ftau * cfg.Nf());
    CHECK((F - Fd.leftCols(F.cols())).norm() == 0.0);
    CHECK(partial_dft(3, 2)(1, 1) == std::polar(1.0, -2.0 * 3.14159265358979323846 / 6.0));
}

TEST_CASE("Kronecker product layout")
{
    CMatrix a(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    CMatrix b(1, 2);
    b << 1.0, Complex(0.0, 1.0);
    const CMatrix k = kron(a, b);
    CHECK(k.rows() == 2);
    CHECK(k.cols() == 4);
    CHECK(k(0, 1) == Complex(0.0, 1.0));
    CHECK(k(1, 2) == Complex(4.0, 0.0));
    CHECK(k(1, 3) == Complex(0.0, 4.0));
}

TEST_CASE("general-pilot measurement")
{
    const auto cfg = small_config();
    const auto pilots = random_general_pilots(cfg, 3);
    REQUIRE(pilots.x.size() == 2);
    for (const auto& x : pilots.x) {
        CHECK(max_unit_deviation(x) <= 1e-12);
    }
    const CMatrix full = full_general_matrix(cfg, pilots);
    CHECK(full.rows() == cfg.N());
    CHECK(full.cols() == cfg.Mtilde_general());
    CHECK(max_unit_deviation(full) <= 1e-9);

    // Structured damping bound and the interlacing chain.
    const double fine = static_cast<double>(cfg.Fv * cfg.Fh * cfg.Ftau);
    const double rho_full = oracle::gram_max_eig(full);
    CHECK(rho_full <= cfg.K * fine * cfg.N() * (1.0 + 1e-10));
    const CMatrix Mt = pilot_delay_matrix(cfg, pilots);
    const double chain = cfg.Fv * cfg.Fh * cfg.Nr() * oracle::gram_max_eig(Mt.adjoint());
    CHECK(rho_full == doctest::Approx(chain).epsilon(1e-9));

    const auto support = random_support(cfg.Mtilde_general(), 40, 5);
    const auto skel = build_general_measurement(cfg, pilots, support);
    CHECK(skel.A.cols() == 40);
    CHECK(skel.D == support.omega);
    for (std::size_t j = 0; j < support.support.size(); ++j) {
        CHECK((skel.A.col(static_cast<Index>(j)) - full.col(support.support[j])).norm() <= 1e-12);
    }
    CHECK(oracle::gram_max_eig(skel.A) <= rho_full * (1.0 + 1e-10));

    const auto model = make_model(skel, 0.01, 8);
    CHECK(validate_model(model).empty());

    BeamSupport too_big = full_support(cfg.Mtilde_general() + 1);
    CHECK_THROWS(build_general_measurement(cfg, pilots, too_big));
}

TEST_CASE("APSP measurement")
{
    const auto cfg = small_config();
    const CMatrix full = full_apsp_matrix(cfg);
    CHECK(full.rows() == cfg.N());
    CHECK(full.cols() == cfg.Mtilde_apsp());
    CHECK(max_unit_deviation(full) <= 1e-9);
    const double fine = static_cast<double>(cfg.Fv * cfg.Fh * cfg.Ftau);
    CHECK(oracle::eigenvalues(full * full.adjoint()).real().maxCoeff() ==
          doctest::Approx(fine * cfg.N()).epsilon(1e-10));

    ApspPilots pilots;
    pilots.shifts = {0, 16};
    pilots.p = CVector::Ones(cfg.Np);
    const auto support = random_support(cfg.Mtilde_apsp(), 48, 2);
    const auto skel = build_apsp_measurement(cfg, pilots, support);
    CHECK(max_unit_deviation(skel.A) <= 1e-9);
    CHECK(oracle::gram_max_eig(skel.A) <= fine * cfg.N() * (1.0 + 1e-10));
    CHECK(rho_shift(skel.A) <= (fine - 1.0) * cfg.N() * (1.0 + 1e-10));

    const CVector r = apsp_phase(cfg, 5);
    CHECK(max_unit_deviation(r) <= 1e-12);
    CHECK(std::abs(r(1) - std::polar(1.0, -2.0 * 3.14159265358979323846 * 5.0 / 32.0)) <= 1e-12);
    CHECK(max_unit_deviation(apsp_pilot(cfg, pilots, 1)) <= 1e-12);

    ApspPilots bad = pilots;
    bad.shifts = {0, 32};
    CHECK_THROWS(build_apsp_measurement(cfg, bad, support));
}

TEST_CASE("lazy Kronecker operator matches the materialized matrix")
{
    const auto cfg = small_config();
    const auto pilots = random_general_pilots(cfg, 4);
    const auto support = random_support(cfg.Mtilde_general(), 30, 6);
    const auto skel = build_general_measurement(cfg, pilots, support);
    const auto op = KroneckerOperator::general(cfg, pilots, support);
    REQUIRE(op.rows() == skel.A.rows());
    REQUIRE(op.cols() == skel.A.cols());
    const CVector x = CVector::LinSpaced(30, Complex(-1.0, 2.0), Complex(3.0, -1.0));
    CHECK((op.apply(x) - skel.A * x).norm() <= 1e-10 * x.norm());
    const CVector u = CVector::LinSpaced(cfg.N(), Complex(0.5, 0.0), Complex(-2.0, 1.0));
    CHECK((op.apply_adjoint(u) - skel.A.adjoint() * u).norm() <= 1e-10 * (skel.A.adjoint() * u).norm());

    const auto apsp_support = random_support(cfg.Mtilde_apsp(), 50, 7);
    ApspPilots ap{{0, 16}, CVector::Ones(cfg.Np)};
    const auto apsp_skel = build_apsp_measurement(cfg, ap, apsp_support);
    const auto apsp_op = KroneckerOperator::apsp(cfg, apsp_support);
    const CVector z = CVector::LinSpaced(50, Complex(1.0, 1.0), Complex(-1.0, 0.5));
    CHECK((apsp_op.apply(z) - apsp_skel.A * z).norm() <= 1e-10 * z.norm());

    const GramOperator gram = [&op](const CVector& v) { return op.gram(v); };
    CHECK(rho_shift(gram, op.rows(), op.cols(), 1e-12) == doctest::Approx(rho_shift(skel.A)).epsilon(1e-7));
}

TEST_CASE("channel sampling")
{
    const BeamSupport support = full_support(4);
    CHECK(sample_channel(support, 3) == sample_channel(support, 3));
    const int draws = 10000;
    RVector power = RVector::Zero(4);
    for (int k = 0; k < draws; ++k) {
        power += sample_channel(support, static_cast<std::uint64_t>(k) + 1).cwiseAbs2();
    }
    power /= draws;
    for (Index i = 0; i < 4; ++i) {
        CHECK(power(i) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("support helpers and files")
{
    const auto s = random_support(100, 10, 3, 0.2, 0.4);
    CHECK(s.support.size() == 10);
    CHECK(std::is_sorted(s.support.begin(), s.support.end()));
    CHECK(std::adjacent_find(s.support.begin(), s.support.end()) == s.support.end());
    CHECK(s.omega.minCoeff() >= 0.2);
    CHECK(s.omega.maxCoeff() <= 0.4);
    CHECK_THROWS(random_support(5, 6, 1));

    const std::string path = temp_path("support.txt");
    save_support(path, s);
    const auto loaded = load_support(path);
    CHECK(loaded.support == s.support);
    CHECK((loaded.omega - s.omega).norm() == 0.0);

    {
        std::ofstream out(path);
        out << "# comment\n3\n7 0.5  # trailing\n\n";
    }
    const auto parsed = load_support(path);
    CHECK(parsed.support == std::vector<Index>{3, 7});
    CHECK(parsed.omega(0) == 1.0);
    CHECK(parsed.omega(1) == 0.5);
    {
        std::ofstream out(path);
        out << "4\n2\n";
    }
    CHECK_THROWS(load_support(path));
    std::remove(path.c_str());
}
