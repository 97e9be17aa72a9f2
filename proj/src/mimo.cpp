#include "siga/mimo.hpp"
#include "siga/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace siga::mimo {

namespace {

Complex unit_root(Index numerator, Index denominator)
{
    // exp(-i 2 pi numerator / denominator) with the exponent reduced first
    const Index r = numerator % denominator;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(denominator);
    return {std::cos(angle), std::sin(angle)};
}

void require_unit_magnitude(const CVector& v, const std::string& what)
{
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(std::abs(v(i)) - 1.0) > kUnitMagnitudeTol) {
            throw std::invalid_argument(what + " entry " + std::to_string(i) + " does not have unit magnitude");
        }
    }
}

void require_support(const BeamSupport& s, Index Mtilde)
{
    if (s.support.empty()) {
        throw std::invalid_argument("beam support is empty");
    }
    if (static_cast<Index>(s.support.size()) != s.omega.size()) {
        throw DimensionError("support and omega differ in length");
    }
    for (std::size_t k = 0; k < s.support.size(); ++k) {
        const Index p = s.support[k];
        if (p < 0 || p >= Mtilde) {
            throw DimensionError("support index " + std::to_string(p) + " outside [0, " + std::to_string(Mtilde) + ")");
        }
        if (k > 0 && p <= s.support[k - 1]) {
            throw std::invalid_argument("support indices must be strictly increasing");
        }
        if (!(s.omega(static_cast<Index>(k)) > 0.0)) {
            throw std::invalid_argument("beam variances must be positive");
        }
    }
}

void require_general_pilots(const MimoOfdmConfig& cfg, const GeneralPilots& pilots)
{
    if (static_cast<int>(pilots.x.size()) != cfg.K) {
        throw DimensionError("expected one pilot sequence per user");
    }
    for (const CVector& x : pilots.x) {
        if (x.size() != cfg.Np) {
            throw DimensionError("pilot sequence length does not match Np");
        }
        require_unit_magnitude(x, "pilot");
    }
}

void require_apsp_pilots(const MimoOfdmConfig& cfg, const ApspPilots& pilots)
{
    if (static_cast<int>(pilots.shifts.size()) != cfg.K) {
        throw DimensionError("expected one phase shift per user");
    }
    for (int n : pilots.shifts) {
        if (n < 0 || n >= cfg.Ftau * cfg.Np) {
            throw std::invalid_argument("phase shift " + std::to_string(n) + " outside [0, Ftau Np - 1]");
        }
    }
    if (pilots.p.size() != cfg.Np) {
        throw DimensionError("basic pilot length does not match Np");
    }
    require_unit_magnitude(pilots.p, "basic pilot");
}

MeasurementSkeleton extract(const CMatrix& left, const CMatrix& V, const BeamSupport& support)
{
    const Index nV = V.cols();
    const Index Nr = V.rows();
    MeasurementSkeleton out;
    out.A.resize(left.rows() * Nr, static_cast<Index>(support.support.size()));
    for (std::size_t j = 0; j < support.support.size(); ++j) {
        const Index p = support.support[j];
        const Index lcol = p / nV;
        const Index vcol = p % nV;
        for (Index np = 0; np < left.rows(); ++np) {
            out.A.col(static_cast<Index>(j)).segment(np * Nr, Nr) = left(np, lcol) * V.col(vcol);
        }
    }
    out.D = support.omega;
    return out;
}

}  // namespace

Index MimoOfdmConfig::Nf() const
{
    const long long num = static_cast<long long>(Np) * Ng;
    if (rounding == NfRounding::Floor) {
        return static_cast<Index>(num / Nc);
    }
    return static_cast<Index>((num + Nc - 1) / Nc);
}

void MimoOfdmConfig::validate() const
{
    for (int v : {Nrv, Nrh, K, Np, Nc, Ng, Fv, Fh, Ftau}) {
        if (v < 1) {
            throw std::invalid_argument("MIMO-OFDM configuration fields must be positive");
        }
    }
    if (Np > Nc) {
        throw std::invalid_argument("training subcarriers Np exceed the subcarrier count Nc");
    }
    if (Nf() < 1) {
        throw std::invalid_argument("Nf = Np Ng / Nc rounds to zero");
    }
    if (Ftau * Nf() > static_cast<Index>(Ftau) * Np) {
        throw std::invalid_argument("Nf exceeds Np");
    }
}

MimoOfdmConfig small_config()
{
    MimoOfdmConfig cfg;
    cfg.Nrv = 2;
    cfg.Nrh = 2;
    cfg.K = 2;
    cfg.Np = 16;
    cfg.Nc = 64;
    cfg.Ng = 8;
    cfg.Fv = cfg.Fh = cfg.Ftau = 2;
    return cfg;
}

MimoOfdmConfig table_config()
{
    MimoOfdmConfig cfg;
    cfg.Nrv = 8;
    cfg.Nrh = 16;
    cfg.K = 48;
    cfg.Np = 360;
    cfg.Nc = 2048;
    cfg.Ng = 144;
    cfg.Fv = cfg.Fh = cfg.Ftau = 2;
    return cfg;
}

CMatrix partial_dft(Index rows, Index factor)
{
    if (rows < 1 || factor < 1) {
        throw std::invalid_argument("partial_dft needs rows >= 1 and factor >= 1");
    }
    const Index L = rows * factor;
    CMatrix out(rows, L);
    for (Index n = 0; n < L; ++n) {
        for (Index m = 0; m < rows; ++m) {
            out(m, n) = unit_root(m * n, L);
        }
    }
    return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix spatial_basis(const MimoOfdmConfig& cfg)
{
    return kron(partial_dft(cfg.Nrv, cfg.Fv), partial_dft(cfg.Nrh, cfg.Fh));
}

CMatrix delay_basis(const MimoOfdmConfig& cfg) { return partial_dft(cfg.Np, cfg.Ftau); }

CMatrix truncated_delay_basis(const MimoOfdmConfig& cfg)
{
    return delay_basis(cfg).leftCols(cfg.Ftau * cfg.Nf());
}

CMatrix pilot_delay_matrix(const MimoOfdmConfig& cfg, const GeneralPilots& pilots)
{
    require_general_pilots(cfg, pilots);
    const CMatrix F = truncated_delay_basis(cfg);
    CMatrix out(cfg.Np, cfg.K * F.cols());
    for (int k = 0; k < cfg.K; ++k) {
        out.middleCols(k * F.cols(), F.cols()) = pilots.x[static_cast<std::size_t>(k)].asDiagonal() * F;
    }
    return out;
}

CVector apsp_phase(const MimoOfdmConfig& cfg, int shift)
{
    const Index L = static_cast<Index>(cfg.Ftau) * cfg.Np;
    CVector r(cfg.Np);
    for (Index j = 0; j < cfg.Np; ++j) {
        r(j) = unit_root(static_cast<Index>(shift) * j, L);
    }
    return r;
}

CVector apsp_pilot(const MimoOfdmConfig& cfg, const ApspPilots& pilots, int user)
{
    require_apsp_pilots(cfg, pilots);
    return apsp_phase(cfg, pilots.shifts.at(static_cast<std::size_t>(user))).cwiseProduct(pilots.p);
}

GeneralPilots random_general_pilots(const MimoOfdmConfig& cfg, std::uint64_t seed)
{
    detail::ComplexGaussian gauss(seed);
    GeneralPilots pilots;
    pilots.x.reserve(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        CVector x(cfg.Np);
        for (Index i = 0; i < cfg.Np; ++i) {
            x(i) = gauss.phase();
        }
        pilots.x.push_back(std::move(x));
    }
    return pilots;
}

MeasurementSkeleton build_general_measurement(const MimoOfdmConfig& cfg, const GeneralPilots& pilots,
                                              const BeamSupport& support)
{
    cfg.validate();
    require_support(support, cfg.Mtilde_general());
    return extract(pilot_delay_matrix(cfg, pilots), spatial_basis(cfg), support);
}

MeasurementSkeleton build_apsp_measurement(const MimoOfdmConfig& cfg, const ApspPilots& pilots,
                                           const BeamSupport& support)
{
    cfg.validate();
    require_apsp_pilots(cfg, pilots);
    require_support(support, cfg.Mtilde_apsp());
    return extract(delay_basis(cfg), spatial_basis(cfg), support);
}

CMatrix full_general_matrix(const MimoOfdmConfig& cfg, const GeneralPilots& pilots)
{
    cfg.validate();
    return kron(pilot_delay_matrix(cfg, pilots), spatial_basis(cfg));
}

CMatrix full_apsp_matrix(const MimoOfdmConfig& cfg)
{
    cfg.validate();
    return kron(delay_basis(cfg), spatial_basis(cfg));
}

CVector sample_channel(const BeamSupport& support, std::uint64_t seed)
{
    detail::ComplexGaussian gauss(seed);
    CVector h(support.omega.size());
    for (Index i = 0; i < h.size(); ++i) {
        if (!(support.omega(i) > 0.0)) {
            throw std::invalid_argument("beam variances must be positive");
        }
        h(i) = gauss(support.omega(i));
    }
    return h;
}

BeamSupport full_support(Index Mtilde)
{
    BeamSupport s;
    s.support.resize(static_cast<std::size_t>(Mtilde));
    for (Index i = 0; i < Mtilde; ++i) {
        s.support[static_cast<std::size_t>(i)] = i;
    }
    s.omega = RVector::Ones(Mtilde);
    return s;
}

BeamSupport random_support(Index Mtilde, Index count, std::uint64_t seed, double omega_min, double omega_max)
{
    if (count < 1 || count > Mtilde) {
        throw std::invalid_argument("support size must lie in [1, Mtilde]");
    }
    if (!(omega_min > 0.0) || omega_max < omega_min) {
        throw std::invalid_argument("invalid beam variance range");
    }
    std::mt19937_64 engine(seed);
    std::vector<Index> all(static_cast<std::size_t>(Mtilde));
    for (Index i = 0; i < Mtilde; ++i) {
        all[static_cast<std::size_t>(i)] = i;
    }
    std::shuffle(all.begin(), all.end(), engine);
    all.resize(static_cast<std::size_t>(count));
    std::sort(all.begin(), all.end());

    std::uniform_real_distribution<double> unif(omega_min, omega_max);
    BeamSupport s;
    s.support = std::move(all);
    s.omega.resize(count);
    for (Index i = 0; i < count; ++i) {
        s.omega(i) = unif(engine);
    }
    return s;
}

BeamSupport load_support(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open support file " + path);
    }
    std::vector<Index> idx;
    std::vector<double> omega;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        long long i = 0;
        if (!(ls >> i)) {
            continue;
        }
        double w = 1.0;
        if (!(ls >> w)) {
            w = 1.0;
        }
        const std::string where = path + ":" + std::to_string(lineno) + ": ";
        if (i < 0) {
            throw std::invalid_argument(where + "negative index");
        }
        if (!idx.empty() && static_cast<Index>(i) <= idx.back()) {
            throw std::invalid_argument(where + "indices must be strictly increasing");
        }
        if (!(w > 0.0)) {
            throw std::invalid_argument(where + "beam variance must be positive");
        }
        idx.push_back(static_cast<Index>(i));
        omega.push_back(w);
    }
    BeamSupport s;
    s.support = std::move(idx);
    s.omega = Eigen::Map<const RVector>(omega.data(), static_cast<Index>(omega.size()));
    return s;
}

void save_support(const std::string& path, const BeamSupport& support)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write support file " + path);
    }
    out << "# index omega (0-based column indices)\n";
    out.precision(17);
    for (std::size_t k = 0; k < support.support.size(); ++k) {
        out << support.support[k] << ' ' << support.omega(static_cast<Index>(k)) << '\n';
    }
}

GaussianLinearModel make_model(const MeasurementSkeleton& skeleton, double sigma_z2, std::uint64_t seed)
{
    GaussianLinearModel model;
    model.A = skeleton.A;
    model.D = skeleton.D;
    model.sigma_z2 = sigma_z2;
    model.y = simulate_observation(model.A, model.D, sigma_z2, seed).y;
    return model;
}

KroneckerOperator::KroneckerOperator(CMatrix left, CMatrix basis, std::vector<Index> support)
    : left_(std::move(left)), basis_(std::move(basis)), support_(std::move(support))
{
    const Index total = left_.cols() * basis_.cols();
    for (Index p : support_) {
        if (p < 0 || p >= total) {
            throw DimensionError("support index outside the Kronecker column space");
        }
    }
}

CVector KroneckerOperator::apply(const CVector& x) const
{
    if (x.size() != cols()) {
        throw DimensionError("operand length does not match the support size");
    }
    CMatrix H = CMatrix::Zero(basis_.cols(), left_.cols());
    for (std::size_t j = 0; j < support_.size(); ++j) {
        const Index p = support_[j];
        H(p % basis_.cols(), p / basis_.cols()) = x(static_cast<Index>(j));
    }
    // vec(V H L^T)
    const CMatrix Y = basis_ * H * left_.transpose();
    return Eigen::Map<const CVector>(Y.data(), Y.size());
}

CVector KroneckerOperator::apply_adjoint(const CVector& u) const
{
    if (u.size() != rows()) {
        throw DimensionError("operand length does not match the row count");
    }
    const Eigen::Map<const CMatrix> U(u.data(), basis_.rows(), left_.rows());
    // vec(V^H U conj(L))
    const CMatrix H = basis_.adjoint() * U * left_.conjugate();
    CVector out(cols());
    for (std::size_t j = 0; j < support_.size(); ++j) {
        const Index p = support_[j];
        out(static_cast<Index>(j)) = H(p % basis_.cols(), p / basis_.cols());
    }
    return out;
}

KroneckerOperator KroneckerOperator::general(const MimoOfdmConfig& cfg, const GeneralPilots& pilots,
                                             const BeamSupport& support)
{
    cfg.validate();
    require_support(support, cfg.Mtilde_general());
    return {pilot_delay_matrix(cfg, pilots), spatial_basis(cfg), support.support};
}

KroneckerOperator KroneckerOperator::apsp(const MimoOfdmConfig& cfg, const BeamSupport& support)
{
    cfg.validate();
    require_support(support, cfg.Mtilde_apsp());
    return {delay_basis(cfg), spatial_basis(cfg), support.support};
}

}  // namespace siga::mimo
